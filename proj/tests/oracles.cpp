#include "oracles.hpp"

#include <map>
#include <numeric>

namespace oracle {

std::string fixture_path(const std::string& name) { return std::string(GERMLAB_FIXTURE_DIR) + "/" + name + ".json"; }

json load_fixture(const std::string& name) { return read_json_file(fixture_path(name)); }

PreparedBundle prepared_from(const json& doc) { return prepare_bundle(parse_document(doc)); }

PreparedBundle prepared_fixture(const std::string& name) { return prepared_from(load_fixture(name)); }

std::vector<json> random_fixture_set(int count, std::uint64_t first_seed) {
  std::vector<json> out;
  for (int k = 0; k < count; ++k) {
    const std::uint64_t seed = first_seed + k;
    out.push_back(random_fixture(seed, 8, 2 + static_cast<int>(seed % 15)));
  }
  return out;
}

int germ_count(const Action& action) {
  const InverseSemigroup& S = action.semigroup();
  const int X = action.space().num_points();
  std::vector<std::pair<int, int>> pairs;
  for (int s = 0; s < S.size(); ++s) {
    for (int x = 0; x < X; ++x) {
      if (action.theta(s).apply(x)) pairs.push_back({s, x});
    }
  }
  auto same = [&](int s, int t, int x) {
    for (int e : S.idempotents()) {
      if (action.theta(e).apply(x) && S.mul(s, e) == S.mul(t, e)) return true;
    }
    return false;
  };
  std::vector<int> parent(pairs.size());
  std::iota(parent.begin(), parent.end(), 0);
  std::function<int(int)> find = [&](int i) { return parent[i] == i ? i : parent[i] = find(parent[i]); };
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    for (std::size_t j = i + 1; j < pairs.size(); ++j) {
      if (pairs[i].second == pairs[j].second && same(pairs[i].first, pairs[j].first, pairs[i].second)) {
        parent[find(static_cast<int>(i))] = find(static_cast<int>(j));
      }
    }
  }
  int classes = 0;
  for (std::size_t i = 0; i < pairs.size(); ++i) classes += find(static_cast<int>(i)) == static_cast<int>(i) ? 1 : 0;
  return classes;
}

namespace {

Eigen::VectorXcd product(const FellBundle& b, int s, const Eigen::VectorXcd& x, int t, const Eigen::VectorXcd& y) {
  const int st = b.sg.mul(s, t);
  Eigen::VectorXcd out = Eigen::VectorXcd::Zero(b.dim(st));
  const ProductTable& tab = b.products[s * b.n() + t];
  for (int i = 0; i < b.dim(s); ++i) {
    for (int j = 0; j < b.dim(t); ++j) {
      for (const auto& [k, c] : tab.at(i, j)) out[k] += x[i] * y[j] * c;
    }
  }
  return out;
}

}  // namespace

bool associative(const FellBundle& b, json* where) {
  const int n = b.n();
  for (int r = 0; r < n; ++r) {
    for (int s = 0; s < n; ++s) {
      for (int t = 0; t < n; ++t) {
        const int rs = b.sg.mul(r, s), st = b.sg.mul(s, t);
        for (int i = 0; i < b.dim(r); ++i) {
          const Eigen::VectorXcd a = Eigen::VectorXcd::Unit(b.dim(r), i);
          for (int j = 0; j < b.dim(s); ++j) {
            const Eigen::VectorXcd bb = Eigen::VectorXcd::Unit(b.dim(s), j);
            const Eigen::VectorXcd ab = product(b, r, a, s, bb);
            for (int k = 0; k < b.dim(t); ++k) {
              const Eigen::VectorXcd c = Eigen::VectorXcd::Unit(b.dim(t), k);
              const Eigen::VectorXcd lhs = product(b, rs, ab, t, c);
              const Eigen::VectorXcd rhs = product(b, r, a, st, product(b, s, bb, t, c));
              if ((lhs - rhs).norm() > 1e-12) {
                if (where) *where = json{{"r", r}, {"s", s}, {"t", t}, {"i", i}, {"j", j}, {"k", k}};
                return false;
              }
            }
          }
        }
      }
    }
  }
  return true;
}

double opnorm(const Eigen::MatrixXcd& m) {
  if (m.size() == 0) return 0.0;
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(m);
  return svd.singularValues()(0);
}

double reduced_norm(const LineBundle& l, const Section& xi) {
  const GermGroupoid& g = l.groupoid;
  double best = 0.0;
  for (int c = 0; c < g.num_cells(); ++c) {
    if (g.unit_at(c) < 0) continue;
    std::map<int, int> pos;
    for (int h = 0; h < g.size(); ++h) {
      if (g.source(h) == c) pos[h] = static_cast<int>(pos.size());
    }
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(pos.size(), pos.size());
    for (const auto& [h, col] : pos) {
      for (int k = 0; k < g.size(); ++k) {
        const int kh = g.compose(k, h);
        if (kh < 0) continue;
        m(pos.at(kh), col) += xi[k] * l.mul_const(k, h);
      }
    }
    best = std::max(best, opnorm(m));
  }
  return best;
}

double transport_error(const GroupoidLineBundle& input) {
  const GroupoidBundleData data = groupoid_bundle(input);
  const FellBundle b = build_bundle(data.presentation);
  const LineBundle l = build_line_bundle(b);
  const FiniteGroupoid& G = input.groupoid;
  const GermGroupoid& g = l.groupoid;
  const auto& fam = data.closed.bissections;

  std::vector<int> germ_of(G.size(), -1);
  std::vector<cd> lambda(G.size(), 0.0);
  for (int a = 0; a < G.size(); ++a) {
    for (std::size_t u = 0; u < fam.size(); ++u) {
      if (!std::binary_search(fam[u].begin(), fam[u].end(), a)) continue;
      const int x = g.action().space().point_index(G.labels[G.src[a]]);
      const int k = b.basis_index_at(static_cast<int>(u), x);
      const int germ = g.germ_of(static_cast<int>(u), g.cell_of_point(x));
      germ_of[a] = germ;
      lambda[a] = coefficient(b, l, germ, b.basis(static_cast<int>(u), k));
      break;
    }
  }
  double worst = 0.0;
  for (int a = 0; a < G.size(); ++a) {
    for (int c = 0; c < G.size(); ++c) {
      const int ac = G.comp[a][c];
      if (ac < 0) continue;
      const cd expected = input.sigma[a][c] * lambda[ac] / (lambda[a] * lambda[c]);
      worst = std::max(worst, std::abs(l.mul_const(germ_of[a], germ_of[c]) - expected));
    }
  }
  return worst;
}

}  // namespace oracle
