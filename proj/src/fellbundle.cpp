#include "germlab/fellbundle.hpp"

#include <algorithm>
#include <map>
#include <random>
#include <set>

namespace germlab {

// ------------------------------------------------------------------ fibers

bool FellBundle::coordinate_fiber(int s) const {
  for (int p : basis_point[s]) {
    if (p < 0) return false;
  }
  return true;
}

int FellBundle::basis_index_at(int s, int x) const {
  const auto& bp = basis_point[s];
  for (int i = 0; i < static_cast<int>(bp.size()); ++i) {
    if (bp[i] == x) return i;
  }
  return -1;
}

FiberElement FellBundle::basis(int s, int i) const {
  FiberElement a = zero(s);
  a.c[i] = 1.0;
  return a;
}

FiberElement FellBundle::zero(int s) const { return FiberElement{s, Eigen::VectorXcd::Zero(dim(s))}; }

FiberElement FellBundle::mul(const FiberElement& a, const FiberElement& b) const {
  const int st = sg.mul(a.s, b.s);
  FiberElement r = zero(st);
  const ProductTable& pt = products[static_cast<std::size_t>(a.s) * n() + b.s];
  std::vector<int> nza, nzb;
  for (int i = 0; i < a.c.size(); ++i) {
    if (a.c[i] != 0.0) nza.push_back(i);
  }
  for (int j = 0; j < b.c.size(); ++j) {
    if (b.c[j] != 0.0) nzb.push_back(j);
  }
  for (int i : nza) {
    for (int j : nzb) {
      const auto& entry = pt.at(i, j);
      if (entry.empty()) continue;
      const cd w = a.c[i] * b.c[j];
      for (const auto& [k, v] : entry) r.c[k] += w * v;
    }
  }
  return r;
}

FiberElement FellBundle::star(const FiberElement& a) const {
  return FiberElement{sg.star(a.s), stars[a.s] * a.c.conjugate()};
}

bool FellBundle::has_inclusion(int t, int s) const { return sg.leq(s, t); }

FiberElement FellBundle::include(int t, const FiberElement& a) const {
  if (!sg.leq(a.s, t)) {
    throw Error("NotBelow", sg.label(a.s) + " is not below " + sg.label(t),
                json{{"s", sg.label(a.s)}, {"t", sg.label(t)}});
  }
  return FiberElement{t, inclusions[static_cast<std::size_t>(t) * n() + a.s] * a.c};
}

cd FellBundle::value_at(const FiberElement& d, int x) const {
  const int i = basis_index_at(d.s, x);
  return i < 0 ? cd(0.0) : d.c[i];
}

double FellBundle::square_at(const FiberElement& a, int x) const {
  return value_at(mul(star(a), a), x).real();
}

namespace {

Eigen::MatrixXcd left_regular(const FellBundle& b, const FiberElement& d) {
  const int e = d.s;
  Eigen::MatrixXcd L = Eigen::MatrixXcd::Zero(b.dim(e), b.dim(e));
  for (int j = 0; j < b.dim(e); ++j) L.col(j) = b.mul(d, b.basis(e, j)).c;
  return L;
}

double spectral_norm(const Eigen::MatrixXcd& m) {
  if (m.size() == 0) return 0.0;
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(m);
  return svd.singularValues()(0);
}

}  // namespace

double FellBundle::norm(const FiberElement& a) const {
  const FiberElement aa = mul(star(a), a);
  if (aa.c.size() == 0) return 0.0;
  if (coordinate_fiber(aa.s)) return std::sqrt(aa.c.cwiseAbs().maxCoeff());
  return std::sqrt(spectral_norm(left_regular(*this, aa)));
}

std::vector<int> FellBundle::unit_support(int e) const {
  std::vector<int> v = basis_point[e];
  std::sort(v.begin(), v.end());
  return v;
}

FiberElement operator+(const FiberElement& a, const FiberElement& b) { return FiberElement{a.s, a.c + b.c}; }
FiberElement operator-(const FiberElement& a, const FiberElement& b) { return FiberElement{a.s, a.c - b.c}; }
FiberElement operator*(cd z, const FiberElement& a) { return FiberElement{a.s, z * a.c}; }
double distance(const FiberElement& a, const FiberElement& b) {
  if (a.s != b.s) return std::numeric_limits<double>::infinity();
  if (a.c.size() == 0) return 0.0;
  return (a.c - b.c).cwiseAbs().maxCoeff();
}

json element_to_json(const FellBundle& b, const FiberElement& a) {
  json coeffs = json::object();
  for (int i = 0; i < a.c.size(); ++i) {
    const int p = b.basis_point[a.s][i];
    const std::string key = p >= 0 ? b.points[p] : "#" + std::to_string(i);
    coeffs[key] = complex_to_json(a.c[i]);
  }
  return json{{"s", b.sg.label(a.s)}, {"coeffs", coeffs}};
}

// ------------------------------------------------------------------ twisted actions

std::vector<std::vector<cd>> trivial_omega(const Action& action) {
  const int n = action.semigroup().size();
  return std::vector<std::vector<cd>>(static_cast<std::size_t>(n) * n,
                                      std::vector<cd>(action.space().num_points(), cd(1.0)));
}

namespace {

json slot(const TwistedAction& p, std::initializer_list<int> elems, int x) {
  static const char* names[] = {"r", "s", "t"};
  const auto& S = p.action.semigroup();
  json w = json::object();
  int k = elems.size() == 2 ? 1 : 0;
  for (int e : elems) w[names[k++]] = S.label(e);
  w["x"] = p.action.space().point_label(x);
  return w;
}

}  // namespace

void check_cocycle(const TwistedAction& p) {
  const auto& S = p.action.semigroup();
  const int n = S.size();
  const int X = p.action.space().num_points();
  if (static_cast<int>(p.omega.size()) != n * n) throw InputError("cocycle table has the wrong number of slots");
  auto om = [&](int s, int t, int x) { return p.omega[static_cast<std::size_t>(s) * n + t][x]; };
  auto dom = [&](int s, int x) { return p.action.theta(s).apply(x).has_value(); };

  for (int s = 0; s < n; ++s) {
    for (int t = 0; t < n; ++t) {
      if (static_cast<int>(p.omega[static_cast<std::size_t>(s) * n + t].size()) != X) {
        throw InputError("cocycle slot has the wrong number of points");
      }
      const int st = S.mul(s, t);
      for (int x = 0; x < X; ++x) {
        if (!dom(st, x)) continue;
        const cd w = om(s, t, x);
        if (std::abs(std::abs(w) - 1.0) > kCoordTol) {
          json wit = slot(p, {s, t}, x);
          wit["value"] = complex_to_json(w);
          throw Error("CocycleNotUnimodular", "omega value off the unit circle", wit);
        }
        const bool idem_slot = S.is_idempotent(s) || S.is_idempotent(t);
        const bool inv_slot = p.inverse_slots_normalized && t == S.star(s);
        if ((idem_slot || inv_slot) && !near(w, cd(1.0))) {
          json wit = slot(p, {s, t}, x);
          wit["value"] = complex_to_json(w);
          throw Error("CocycleNotNormalized", "omega must be 1 on this slot", wit);
        }
      }
    }
  }
  for (int r = 0; r < n; ++r) {
    for (int s = 0; s < n; ++s) {
      const int rs = S.mul(r, s);
      for (int t = 0; t < n; ++t) {
        const int st = S.mul(s, t);
        const int rst = S.mul(rs, t);
        for (int x = 0; x < X; ++x) {
          if (!dom(rst, x)) continue;
          const int tx = *p.action.theta(t).apply(x);
          const cd lhs = om(r, s, tx) * om(rs, t, x);
          const cd rhs = om(s, t, x) * om(r, st, x);
          if (!near(lhs, rhs)) {
            json wit = slot(p, {r, s, t}, x);
            wit["lhs"] = complex_to_json(lhs);
            wit["rhs"] = complex_to_json(rhs);
            throw Error("CocycleNotAssociative", "omega fails the cocycle identity", wit);
          }
        }
      }
    }
  }
}

FellBundle build_bundle(const TwistedAction& p, BuildCheck check) {
  if (check == BuildCheck::Full) check_cocycle(p);
  const auto& S = p.action.semigroup();
  const int n = S.size();
  FellBundle b;
  b.sg = S;
  b.points = p.action.space().point_labels();
  b.basis_point.resize(n);
  for (int s = 0; s < n; ++s) b.basis_point[s] = p.action.domain(s).point_list();

  std::vector<std::vector<int>> pos(n, std::vector<int>(b.num_points(), -1));
  for (int s = 0; s < n; ++s) {
    for (int i = 0; i < b.dim(s); ++i) pos[s][b.basis_point[s][i]] = i;
  }
  auto om = [&](int s, int t, int x) { return p.omega[static_cast<std::size_t>(s) * n + t][x]; };

  b.products.resize(static_cast<std::size_t>(n) * n);
  for (int s = 0; s < n; ++s) {
    for (int t = 0; t < n; ++t) {
      ProductTable& pt = b.products[static_cast<std::size_t>(s) * n + t];
      pt.init(b.dim(s), b.dim(t));
      const int st = S.mul(s, t);
      for (int j = 0; j < b.dim(t); ++j) {
        const int x = b.basis_point[t][j];
        const auto tx = p.action.theta(t).apply(x);
        if (!tx || pos[s][*tx] < 0) continue;
        pt.at(pos[s][*tx], j).push_back({pos[st][x], om(s, t, x)});
      }
    }
  }
  b.stars.resize(n);
  for (int s = 0; s < n; ++s) {
    const int ss = S.star(s);
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(b.dim(ss), b.dim(s));
    for (int i = 0; i < b.dim(s); ++i) {
      const int u = b.basis_point[s][i];
      const int y = *p.action.theta(s).apply(u);
      m(pos[ss][y], i) = std::conj(om(ss, s, u));
    }
    b.stars[s] = m;
  }
  b.inclusions.resize(static_cast<std::size_t>(n) * n);
  for (int t = 0; t < n; ++t) {
    for (int s = 0; s < n; ++s) {
      if (!S.leq(s, t)) continue;
      Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(b.dim(t), b.dim(s));
      for (int i = 0; i < b.dim(s); ++i) m(pos[t][b.basis_point[s][i]], i) = 1.0;
      b.inclusions[static_cast<std::size_t>(t) * n + s] = m;
    }
  }
  return b;
}

SampledBundle sample_interval(const IntervalTwistedAction& p, int grid) {
  if (grid < 2) throw InputError("grid resolution must be at least 2");
  const auto& S = p.action.semigroup();
  const int n = S.size();
  std::set<Rational> pts;
  for (const auto& [a, b] : p.action.space().components()) {
    if (a == b) {
      pts.insert(a);
      continue;
    }
    for (int k = 0; k < grid; ++k) pts.insert(a + (b - a) * Rational(k, grid - 1));
  }
  bool grew = true;
  while (grew) {
    grew = false;
    std::vector<Rational> add;
    for (const auto& x : pts) {
      for (int s = 0; s < n; ++s) {
        auto y = p.action.theta(s).apply(x);
        if (y && !pts.count(*y)) add.push_back(*y);
      }
    }
    for (const auto& y : add) grew = pts.insert(y).second || grew;
  }
  std::vector<Rational> samples(pts.begin(), pts.end());
  std::vector<std::string> labels;
  for (const auto& x : samples) labels.push_back(format_rational(x));
  auto index_of = [&](const Rational& y) {
    return static_cast<int>(std::lower_bound(samples.begin(), samples.end(), y) - samples.begin());
  };
  std::vector<PartialHomeo> theta;
  for (int s = 0; s < n; ++s) {
    std::vector<int> t(samples.size(), -1);
    for (std::size_t i = 0; i < samples.size(); ++i) {
      auto y = p.action.theta(s).apply(samples[i]);
      if (y) t[i] = index_of(*y);
    }
    theta.push_back(PartialHomeo::from_table(t));
  }
  SampledBundle out;
  out.samples = samples;
  out.presentation.action = Action::validate(S, Space::discrete(labels), theta);
  out.presentation.omega.resize(static_cast<std::size_t>(n) * n);
  for (std::size_t k = 0; k < out.presentation.omega.size(); ++k) {
    out.presentation.omega[k].assign(samples.size(), p.omega[k]);
  }
  return out;
}

// ------------------------------------------------------------------ groupoid presentations

int FiniteGroupoid::index_of(const std::string& label) const {
  for (int i = 0; i < size(); ++i) {
    if (labels[i] == label) return i;
  }
  throw InputError("unknown arrow \"" + label + "\"");
}

void FiniteGroupoid::validate() const {
  const int n = size();
  auto fail = [&](const std::string& what, json w) { throw Error("NotAGroupoid", what, std::move(w)); };
  for (int u : units) {
    if (src[u] != u || rng[u] != u) fail("unit is not its own source and range", json{{"arrow", labels[u]}});
  }
  for (int a = 0; a < n; ++a) {
    if (!is_unit(src[a]) || !is_unit(rng[a])) fail("source or range is not a unit", json{{"arrow", labels[a]}});
  }
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) {
      const int ab = comp[a][b];
      const bool composable = src[a] == rng[b];
      if (composable != (ab >= 0)) fail("composition defined off composable pairs", json{{"a", labels[a]}, {"b", labels[b]}});
      if (ab >= 0 && (src[ab] != src[b] || rng[ab] != rng[a])) {
        fail("composite has the wrong endpoints", json{{"a", labels[a]}, {"b", labels[b]}});
      }
    }
    if (comp[rng[a]][a] != a || comp[a][src[a]] != a) fail("unit law fails", json{{"arrow", labels[a]}});
    const int ia = inverse[a];
    if (ia < 0 || comp[a][ia] != rng[a] || comp[ia][a] != src[a]) fail("missing inverse", json{{"arrow", labels[a]}});
  }
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) {
      if (comp[a][b] < 0) continue;
      for (int c = 0; c < n; ++c) {
        if (comp[b][c] < 0) continue;
        if (comp[comp[a][b]][c] != comp[a][comp[b][c]]) {
          fail("composition is not associative", json{{"a", labels[a]}, {"b", labels[b]}, {"c", labels[c]}});
        }
      }
    }
  }
}

void check_groupoid_cocycle(const FiniteGroupoid& g, const std::vector<std::vector<cd>>& sigma) {
  const int n = g.size();
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) {
      if (g.comp[a][b] < 0) continue;
      const cd w = sigma[a][b];
      json wit{{"a", g.labels[a]}, {"b", g.labels[b]}, {"value", complex_to_json(w)}};
      if (std::abs(std::abs(w) - 1.0) > kCoordTol) throw Error("CocycleNotUnimodular", "cocycle value off the unit circle", wit);
      if ((g.is_unit(a) || g.is_unit(b)) && !near(w, cd(1.0))) {
        throw Error("CocycleNotNormalized", "cocycle must be 1 when a unit is involved", wit);
      }
    }
  }
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) {
      if (g.comp[a][b] < 0) continue;
      for (int c = 0; c < n; ++c) {
        if (g.comp[b][c] < 0) continue;
        const cd lhs = sigma[a][b] * sigma[g.comp[a][b]][c];
        const cd rhs = sigma[b][c] * sigma[a][g.comp[b][c]];
        if (!near(lhs, rhs)) {
          throw Error("CocycleNotAssociative", "cocycle identity fails",
                      json{{"a", g.labels[a]}, {"b", g.labels[b]}, {"c", g.labels[c]},
                           {"lhs", complex_to_json(lhs)}, {"rhs", complex_to_json(rhs)}});
        }
      }
    }
  }
}

GroupoidBundleData groupoid_bundle(const GroupoidLineBundle& p) {
  const FiniteGroupoid& g = p.groupoid;
  g.validate();
  check_groupoid_cocycle(g, p.sigma);

  GroupoidBundleData out;
  out.closed = p;
  auto& fam = out.closed.bissections;
  auto& labels = out.closed.bissection_labels;
  for (auto& m : fam) {
    std::sort(m.begin(), m.end());
    m.erase(std::unique(m.begin(), m.end()), m.end());
  }
  if (labels.size() != fam.size()) throw InputError("bissection label count mismatch");

  auto check_bissection = [&](const std::vector<int>& m, const std::string& label) {
    for (std::size_t i = 0; i < m.size(); ++i) {
      for (std::size_t j = i + 1; j < m.size(); ++j) {
        if (g.src[m[i]] == g.src[m[j]] || g.rng[m[i]] == g.rng[m[j]]) {
          throw Error("NotABissection", "two arrows of " + label + " share a source or range",
                      json{{"member", label}, {"arrows", {g.labels[m[i]], g.labels[m[j]]}}});
        }
      }
    }
  };
  for (std::size_t k = 0; k < fam.size(); ++k) check_bissection(fam[k], labels[k]);

  std::map<std::vector<int>, int> where;
  {
    std::vector<std::vector<int>> dedup;
    std::vector<std::string> dlabels;
    for (std::size_t k = 0; k < fam.size(); ++k) {
      if (where.count(fam[k])) continue;
      where[fam[k]] = static_cast<int>(dedup.size());
      dedup.push_back(fam[k]);
      dlabels.push_back(labels[k]);
    }
    fam = dedup;
    labels = dlabels;
  }
  auto name_of = [&](const std::vector<int>& m) {
    std::string s = "[";
    for (std::size_t i = 0; i < m.size(); ++i) s += (i ? "," : "") + g.labels[m[i]];
    return s + "]";
  };
  auto add = [&](std::vector<int> m) {
    if (where.count(m)) return false;
    if (fam.size() >= 256) throw Error("FamilyTooLarge", "closure of the bissection family exceeds 256 members");
    where[m] = static_cast<int>(fam.size());
    labels.push_back(name_of(m));
    fam.push_back(std::move(m));
    return true;
  };
  bool grew = true;
  while (grew) {
    grew = false;
    const std::size_t cur = fam.size();
    for (std::size_t u = 0; u < cur; ++u) {
      std::vector<int> inv;
      for (int a : fam[u]) inv.push_back(g.inverse[a]);
      std::sort(inv.begin(), inv.end());
      grew = add(inv) || grew;
      for (std::size_t v = 0; v < cur; ++v) {
        std::vector<int> prod;
        for (int a : fam[u]) {
          for (int b : fam[v]) {
            if (g.comp[a][b] >= 0) prod.push_back(g.comp[a][b]);
          }
        }
        std::sort(prod.begin(), prod.end());
        prod.erase(std::unique(prod.begin(), prod.end()), prod.end());
        grew = add(prod) || grew;
      }
    }
  }
  const int n = static_cast<int>(fam.size());
  std::vector<std::vector<int>> table(n, std::vector<int>(n));
  std::optional<int> zero;
  for (int u = 0; u < n; ++u) {
    if (fam[u].empty()) zero = u;
    for (int v = 0; v < n; ++v) {
      std::vector<int> prod;
      for (int a : fam[u]) {
        for (int b : fam[v]) {
          if (g.comp[a][b] >= 0) prod.push_back(g.comp[a][b]);
        }
      }
      std::sort(prod.begin(), prod.end());
      prod.erase(std::unique(prod.begin(), prod.end()), prod.end());
      table[u][v] = where.at(prod);
    }
  }
  InverseSemigroup S = InverseSemigroup::validate(labels, table, zero);

  std::vector<int> point_of(g.size(), -1);
  std::vector<std::string> point_labels;
  for (int u : g.units) {
    point_of[u] = static_cast<int>(point_labels.size());
    point_labels.push_back(g.labels[u]);
  }
  const int X = static_cast<int>(point_labels.size());
  out.arrow_of.assign(n, std::vector<int>(X, -1));
  std::vector<PartialHomeo> theta;
  for (int u = 0; u < n; ++u) {
    std::vector<int> t(X, -1);
    for (int a : fam[u]) {
      t[point_of[g.src[a]]] = point_of[g.rng[a]];
      out.arrow_of[u][point_of[g.src[a]]] = a;
    }
    theta.push_back(PartialHomeo::from_table(t));
  }
  out.presentation.action = Action::validate(S, Space::discrete(point_labels), theta);
  out.presentation.inverse_slots_normalized = false;
  out.presentation.omega = trivial_omega(out.presentation.action);
  for (int u = 0; u < n; ++u) {
    for (int v = 0; v < n; ++v) {
      for (int x = 0; x < X; ++x) {
        const int b = out.arrow_of[v][x];
        if (b < 0) continue;
        const int a = out.arrow_of[u][point_of[g.rng[b]]];
        if (a < 0) continue;
        out.presentation.omega[static_cast<std::size_t>(u) * n + v][x] = p.sigma[a][b];
      }
    }
  }
  return out;
}

// ------------------------------------------------------------------ axioms

json AxiomReport::to_json() const {
  json checks_json = json::array();
  for (const auto& c : checks) {
    checks_json.push_back({{"name", c.name}, {"pass", c.pass}, {"witness", c.witness}});
  }
  return json{{"pass", pass}, {"checks", checks_json}};
}

const CheckResult* AxiomReport::first_failure() const {
  for (const auto& c : checks) {
    if (!c.pass) return &c;
  }
  return nullptr;
}

namespace {

struct Probe {
  FiberElement el;
  json ref;
};

std::vector<std::vector<Probe>> make_probes(const FellBundle& b, std::uint64_t seed, int randoms) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> N(0.0, 1.0);
  std::vector<std::vector<Probe>> probes(b.n());
  for (int s = 0; s < b.n(); ++s) {
    for (int i = 0; i < b.dim(s); ++i) {
      const int p = b.basis_point[s][i];
      probes[s].push_back({b.basis(s, i), json{{"fiber", b.sg.label(s)},
                                               {"basis", p >= 0 ? json(b.points[p]) : json(i)}}});
    }
    if (b.dim(s) == 0) continue;
    for (int k = 0; k < randoms; ++k) {
      FiberElement a = b.zero(s);
      for (int i = 0; i < b.dim(s); ++i) a.c[i] = cd(N(rng), N(rng));
      probes[s].push_back({a, json{{"fiber", b.sg.label(s)}, {"random_probe", k}, {"seed", seed}}});
    }
  }
  return probes;
}

bool is_positive(const FellBundle& b, const FiberElement& d, double scale) {
  const double tol = 1e-12 * std::max(1.0, scale);
  if (b.coordinate_fiber(d.s)) {
    for (int i = 0; i < d.c.size(); ++i) {
      if (d.c[i].real() < -tol || std::abs(d.c[i].imag()) > tol) return false;
    }
    return true;
  }
  const Eigen::MatrixXcd L = left_regular(b, d);
  if ((L - L.adjoint()).cwiseAbs().maxCoeff() > tol) return false;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(L);
  return es.eigenvalues().minCoeff() >= -tol;
}

}  // namespace

AxiomReport validate_axioms(const FellBundle& b, std::uint64_t seed) {
  const InverseSemigroup& S = b.sg;
  const int n = b.n();
  const auto probes = make_probes(b, seed, 2);
  AxiomReport rep;
  auto tol_for = [](double scale) { return 1e-12 * std::max(1.0, scale); };
  auto record = [&](CheckResult r) {
    rep.pass = rep.pass && r.pass;
    rep.checks.push_back(std::move(r));
  };

  {  // (i) products land in A_st with the right shape
    CheckResult r{"closure"};
    for (int s = 0; s < n && r.pass; ++s) {
      for (int t = 0; t < n && r.pass; ++t) {
        const ProductTable& pt = b.products[static_cast<std::size_t>(s) * n + t];
        const int st = S.mul(s, t);
        if (pt.rows != b.dim(s) || pt.cols != b.dim(t)) {
          r = {"closure", false, json{{"s", S.label(s)}, {"t", S.label(t)}, {"problem", "table shape"}}};
          break;
        }
        for (const auto& e : pt.entries) {
          for (const auto& [k, v] : e) {
            if (k < 0 || k >= b.dim(st)) r = {"closure", false, json{{"s", S.label(s)}, {"t", S.label(t)}}};
          }
        }
      }
    }
    for (int s = 0; s < n && r.pass; ++s) {
      if (b.stars[s].rows() != b.dim(S.star(s)) || b.stars[s].cols() != b.dim(s)) {
        r = {"closure", false, json{{"s", S.label(s)}, {"problem", "involution shape"}}};
      }
    }
    record(r);
    if (!r.pass) return rep;
  }

  {  // (ii) associativity on basis triples, evaluated on structure constants
    CheckResult r{"associativity"};
    using Sparse = std::vector<std::pair<int, cd>>;
    auto accumulate = [](const Sparse& first, auto&& second_at) {
      std::map<int, cd> out;
      for (const auto& [m, v] : first) {
        for (const auto& [q, w] : second_at(m)) out[q] += v * w;
      }
      return out;
    };
    auto differ = [](const std::map<int, cd>& l, const std::map<int, cd>& rr) {
      for (const auto& [q, v] : l) {
        auto it = rr.find(q);
        if (std::abs(v - (it == rr.end() ? cd(0.0) : it->second)) > 1e-12) return true;
      }
      for (const auto& [q, v] : rr) {
        if (!l.count(q) && std::abs(v) > 1e-12) return true;
      }
      return false;
    };
    for (int x = 0; x < n && r.pass; ++x) {
      for (int y = 0; y < n && r.pass; ++y) {
        const int xy = S.mul(x, y);
        const ProductTable& pxy = b.products[static_cast<std::size_t>(x) * n + y];
        for (int z = 0; z < n && r.pass; ++z) {
          const int yz = S.mul(y, z);
          const ProductTable& pxy_z = b.products[static_cast<std::size_t>(xy) * n + z];
          const ProductTable& pyz = b.products[static_cast<std::size_t>(y) * n + z];
          const ProductTable& px_yz = b.products[static_cast<std::size_t>(x) * n + yz];
          for (int i = 0; i < b.dim(x) && r.pass; ++i) {
            for (int j = 0; j < b.dim(y) && r.pass; ++j) {
              const Sparse& ij = pxy.at(i, j);
              for (int k = 0; k < b.dim(z); ++k) {
                const Sparse& jk = pyz.at(j, k);
                if (ij.empty() && jk.empty()) continue;
                const auto l = accumulate(ij, [&](int m) -> const Sparse& { return pxy_z.at(m, k); });
                const auto rr = accumulate(jk, [&](int m) -> const Sparse& { return px_yz.at(i, m); });
                if (differ(l, rr)) {
                  const FiberElement a = b.basis(x, i), bb = b.basis(y, j), c = b.basis(z, k);
                  r = {"associativity", false,
                       json{{"a", probes[x][i].ref}, {"b", probes[y][j].ref}, {"c", probes[z][k].ref},
                            {"left", element_to_json(b, b.mul(b.mul(a, bb), c))},
                            {"right", element_to_json(b, b.mul(a, b.mul(bb, c)))}}};
                  break;
                }
              }
            }
          }
        }
      }
    }
    record(r);
  }
  std::vector<std::vector<double>> norms(n);
  for (int s = 0; s < n; ++s) {
    for (const auto& p : probes[s]) norms[s].push_back(b.norm(p.el));
  }

  {  // (iii) submultiplicativity
    CheckResult r{"submultiplicative"};
    for (int s = 0; s < n && r.pass; ++s) {
      for (int t = 0; t < n && r.pass; ++t) {
        for (std::size_t i = 0; i < probes[s].size() && r.pass; ++i) {
          for (std::size_t j = 0; j < probes[t].size(); ++j) {
            const double lhs = b.norm(b.mul(probes[s][i].el, probes[t][j].el));
            const double rhs = norms[s][i] * norms[t][j];
            if (lhs > rhs + tol_for(rhs)) {
              r = {"submultiplicative", false,
                   json{{"a", probes[s][i].ref}, {"b", probes[t][j].ref}, {"norm_ab", lhs}, {"norm_a_norm_b", rhs}}};
              break;
            }
          }
        }
      }
    }
    record(r);
  }

  {  // (iv) involution: (a*)* = a, ||a*|| = ||a||, (ab)* = b*a*
    CheckResult r{"involution"};
    for (int s = 0; s < n && r.pass; ++s) {
      for (std::size_t i = 0; i < probes[s].size(); ++i) {
        const FiberElement& a = probes[s][i].el;
        const FiberElement as = b.star(a);
        if (distance(b.star(as), a) > tol_for(norms[s][i])) {
          r = {"involution", false, json{{"a", probes[s][i].ref}, {"problem", "(a*)* != a"}}};
          break;
        }
        if (std::abs(b.norm(as) - norms[s][i]) > tol_for(norms[s][i])) {
          r = {"involution", false, json{{"a", probes[s][i].ref}, {"problem", "||a*|| != ||a||"}}};
          break;
        }
      }
    }
    for (int s = 0; s < n && r.pass; ++s) {
      for (int t = 0; t < n && r.pass; ++t) {
        for (int i = 0; i < b.dim(s) && r.pass; ++i) {
          for (int j = 0; j < b.dim(t); ++j) {
            const FiberElement a = b.basis(s, i), c = b.basis(t, j);
            const FiberElement l = b.star(b.mul(a, c));
            const FiberElement rr = b.mul(b.star(c), b.star(a));
            if (distance(l, rr) > 1e-12) {
              r = {"involution", false,
                   json{{"a", probes[s][i].ref}, {"b", probes[t][j].ref}, {"problem", "(ab)* != b*a*"}}};
              break;
            }
          }
        }
      }
    }
    record(r);
  }

  {  // (v) C*-identity and positivity
    CheckResult cst{"cstar_identity"};
    CheckResult pos{"positivity"};
    for (int s = 0; s < n; ++s) {
      for (std::size_t i = 0; i < probes[s].size(); ++i) {
        const FiberElement aa = b.mul(b.star(probes[s][i].el), probes[s][i].el);
        const double na = norms[s][i];
        if (cst.pass && std::abs(b.norm(aa) - na * na) > tol_for(na * na)) {
          cst = {"cstar_identity", false, json{{"a", probes[s][i].ref}, {"norm_a_star_a", b.norm(aa)}, {"norm_a_squared", na * na}}};
        }
        if (pos.pass && !is_positive(b, aa, na * na)) {
          pos = {"positivity", false, json{{"a", probes[s][i].ref}, {"a_star_a", element_to_json(b, aa)}}};
        }
      }
    }
    record(cst);
    record(pos);
  }

  std::vector<std::pair<int, int>> below;  // (s, t) with s <= t
  for (int t = 0; t < n; ++t) {
    for (int s = 0; s < n; ++s) {
      if (S.leq(s, t)) below.push_back({s, t});
    }
  }
  auto incl_shape_ok = [&](int t, int s) {
    const auto& m = b.inclusions[static_cast<std::size_t>(t) * n + s];
    return m.rows() == b.dim(t) && m.cols() == b.dim(s);
  };

  {  // (vi) inclusions are isometric
    CheckResult r{"inclusion_isometric"};
    for (auto [s, t] : below) {
      if (!incl_shape_ok(t, s)) {
        r = {"inclusion_isometric", false, json{{"s", S.label(s)}, {"t", S.label(t)}, {"problem", "missing inclusion"}}};
        break;
      }
      for (std::size_t i = 0; i < probes[s].size(); ++i) {
        const double nj = b.norm(b.include(t, probes[s][i].el));
        if (std::abs(nj - norms[s][i]) > tol_for(norms[s][i])) {
          r = {"inclusion_isometric", false,
               json{{"a", probes[s][i].ref}, {"t", S.label(t)}, {"norm_a", norms[s][i]}, {"norm_j_a", nj}}};
          break;
        }
      }
      if (!r.pass) break;
    }
    record(r);
    if (!r.pass && r.witness.contains("problem")) return rep;
  }

  {  // (vii) transitivity of inclusions
    CheckResult r{"inclusion_transitive"};
    for (auto [r0, s] : below) {
      for (int t = 0; t < n && r.pass; ++t) {
        if (!S.leq(s, t)) continue;
        const auto& jtr = b.inclusions[static_cast<std::size_t>(t) * n + r0];
        const auto& jts = b.inclusions[static_cast<std::size_t>(t) * n + s];
        const auto& jsr = b.inclusions[static_cast<std::size_t>(s) * n + r0];
        if (jtr.size() > 0 && (jtr - jts * jsr).cwiseAbs().maxCoeff() > 1e-12) {
          r = {"inclusion_transitive", false, json{{"r", S.label(r0)}, {"s", S.label(s)}, {"t", S.label(t)}}};
        }
      }
      if (!r.pass) break;
    }
    record(r);
  }

  {  // (viii) inclusions are compatible with products
    CheckResult r{"inclusion_multiplicative"};
    for (auto [s, t] : below) {
      for (auto [u, v] : below) {
        if (!r.pass) break;
        const int tv = S.mul(t, v);
        for (int i = 0; i < b.dim(s) && r.pass; ++i) {
          const FiberElement ja = b.include(t, b.basis(s, i));
          for (int j = 0; j < b.dim(u); ++j) {
            const FiberElement lhs = b.mul(ja, b.include(v, b.basis(u, j)));
            const FiberElement rhs = b.include(tv, b.mul(b.basis(s, i), b.basis(u, j)));
            if (distance(lhs, rhs) > 1e-12) {
              r = {"inclusion_multiplicative", false,
                   json{{"a", probes[s][i].ref}, {"t", S.label(t)}, {"b", probes[u][j].ref}, {"v", S.label(v)}}};
              break;
            }
          }
        }
      }
      if (!r.pass) break;
    }
    record(r);
  }

  {  // (ix) inclusions commute with the involution
    CheckResult r{"inclusion_star"};
    for (auto [s, t] : below) {
      for (int i = 0; i < b.dim(s); ++i) {
        const FiberElement a = b.basis(s, i);
        const FiberElement lhs = b.star(b.include(t, a));
        const FiberElement rhs = b.include(S.star(t), b.star(a));
        if (distance(lhs, rhs) > 1e-12) {
          r = {"inclusion_star", false, json{{"a", probes[s][i].ref}, {"t", S.label(t)}}};
          break;
        }
      }
      if (!r.pass) break;
    }
    record(r);
  }
  return rep;
}

bool is_semi_abelian(const FellBundle& b, json* witness) {
  const auto& E = b.sg.idempotents();
  for (int e : E) {
    for (int f : E) {
      for (int i = 0; i < b.dim(e); ++i) {
        for (int j = 0; j < b.dim(f); ++j) {
          const FiberElement x = b.basis(e, i), y = b.basis(f, j);
          if (distance(b.mul(x, y), b.mul(y, x)) > 1e-12) {
            if (witness) {
              *witness = json{{"e", b.sg.label(e)}, {"f", b.sg.label(f)}, {"i", i}, {"j", j}};
            }
            return false;
          }
        }
      }
    }
  }
  return true;
}

bool is_saturated(const FellBundle& b, json* witness) {
  const int n = b.n();
  for (int s = 0; s < n; ++s) {
    for (int t = 0; t < n; ++t) {
      const int st = b.sg.mul(s, t);
      if (b.dim(st) == 0) continue;
      Eigen::MatrixXcd span(b.dim(st), std::max(1, b.dim(s) * b.dim(t)));
      span.setZero();
      for (int i = 0; i < b.dim(s); ++i) {
        for (int j = 0; j < b.dim(t); ++j) span.col(i * b.dim(t) + j) = b.mul(b.basis(s, i), b.basis(t, j)).c;
      }
      Eigen::JacobiSVD<Eigen::MatrixXcd> svd(span);
      int rank = 0;
      for (int k = 0; k < svd.singularValues().size(); ++k) {
        if (svd.singularValues()(k) > kRankTol) ++rank;
      }
      if (rank < b.dim(st)) {
        if (witness) {
          *witness = json{{"s", b.sg.label(s)}, {"t", b.sg.label(t)}, {"rank", rank}, {"dim", b.dim(st)}};
        }
        return false;
      }
    }
  }
  return true;
}

// ------------------------------------------------------------------ canonical action

namespace {

PartialHomeo theta_element_unchecked(const FellBundle& b, const FiberElement& a) {
  const int s = a.s;
  const int e = b.sg.src(s);
  const int f = b.sg.rng(s);
  std::vector<int> table(b.num_points(), -1);
  const FiberElement as = b.star(a);
  const FiberElement aa = b.mul(as, a);
  for (int x : b.unit_support(e)) {
    const double q = b.value_at(aa, x).real();
    if (!(q > b.zero_tol)) continue;
    int found = -1;
    for (int k = 0; k < b.dim(f); ++k) {
      const int y = b.basis_point[f][k];
      const cd v = b.value_at(b.mul(b.mul(as, b.basis(f, k)), a), x);
      if (std::abs(v) <= 1e-12 * std::max(1.0, q)) continue;
      if (found >= 0 || std::abs(v - q) > 1e-10 * std::max(1.0, q)) {
        throw Error("NoSolution", "no unique point y with (a* d a)(x) = (a* a)(x) d(y)",
                    json{{"element", element_to_json(b, a)}, {"x", b.points[x]}});
      }
      found = y;
    }
    if (found < 0) {
      throw Error("NoSolution", "no point y with (a* d a)(x) = (a* a)(x) d(y)",
                  json{{"element", element_to_json(b, a)}, {"x", b.points[x]}});
    }
    table[x] = found;
  }
  return PartialHomeo::from_table(table);
}

void require_semi_abelian(const FellBundle& b) {
  json w;
  if (!is_semi_abelian(b, &w)) throw Error("NotSemiAbelian", "idempotent fibers do not commute", w);
  for (int e : b.sg.idempotents()) {
    if (!b.coordinate_fiber(e)) {
      throw Error("NotSemiAbelian", "idempotent fiber is not given in point coordinates",
                  json{{"e", b.sg.label(e)}});
    }
  }
}

PartialHomeo theta_s_unchecked(const FellBundle& b, int s) {
  std::vector<int> table(b.num_points(), -1);
  std::vector<int> from(b.num_points(), -1);
  for (int i = 0; i < b.dim(s); ++i) {
    const PartialHomeo th = theta_element_unchecked(b, b.basis(s, i));
    for (int x = 0; x < b.num_points(); ++x) {
      auto y = th.apply(x);
      if (!y) continue;
      if (table[x] >= 0 && table[x] != *y) {
        throw Error("GluingConflict", "two basis elements disagree on theta",
                    json{{"s", b.sg.label(s)}, {"a1", from[x]}, {"a2", i}, {"x", b.points[x]}});
      }
      table[x] = *y;
      from[x] = i;
    }
  }
  for (int x : b.unit_support(b.sg.src(s))) {
    if (table[x] < 0) {
      throw Error("NotSaturated", "a point of U_{s*s} lies in no dom(a)",
                  json{{"s", b.sg.label(s)}, {"x", b.points[x]}});
    }
  }
  return PartialHomeo::from_table(table);
}

}  // namespace

PartialHomeo theta_from_element(const FellBundle& b, const FiberElement& a) {
  require_semi_abelian(b);
  return theta_element_unchecked(b, a);
}

PartialHomeo theta_s(const FellBundle& b, int s) {
  require_semi_abelian(b);
  return theta_s_unchecked(b, s);
}

Action canonical_action(const FellBundle& b) {
  require_semi_abelian(b);
  std::vector<PartialHomeo> theta;
  for (int s = 0; s < b.n(); ++s) theta.push_back(theta_s_unchecked(b, s));
  return Action::validate(b.sg, Space::discrete(b.points), theta);
}

bool eqx(const FellBundle& b, const FiberElement& a, const FiberElement& a2, int x) {
  if (a.s != a2.s) {
    throw Error("FiberMismatch", "elements lie in different fibers",
                json{{"s1", b.sg.label(a.s)}, {"s2", b.sg.label(a2.s)}});
  }
  const FiberElement d = a - a2;
  return std::abs(b.square_at(d, x)) <= b.zero_tol;
}

}  // namespace germlab
