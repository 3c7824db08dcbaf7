#include "germlab/convalg.hpp"

#include <algorithm>
#include <random>

#include "germlab/germgpd.hpp"

namespace germlab {

namespace {

int rank_of(const Eigen::MatrixXcd& m, double tol = kRankTol) {
  if (m.size() == 0) return 0;
  Eigen::BDCSVD<Eigen::MatrixXcd> svd(m);
  int r = 0;
  for (int k = 0; k < svd.singularValues().size(); ++k) {
    if (svd.singularValues()(k) > tol) ++r;
  }
  return r;
}

double largest_singular_value(const Eigen::MatrixXcd& m) {
  if (m.size() == 0) return 0.0;
  Eigen::BDCSVD<Eigen::MatrixXcd> svd(m);
  return svd.singularValues()(0);
}

// Orthonormal basis of the null space of m.
Eigen::MatrixXcd null_space(const Eigen::MatrixXcd& m, double tol = kRankTol) {
  const int cols = static_cast<int>(m.cols());
  if (m.rows() == 0) return Eigen::MatrixXcd::Identity(cols, cols);
  Eigen::BDCSVD<Eigen::MatrixXcd> svd(m, Eigen::ComputeFullV);
  int r = 0;
  for (int k = 0; k < svd.singularValues().size(); ++k) {
    if (svd.singularValues()(k) > tol) ++r;
  }
  return svd.matrixV().rightCols(cols - r);
}

Eigen::VectorXcd random_vector(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> N(0.0, 1.0);
  Eigen::VectorXcd v(n);
  for (int i = 0; i < n; ++i) v[i] = cd(N(rng), N(rng));
  return v;
}

}  // namespace

// ------------------------------------------------------------------ C_c(A)

AlgebraBasis::AlgebraBasis(const FellBundle& b) {
  offset.resize(b.n());
  for (int s = 0; s < b.n(); ++s) {
    offset[s] = size();
    for (int i = 0; i < b.dim(s); ++i) items.push_back({s, i});
  }
}

FiberElement AlgebraBasis::element(const FellBundle& b, const Eigen::VectorXcd& v, int s) const {
  return FiberElement{s, v.segment(offset[s], b.dim(s))};
}

Eigen::VectorXcd AlgebraBasis::embed(const FiberElement& a) const {
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(size());
  v.segment(offset[a.s], a.c.size()) = a.c;
  return v;
}

Eigen::VectorXcd algebra_mul(const FellBundle& b, const AlgebraBasis& basis, const Eigen::VectorXcd& x,
                             const Eigen::VectorXcd& y) {
  Eigen::VectorXcd out = Eigen::VectorXcd::Zero(basis.size());
  for (int s = 0; s < b.n(); ++s) {
    const FiberElement xs = basis.element(b, x, s);
    if (xs.c.size() == 0 || xs.c.isZero(0.0)) continue;
    for (int t = 0; t < b.n(); ++t) {
      const FiberElement yt = basis.element(b, y, t);
      if (yt.c.size() == 0 || yt.c.isZero(0.0)) continue;
      const FiberElement p = b.mul(xs, yt);
      out.segment(basis.offset[p.s], p.c.size()) += p.c;
    }
  }
  return out;
}

Eigen::VectorXcd algebra_star(const FellBundle& b, const AlgebraBasis& basis, const Eigen::VectorXcd& x) {
  Eigen::VectorXcd out = Eigen::VectorXcd::Zero(basis.size());
  for (int s = 0; s < b.n(); ++s) {
    const FiberElement p = b.star(basis.element(b, x, s));
    out.segment(basis.offset[p.s], p.c.size()) += p.c;
  }
  return out;
}

Eigen::MatrixXcd psi_matrix(const FellBundle& b, const LineBundle& l, const AlgebraBasis& basis) {
  Eigen::MatrixXcd m(l.size(), basis.size());
  for (int k = 0; k < basis.size(); ++k) {
    const auto [s, i] = basis.items[k];
    m.col(k) = gelfand(b, l, b.basis(s, i));
  }
  return m;
}

Section psi_map(const FellBundle& b, const LineBundle& l, const AlgebraBasis& basis, const Eigen::VectorXcd& x) {
  Section out = zero_section(l);
  for (int s = 0; s < b.n(); ++s) {
    const FiberElement a = basis.element(b, x, s);
    if (a.c.size() > 0 && !a.c.isZero(0.0)) out += gelfand(b, l, a);
  }
  return out;
}

json KernelReport::to_json() const {
  return json{{"algebra_dim", algebra_dim},         {"psi_rank", psi_rank},
              {"kernel_dim", kernel_dim},           {"ideal_dim", ideal_dim},
              {"ideal_in_kernel", ideal_in_kernel}, {"kernel_in_ideal", kernel_in_ideal},
              {"equal", equal}};
}

KernelReport kernel_equals_ideal(const FellBundle& b, const LineBundle& l) {
  const AlgebraBasis basis(b);
  const int N = basis.size();
  KernelReport rep;
  rep.algebra_dim = N;
  const Eigen::MatrixXcd P = psi_matrix(b, l, basis);
  rep.psi_rank = rank_of(P);
  rep.kernel_dim = N - rep.psi_rank;

  std::vector<Eigen::VectorXcd> gens;
  for (int t = 0; t < b.n(); ++t) {
    for (int s = 0; s < b.n(); ++s) {
      if (s == t || !b.sg.leq(s, t)) continue;
      for (int i = 0; i < b.dim(s); ++i) {
        const FiberElement a = b.basis(s, i);
        gens.push_back(basis.embed(a) - basis.embed(b.include(t, a)));
      }
    }
  }
  Eigen::MatrixXcd I(N, static_cast<int>(gens.size()));
  for (std::size_t k = 0; k < gens.size(); ++k) I.col(static_cast<int>(k)) = gens[k];
  rep.ideal_dim = rank_of(I);
  if (I.cols() > 0) rep.ideal_in_kernel = (P * I).cwiseAbs().maxCoeff() <= kRankTol * std::max(1.0, I.cwiseAbs().maxCoeff());
  const Eigen::MatrixXcd K = null_space(P);
  if (K.cols() > 0) {
    Eigen::MatrixXcd both(N, I.cols() + K.cols());
    both << I, K;
    rep.kernel_in_ideal = rank_of(both) == rep.ideal_dim;
  }
  rep.equal = rep.ideal_in_kernel && rep.kernel_in_ideal && rep.ideal_dim == rep.kernel_dim;
  return rep;
}

// ------------------------------------------------------------------ representations

int Representation::position(int germ) const {
  auto it = std::find(basis.begin(), basis.end(), germ);
  return it == basis.end() ? -1 : static_cast<int>(it - basis.begin());
}

Representation regular_rep(const LineBundle& l, int cell) {
  Representation r;
  r.cell = cell;
  r.basis = l.groupoid.source_fiber(cell);
  return r;
}

Eigen::MatrixXcd rep_matrix(const LineBundle& l, const Representation& rep, const Section& xi) {
  const int d = static_cast<int>(rep.basis.size());
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(d, d);
  std::vector<int> pos(l.size(), -1);
  for (int k = 0; k < d; ++k) pos[rep.basis[k]] = k;
  for (const auto& [g, h, gh] : l.composable) {
    if (pos[h] < 0 || xi[g] == 0.0) continue;
    m(pos[gh], pos[h]) += xi[g] * l.mul_const(g, h);
  }
  return m;
}

cd state_phi_x(const LineBundle& l, int cell, const Section& xi) {
  const Representation rep = regular_rep(l, cell);
  const int u = rep.position(l.groupoid.unit_at(cell));
  if (u < 0) return 0.0;
  return rep_matrix(l, rep, xi)(u, u);
}

double reduced_norm(const LineBundle& l, const Section& xi, json* per_unit) {
  double best = 0.0;
  if (per_unit) *per_unit = json::object();
  for (int c = 0; c < l.groupoid.num_cells(); ++c) {
    if (l.groupoid.unit_at(c) < 0) continue;
    const double v = largest_singular_value(rep_matrix(l, regular_rep(l, c), xi));
    best = std::max(best, v);
    if (per_unit) (*per_unit)[l.groupoid.cell_to_json(c).get<std::string>()] = v;
  }
  return best;
}

cd state_phitilde(const FellBundle& b, int x0, const FiberElement& a) {
  const InverseSemigroup& S = b.sg;
  for (int e : S.idempotents()) {
    if (!S.leq(e, a.s)) continue;
    const int idx = b.basis_index_at(e, x0);
    if (idx < 0) continue;
    const FiberElement ad = b.mul(a, b.basis(e, idx));
    return b.value_at(ad, x0);
  }
  return 0.0;
}

cd state_phitilde(const FellBundle& b, const AlgebraBasis& basis, int x0, const Eigen::VectorXcd& x) {
  cd total = 0.0;
  for (int s = 0; s < b.n(); ++s) {
    const FiberElement a = basis.element(b, x, s);
    if (a.c.size() > 0) total += state_phitilde(b, x0, a);
  }
  return total;
}

json ReducedIsoReport::to_json() const {
  json cs = json::array();
  for (const auto& c : checks) cs.push_back({{"name", c.name}, {"pass", c.pass}, {"witness", c.witness}});
  return json{{"pass", pass}, {"checks", cs}, {"algebra_dim", algebra_dim}, {"center_dim", center_dim}};
}

std::pair<int, int> reduced_algebra_dimensions(const LineBundle& l) {
  const GermGroupoid& g = l.groupoid;
  std::vector<Representation> reps;
  int total = 0;
  for (int c = 0; c < g.num_cells(); ++c) {
    if (g.unit_at(c) < 0) continue;
    reps.push_back(regular_rep(l, c));
    total += static_cast<int>(reps.back().basis.size() * reps.back().basis.size());
  }
  const int G = g.size();
  // mats[γ] = direct sum of π_x(δ_γ).
  std::vector<std::vector<Eigen::MatrixXcd>> mats(G);
  Eigen::MatrixXcd flat(total, G);
  for (int k = 0; k < G; ++k) {
    Section d = zero_section(l);
    d[k] = 1.0;
    int row = 0;
    for (const auto& r : reps) {
      mats[k].push_back(rep_matrix(l, r, d));
      const auto& m = mats[k].back();
      for (int i = 0; i < m.rows(); ++i) {
        for (int j = 0; j < m.cols(); ++j) flat(row++, k) = m(i, j);
      }
    }
  }
  const int dim = rank_of(flat);
  // Σ c_γ π(δ_γ) is central iff it commutes with every π(δ_η).
  Eigen::MatrixXcd sys(static_cast<Eigen::Index>(total) * G, G);
  sys.setZero();
  for (int eta = 0; eta < G; ++eta) {
    for (int k = 0; k < G; ++k) {
      int row = eta * total;
      for (std::size_t r = 0; r < reps.size(); ++r) {
        const Eigen::MatrixXcd comm = mats[k][r] * mats[eta][r] - mats[eta][r] * mats[k][r];
        for (int i = 0; i < comm.rows(); ++i) {
          for (int j = 0; j < comm.cols(); ++j) sys(row++, k) = comm(i, j);
        }
      }
    }
  }
  const int nullity_sys = G - rank_of(sys);
  const int nullity_map = G - dim;
  return {dim, nullity_sys - nullity_map};
}

ReducedIsoReport verify_reduced_iso(const FellBundle& b, const LineBundle& l, std::uint64_t seed, int random_elements) {
  ReducedIsoReport rep;
  const GermGroupoid& g = l.groupoid;
  const AlgebraBasis basis(b);
  const int N = basis.size();
  const Eigen::MatrixXcd P = psi_matrix(b, l, basis);
  std::mt19937_64 rng(seed);

  // Left multiplication by each basis vector, as sparse (row, column, value)
  // entries.
  struct Entry {
    int row, col;
    cd value;
  };
  std::vector<std::vector<Entry>> left(N);
  for (int c = 0; c < N; ++c) {
    const auto [s, i] = basis.items[c];
    const FiberElement bc = b.basis(s, i);
    for (int k = 0; k < N; ++k) {
      const auto [t, j] = basis.items[k];
      const FiberElement p = b.mul(bc, b.basis(t, j));
      for (int m = 0; m < p.c.size(); ++m) {
        if (p.c[m] != 0.0) left[c].push_back({basis.offset[p.s] + m, k, p.c[m]});
      }
    }
  }

  CheckResult gram{"gram_matrix"}, coeffs{"matrix_coefficients"}, cyclic{"cyclic"}, norms{"reduced_norms"};
  struct UnitData {
    int cell;
    Representation rep;
    Eigen::MatrixXcd R, Rplus;
  };
  std::vector<UnitData> units;

  for (int x0 = 0; x0 < b.num_points(); ++x0) {
    const int cell = g.cell_of_point(x0);
    if (cell < 0 || g.unit_at(cell) < 0) continue;
    const Representation r = regular_rep(l, cell);
    const int d = static_cast<int>(r.basis.size());
    const int u = r.position(g.unit_at(cell));

    Eigen::MatrixXcd Gm(N, N);
    for (int j = 0; j < N; ++j) {
      const auto [s, i] = basis.items[j];
      const FiberElement bj_star = b.star(b.basis(s, i));
      for (int k = 0; k < N; ++k) {
        const auto [t, m] = basis.items[k];
        Gm(j, k) = state_phitilde(b, x0, b.mul(bj_star, b.basis(t, m)));
      }
    }
    std::vector<Eigen::MatrixXcd> pi(N);
    Eigen::MatrixXcd W(d, N);
    for (int k = 0; k < N; ++k) {
      pi[k] = rep_matrix(l, r, P.col(k));
      W.col(k) = pi[k].col(u);
    }
    const double scale = std::max(1.0, Gm.cwiseAbs().maxCoeff());
    const double gram_err = (W.adjoint() * W - Gm).cwiseAbs().maxCoeff();
    if (gram.pass && gram_err > 1e-10 * scale) {
      gram = {"gram_matrix", false, json{{"unit", b.points[x0]}, {"error", gram_err}}};
    }
    const int wrank = rank_of(W);
    if (cyclic.pass && wrank != d) {
      cyclic = {"cyclic", false, json{{"unit", b.points[x0]}, {"rank", wrank}, {"dim", d}}};
    }
    for (int c = 0; c < N && coeffs.pass; ++c) {
      const Eigen::MatrixXcd lhs = W.adjoint() * (pi[c] * W);
      Eigen::MatrixXcd rhs = Eigen::MatrixXcd::Zero(N, N);
      for (const auto& e : left[c]) rhs.col(e.col) += Gm.col(e.row) * e.value;
      const double err = (lhs - rhs).cwiseAbs().maxCoeff();
      if (err > 1e-10 * scale) {
        const auto [s, i] = basis.items[c];
        coeffs = {"matrix_coefficients", false,
                  json{{"unit", b.points[x0]}, {"element", json{{"s", b.sg.label(s)}, {"i", i}}}, {"error", err}}};
      }
    }
    // GNS coordinates: the quotient by the null space of the Gram form.
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(Gm);
    std::vector<int> keep;
    const double lmax = es.eigenvalues().size() ? std::max(0.0, es.eigenvalues().maxCoeff()) : 0.0;
    for (int k = 0; k < es.eigenvalues().size(); ++k) {
      if (es.eigenvalues()(k) > kRankTol * std::max(1.0, lmax)) keep.push_back(k);
    }
    Eigen::MatrixXcd V(N, static_cast<int>(keep.size()));
    Eigen::VectorXd lam(static_cast<int>(keep.size()));
    for (std::size_t k = 0; k < keep.size(); ++k) {
      V.col(static_cast<int>(k)) = es.eigenvectors().col(keep[k]);
      lam[static_cast<int>(k)] = es.eigenvalues()(keep[k]);
    }
    UnitData ud{cell, r, lam.cwiseSqrt().asDiagonal() * V.adjoint(), V * lam.cwiseSqrt().cwiseInverse().asDiagonal()};
    if (static_cast<int>(keep.size()) != d && cyclic.pass) {
      cyclic = {"cyclic", false, json{{"unit", b.points[x0]}, {"gns_dim", keep.size()}, {"dim", d}}};
    }
    units.push_back(std::move(ud));
  }

  for (int trial = 0; trial < random_elements && N > 0; ++trial) {
    const Eigen::VectorXcd a = random_vector(N, rng);
    Eigen::MatrixXcd La = Eigen::MatrixXcd::Zero(N, N);
    for (int c = 0; c < N; ++c) {
      for (const auto& e : left[c]) La(e.row, e.col) += a[c] * e.value;
    }
    const Section psi_a = P * a;
    double gns = 0.0;
    for (const auto& ud : units) gns = std::max(gns, largest_singular_value(ud.R * La * ud.Rplus));
    const double red = reduced_norm(l, psi_a);
    if (std::abs(gns - red) > 1e-9 * std::max(1.0, red)) {
      norms = {"reduced_norms", false, json{{"trial", trial}, {"seed", seed}, {"gns_norm", gns}, {"psi_norm", red}}};
      break;
    }
  }

  for (auto* c : {&gram, &coeffs, &cyclic, &norms}) {
    rep.pass = rep.pass && c->pass;
    rep.checks.push_back(*c);
  }
  std::tie(rep.algebra_dim, rep.center_dim) = reduced_algebra_dimensions(l);
  return rep;
}

// ------------------------------------------------------------------ expectation

Section expectation_onto_units(const LineBundle& l, const Section& xi) {
  const HausdorffReport h = is_hausdorff(l.groupoid);
  if (!h.hausdorff) throw Error("NotHausdorff", "restriction to units needs a Hausdorff groupoid", h.to_json(l.groupoid));
  Section out = zero_section(l);
  for (int k = 0; k < l.size(); ++k) {
    if (l.groupoid.is_unit(k)) out[k] = xi[k];
  }
  return out;
}

AxiomReport verify_expectation(const LineBundle& l, std::uint64_t seed, int random_elements) {
  std::mt19937_64 rng(seed);
  const GermGroupoid& g = l.groupoid;
  const int G = l.size();
  AxiomReport rep;
  auto unit_random = [&]() {
    Section f = random_vector(G, rng);
    for (int k = 0; k < G; ++k) {
      if (!g.is_unit(k)) f[k] = 0.0;
    }
    return f;
  };
  std::vector<Section> samples;
  for (int k = 0; k < G; ++k) {
    Section d = zero_section(l);
    d[k] = 1.0;
    samples.push_back(d);
  }
  for (int k = 0; k < random_elements; ++k) samples.push_back(random_vector(G, rng));

  CheckResult idem{"idempotent"}, contr{"contractive"}, pos{"positive"}, faith{"faithful"}, bimod{"bimodular"};
  for (std::size_t k = 0; k < samples.size(); ++k) {
    const Section& xi = samples[k];
    const Section e = expectation_onto_units(l, xi);
    if (idem.pass && expectation_onto_units(l, e) != e) idem = {"idempotent", false, json{{"sample", k}}};
    const double ne = reduced_norm(l, e), nx = reduced_norm(l, xi);
    if (contr.pass && ne > nx + 1e-12 * std::max(1.0, nx)) {
      contr = {"contractive", false, json{{"sample", k}, {"norm_E", ne}, {"norm", nx}}};
    }
    const Section q = expectation_onto_units(l, convolve(l, involution(l, xi), xi));
    for (int u = 0; u < G && pos.pass; ++u) {
      if (g.is_unit(u) && (q[u].real() < -1e-12 || std::abs(q[u].imag()) > 1e-12)) {
        pos = {"positive", false, json{{"sample", k}, {"germ", g.germ_to_json(u)}}};
      }
    }
    const double qmax = q.size() ? q.cwiseAbs().maxCoeff() : 0.0;
    const double xmax = xi.size() ? xi.cwiseAbs().maxCoeff() : 0.0;
    if (faith.pass && qmax <= 1e-12 && xmax > 1e-12) faith = {"faithful", false, json{{"sample", k}}};
    const Section f = unit_random(), h = unit_random();
    const Section lhs = expectation_onto_units(l, convolve(l, convolve(l, f, xi), h));
    const Section rhs = convolve(l, convolve(l, f, e), h);
    const double err = G ? (lhs - rhs).cwiseAbs().maxCoeff() : 0.0;
    if (bimod.pass && err > 1e-12 * std::max(1.0, rhs.size() ? rhs.cwiseAbs().maxCoeff() : 0.0)) {
      bimod = {"bimodular", false, json{{"sample", k}, {"error", err}}};
    }
  }
  for (auto* c : {&idem, &contr, &pos, &faith, &bimod}) {
    rep.pass = rep.pass && c->pass;
    rep.checks.push_back(*c);
  }
  return rep;
}

}  // namespace germlab
