#include "germlab/cartanlab.hpp"

#include <algorithm>
#include <random>

#include "germlab/germgpd.hpp"

namespace germlab {

// ------------------------------------------------------------------ the example

IntervalTwistedAction doubled_point_presentation() {
  const std::vector<std::string> labels{"e", "1", "sigma"};
  const std::vector<std::vector<int>> table{{0, 0, 0}, {0, 1, 2}, {0, 2, 1}};
  const InverseSemigroup S = InverseSemigroup::validate(labels, table);
  const Space X = Space::interval({{Rational(-1), Rational(1)}});
  const Piece left{Rational(-1), Rational(0), true, false};
  const Piece whole{Rational(-1), Rational(1), true, true};
  std::vector<PartialHomeo> theta{
      PartialHomeo::from_pieces({AffinePiece{left, 1, 0}}),
      PartialHomeo::from_pieces({AffinePiece{whole, 1, 0}}),
      PartialHomeo::from_pieces({AffinePiece{whole, 1, 0}}),
  };
  IntervalTwistedAction p;
  p.action = Action::validate(S, X, theta);
  p.omega.assign(9, cd(1.0));
  return p;
}

DoubledPointExample build_doubled_point_example(int grid) {
  DoubledPointExample ex;
  ex.presentation = doubled_point_presentation();
  ex.groupoid = GermGroupoid::build(ex.presentation.action);
  ex.sampled = sample_interval(ex.presentation, grid);
  ex.grid_bundle = build_bundle(ex.sampled.presentation);
  ex.grid_bundle.zero_tol = kCoordTol;
  return ex;
}

// ------------------------------------------------------------------ exact scalars

QComplex operator+(const QComplex& a, const QComplex& b) { return {a.re + b.re, a.im + b.im}; }
QComplex operator-(const QComplex& a, const QComplex& b) { return {a.re - b.re, a.im - b.im}; }
QComplex operator*(const QComplex& a, const QComplex& b) {
  return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
}
QComplex conj(const QComplex& a) { return {a.re, -a.im}; }

GridModel GridModel::make(int n) {
  if (n < 3 || n % 2 == 0) throw InputError("grid resolution must be odd and at least 3", json{{"n", n}});
  GridModel gm;
  gm.n = n;
  for (int k = 0; k < n; ++k) gm.lower_x.push_back(Rational(-1) + Rational(2 * k, n - 1));
  gm.upper_x.assign(gm.lower_x.begin() + gm.zero_index(), gm.lower_x.end());
  return gm;
}

// ------------------------------------------------------------------ weights

namespace {

std::string strip(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (!std::isspace(static_cast<unsigned char>(c))) out += c;
  }
  return out;
}

// slope * x + offset from text such as "1-x/2", "3x/4+1/8", "2*x".
std::pair<Rational, Rational> parse_affine(const std::string& text) {
  const std::string s = strip(text);
  if (s.empty()) throw InputError("empty weight expression");
  Rational slope = 0, offset = 0;
  std::size_t i = 0;
  while (i < s.size()) {
    int sign = 1;
    if (s[i] == '+' || s[i] == '-') {
      sign = s[i] == '-' ? -1 : 1;
      ++i;
    }
    std::size_t j = i;
    while (j < s.size() && s[j] != '+' && s[j] != '-') ++j;
    const std::string term = s.substr(i, j - i);
    if (term.empty()) throw InputError("malformed weight expression \"" + text + "\"");
    const auto xpos = term.find('x');
    if (xpos == std::string::npos) {
      offset += sign * parse_rational(term);
    } else {
      std::string before = term.substr(0, xpos);
      if (!before.empty() && before.back() == '*') before.pop_back();
      Rational coef = before.empty() ? Rational(1) : parse_rational(before);
      const std::string after = term.substr(xpos + 1);
      if (!after.empty()) {
        if (after[0] != '/') throw InputError("malformed weight term \"" + term + "\"");
        coef /= parse_rational(after.substr(1));
      }
      slope += sign * coef;
    }
    i = j;
  }
  return {slope, offset};
}

}  // namespace

WeightFunction WeightFunction::parse(const std::string& spec) {
  WeightFunction w;
  w.spec_ = spec;
  const std::string s = strip(spec);
  if (s.empty() || (s[0] != '[' && s[0] != '(')) {
    const auto [a, b] = parse_affine(s);
    w.parts_.push_back({Piece{Rational(0), Rational(1), true, true}, a, b});
    return w;
  }
  std::size_t i = 0;
  while (i < s.size()) {
    std::size_t j = s.find(';', i);
    if (j == std::string::npos) j = s.size();
    const std::string seg = s.substr(i, j - i);
    const auto colon = seg.find(':');
    const auto comma = seg.find(',');
    if (colon == std::string::npos || comma == std::string::npos || comma > colon || colon < 4) {
      throw InputError("malformed weight segment \"" + seg + "\"");
    }
    const char open = seg[0], close = seg[colon - 1];
    if ((open != '[' && open != '(') || (close != ']' && close != ')')) {
      throw InputError("malformed weight segment \"" + seg + "\"");
    }
    Part part;
    part.dom = Piece{parse_rational(seg.substr(1, comma - 1)), parse_rational(seg.substr(comma + 1, colon - comma - 2)),
                     open == '[', close == ']'};
    if (part.dom.empty()) throw InputError("empty weight segment \"" + seg + "\"");
    std::tie(part.slope, part.offset) = parse_affine(seg.substr(colon + 1));
    w.parts_.push_back(part);
    i = j + 1;
  }
  return w;
}

Rational WeightFunction::operator()(const Rational& x) const {
  for (const auto& p : parts_) {
    if (p.dom.contains(x)) return p.slope * x + p.offset;
  }
  throw Error("WeightUndefined", "weight is not defined at this point", json{{"x", format_rational(x)}});
}

// ------------------------------------------------------------------ embeddings

GridFunction<cd> embed_fiber(const DoubledPointExample& ex, const GridModel& gm, const FiberElement& a) {
  const FellBundle& b = ex.grid_bundle;
  if (static_cast<int>(ex.sampled.samples.size()) != gm.n) {
    throw Error("ShapeMismatch", "bundle grid and model grid differ",
                json{{"bundle", ex.sampled.samples.size()}, {"model", gm.n}});
  }
  GridFunction<cd> g{std::vector<cd>(gm.n, 0.0), std::vector<cd>(gm.upper_x.size(), 0.0)};
  const int z = gm.zero_index();
  for (int i = 0; i < a.c.size(); ++i) {
    const int k = b.basis_point[a.s][i];
    g.lower[k] = a.c[i];
    if (a.s == ex.e || k < z) continue;
    g.upper[k - z] = a.s == ex.sigma ? -a.c[i] : a.c[i];
  }
  return g;
}

namespace {

double sup(const GridFunction<cd>& g) {
  double m = 0.0;
  for (const auto& v : g.lower) m = std::max(m, std::abs(v));
  for (const auto& v : g.upper) m = std::max(m, std::abs(v));
  return m;
}

GridFunction<cd> pointwise(const GridFunction<cd>& f, const GridFunction<cd>& g) {
  GridFunction<cd> out = f;
  for (std::size_t k = 0; k < f.lower.size(); ++k) out.lower[k] = f.lower[k] * g.lower[k];
  for (std::size_t k = 0; k < f.upper.size(); ++k) out.upper[k] = f.upper[k] * g.upper[k];
  return out;
}

GridFunction<cd> conjugate(const GridFunction<cd>& f) {
  GridFunction<cd> out = f;
  for (auto& v : out.lower) v = std::conj(v);
  for (auto& v : out.upper) v = std::conj(v);
  return out;
}

double distance(const GridFunction<cd>& f, const GridFunction<cd>& g) {
  double m = 0.0;
  for (std::size_t k = 0; k < f.lower.size(); ++k) m = std::max(m, std::abs(f.lower[k] - g.lower[k]));
  for (std::size_t k = 0; k < f.upper.size(); ++k) m = std::max(m, std::abs(f.upper[k] - g.upper[k]));
  return m;
}

Eigen::VectorXcd flatten(const GridFunction<cd>& g) {
  Eigen::VectorXcd v(g.lower.size() + g.upper.size());
  for (std::size_t k = 0; k < g.lower.size(); ++k) v[static_cast<int>(k)] = g.lower[k];
  for (std::size_t k = 0; k < g.upper.size(); ++k) v[static_cast<int>(g.lower.size() + k)] = g.upper[k];
  return v;
}

int rank_of(const Eigen::MatrixXcd& m) {
  if (m.size() == 0) return 0;
  Eigen::BDCSVD<Eigen::MatrixXcd> svd(m);
  int r = 0;
  for (int k = 0; k < svd.singularValues().size(); ++k) {
    if (svd.singularValues()(k) > kRankTol) ++r;
  }
  return r;
}

template <class T>
GridFunction<T> unit_grid_function(const GridModel& gm, bool upper, int k) {
  GridFunction<T> g{std::vector<T>(gm.n, T{}), std::vector<T>(gm.upper_x.size(), T{})};
  (upper ? g.upper : g.lower)[k] = scalar_from(Rational(1), static_cast<T*>(nullptr));
  return g;
}

json sample_ref(const GridModel& gm, bool upper, int k) {
  return json{{"level", upper ? "upper" : "lower"}, {"x", format_rational(upper ? gm.upper_x[k] : gm.lower_x[k])}};
}

}  // namespace

AxiomReport verify_embeddings(const DoubledPointExample& ex, const GridModel& gm, std::uint64_t seed) {
  const FellBundle& b = ex.grid_bundle;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> N(0.0, 1.0);
  auto random_element = [&](int s) {
    FiberElement a = b.zero(s);
    for (int i = 0; i < a.c.size(); ++i) a.c[i] = cd(N(rng), N(rng));
    return a;
  };
  std::vector<std::pair<FiberElement, json>> probes;
  for (int s = 0; s < b.n(); ++s) {
    for (int i = 0; i < b.dim(s); ++i) probes.push_back({b.basis(s, i), json{{"fiber", b.sg.label(s)}, {"basis", i}}});
    for (int k = 0; k < 5; ++k) probes.push_back({random_element(s), json{{"fiber", b.sg.label(s)}, {"random", k}}});
  }
  AxiomReport rep;
  auto record = [&](CheckResult r) {
    rep.pass = rep.pass && r.pass;
    rep.checks.push_back(std::move(r));
  };
  {
    CheckResult r{"star_compatible"};
    for (const auto& [a, ref] : probes) {
      if (distance(embed_fiber(ex, gm, b.star(a)), conjugate(embed_fiber(ex, gm, a))) > 1e-12) {
        r = {"star_compatible", false, ref};
        break;
      }
    }
    record(r);
  }
  {
    CheckResult r{"isometric"};
    for (const auto& [a, ref] : probes) {
      const double lhs = sup(embed_fiber(ex, gm, a)), rhs = b.norm(a);
      if (std::abs(lhs - rhs) > 1e-12 * std::max(1.0, rhs)) {
        r = {"isometric", false, ref};
        break;
      }
    }
    record(r);
  }
  {
    CheckResult r{"multiplicative"};
    for (std::size_t i = 0; i < probes.size() && r.pass; ++i) {
      const auto fi = embed_fiber(ex, gm, probes[i].first);
      for (std::size_t j = 0; j < probes.size(); ++j) {
        const FiberElement p = b.mul(probes[i].first, probes[j].first);
        const auto lhs = embed_fiber(ex, gm, p);
        const auto rhs = pointwise(fi, embed_fiber(ex, gm, probes[j].first));
        if (distance(lhs, rhs) > 1e-12 * std::max(1.0, sup(rhs))) {
          r = {"multiplicative", false, json{{"a", probes[i].second}, {"b", probes[j].second}}};
          break;
        }
      }
    }
    record(r);
  }
  {
    CheckResult r{"inclusion_compatible"};
    for (int t : {ex.one, ex.sigma}) {
      for (int i = 0; i < b.dim(ex.e) && r.pass; ++i) {
        const FiberElement a = b.basis(ex.e, i);
        if (distance(embed_fiber(ex, gm, b.include(t, a)), embed_fiber(ex, gm, a)) > 1e-12) {
          r = {"inclusion_compatible", false, json{{"t", b.sg.label(t)}, {"basis", i}}};
        }
      }
    }
    record(r);
  }
  {
    CheckResult r{"spans_grid_algebra"};
    const int total = gm.n + static_cast<int>(gm.upper_x.size());
    int cols = 0;
    for (int s = 0; s < b.n(); ++s) cols += b.dim(s);
    Eigen::MatrixXcd m(total, cols);
    int c = 0;
    for (int s = 0; s < b.n(); ++s) {
      for (int i = 0; i < b.dim(s); ++i) m.col(c++) = flatten(embed_fiber(ex, gm, b.basis(s, i)));
    }
    const int rank = rank_of(m);
    if (rank != total) r = {"spans_grid_algebra", false, json{{"rank", rank}, {"dim", total}}};
    else r.witness = json{{"rank", rank}};
    record(r);
  }
  {
    // E fixes the embedded copy of A_1 for every admissible weight; 1-x/2 is
    // used as a representative.
    CheckResult r{"expectation_fixes_A1"};
    const WeightFunction p = WeightFunction::parse("1-x/2");
    for (int i = 0; i < b.dim(ex.one); ++i) {
      const auto g = embed_fiber(ex, gm, b.basis(ex.one, i));
      if (distance(expectation_E(gm, g, p), g) > 1e-12) {
        r = {"expectation_fixes_A1", false, json{{"basis", i}}};
        break;
      }
    }
    record(r);
  }
  return rep;
}

AxiomReport verify_conditional_expectation(const GridModel& gm, const WeightFunction& p, std::uint64_t seed,
                                           int random_elements) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> N(0.0, 1.0);
  std::uniform_int_distribution<int> num(-20, 20), den(1, 9);
  const int n = gm.n;
  const int m = static_cast<int>(gm.upper_x.size());
  const int z = gm.zero_index();
  AxiomReport rep;
  auto record = [&](CheckResult r) {
    rep.pass = rep.pass && r.pass;
    rep.checks.push_back(std::move(r));
  };

  // Test functions: every grid delta, then seeded random functions.
  std::vector<std::pair<GridFunction<cd>, json>> tests;
  for (int k = 0; k < n; ++k) tests.push_back({unit_grid_function<cd>(gm, false, k), sample_ref(gm, false, k)});
  for (int k = 0; k < m; ++k) tests.push_back({unit_grid_function<cd>(gm, true, k), sample_ref(gm, true, k)});
  for (int t = 0; t < random_elements; ++t) {
    GridFunction<cd> g{std::vector<cd>(n), std::vector<cd>(m)};
    for (auto& v : g.lower) v = cd(N(rng), N(rng));
    for (auto& v : g.upper) v = cd(N(rng), N(rng));
    tests.push_back({g, json{{"random", t}, {"seed", seed}}});
  }

  {
    CheckResult r{"idempotent_exact"};
    std::vector<std::pair<GridFunction<QComplex>, json>> exact;
    for (int k = 0; k < n; ++k) exact.push_back({unit_grid_function<QComplex>(gm, false, k), sample_ref(gm, false, k)});
    for (int k = 0; k < m; ++k) exact.push_back({unit_grid_function<QComplex>(gm, true, k), sample_ref(gm, true, k)});
    for (int t = 0; t < random_elements; ++t) {
      GridFunction<QComplex> g{std::vector<QComplex>(n), std::vector<QComplex>(m)};
      for (auto& v : g.lower) v = QComplex(Rational(num(rng), den(rng)), Rational(num(rng), den(rng)));
      for (auto& v : g.upper) v = QComplex(Rational(num(rng), den(rng)), Rational(num(rng), den(rng)));
      exact.push_back({g, json{{"random", t}, {"seed", seed}}});
    }
    for (const auto& [g, ref] : exact) {
      const auto e1 = expectation_E(gm, g, p);
      const auto e2 = expectation_E(gm, e1, p);
      if (!(e1.lower == e2.lower && e1.upper == e2.upper)) {
        r = {"idempotent_exact", false, ref};
        break;
      }
    }
    record(r);
  }
  {
    CheckResult r{"contractive"};
    for (const auto& [g, ref] : tests) {
      const double lhs = sup(expectation_E(gm, g, p)), rhs = sup(g);
      if (lhs > rhs * (1 + 1e-12)) {
        r = {"contractive", false, json{{"g", ref}, {"norm_E", lhs}, {"norm", rhs}}};
        break;
      }
    }
    record(r);
  }
  {
    CheckResult r{"positive"};
    for (const auto& [g, ref] : tests) {
      const auto e = expectation_E(gm, pointwise(conjugate(g), g), p);
      bool ok = true;
      for (const auto& v : e.lower) ok = ok && v.real() >= -1e-12 && std::abs(v.imag()) <= 1e-12;
      for (const auto& v : e.upper) ok = ok && v.real() >= -1e-12 && std::abs(v.imag()) <= 1e-12;
      if (!ok) {
        r = {"positive", false, ref};
        break;
      }
    }
    record(r);
  }
  {
    CheckResult r{"bimodular"};
    for (const auto& [g, ref] : tests) {
      GridFunction<cd> f{std::vector<cd>(n), std::vector<cd>(m)}, h = f;
      for (int k = 0; k < n; ++k) {
        f.lower[k] = cd(N(rng), N(rng));
        h.lower[k] = cd(N(rng), N(rng));
      }
      for (int k = 0; k < m; ++k) {
        f.upper[k] = f.lower[z + k];
        h.upper[k] = h.lower[z + k];
      }
      const auto lhs = expectation_E(gm, pointwise(pointwise(f, g), h), p);
      const auto rhs = pointwise(pointwise(f, expectation_E(gm, g, p)), h);
      const double err = distance(lhs, rhs);
      if (err > 1e-12 * std::max(1.0, sup(rhs))) {
        r = {"bimodular", false, json{{"g", ref}, {"error", err}}};
        break;
      }
    }
    record(r);
  }
  {
    // g is read as piecewise linear on each level, so E(g* g) is examined at
    // the samples and at the midpoints between them.
    CheckResult r{"faithful"};
    for (const auto& [g, ref] : tests) {
      double best = 0.0;
      const auto e = expectation_E(gm, pointwise(conjugate(g), g), p);
      for (const auto& v : e.lower) best = std::max(best, std::abs(v));
      for (int k = 0; k + 1 < n; ++k) {
        const Rational mid = (gm.lower_x[k] + gm.lower_x[k + 1]) / 2;
        const cd lo = (g.lower[k] + g.lower[k + 1]) / 2.0;
        double val = std::norm(lo);
        if (mid >= 0) {
          const int u = k - z;
          const cd up = (g.upper[u] + g.upper[u + 1]) / 2.0;
          const double w = to_double(p(mid));
          val = w * std::norm(lo) + (1 - w) * std::norm(up);
        }
        best = std::max(best, std::abs(val));
      }
      if (best <= 1e-12 && sup(g) > 1e-12) {
        r = {"faithful", false, ref};
        break;
      }
    }
    record(r);
  }
  return rep;
}

json cartan_example_report(int n, const std::string& weight, std::uint64_t seed) {
  const GridModel gm = GridModel::make(n);
  const WeightFunction p = WeightFunction::parse(weight);
  const DoubledPointExample ex = build_doubled_point_example(n);
  const GermGroupoid& g = ex.groupoid;

  json cells = json::array();
  for (int c = 0; c < g.num_cells(); ++c) {
    json germs = json::array();
    for (int k : g.source_fiber(c)) germs.push_back(g.semigroup().label(g.germ(k).s));
    cells.push_back({{"cell", g.cell_to_json(c)}, {"germs", germs}});
  }

  CheckResult square{"sigma_squared"};
  for (int c = 0; c < g.num_cells(); ++c) {
    const int sg = g.germ_of(ex.sigma, c);
    if (sg < 0 || g.germ(sg).s != ex.sigma) continue;
    if (g.compose(sg, sg) != g.germ_of(ex.one, c)) {
      square = {"sigma_squared", false, json{{"cell", g.cell_to_json(c)}}};
      break;
    }
  }

  json weight_info;
  {
    bool p0 = p(Rational(0)) == 1;
    bool bounded = true, interior = true;
    for (const auto& x : gm.upper_x) {
      const Rational v = p(x);
      bounded = bounded && v >= 0 && v <= 1;
      if (x > 0 && x < 1) interior = interior && v > 0 && v < 1;
    }
    weight_info = json{{"spec", weight}, {"p0_is_1", p0}, {"bounded", bounded}, {"interior_strict", interior}};
  }

  const AxiomReport emb = verify_embeddings(ex, gm, seed);
  const AxiomReport exp = verify_conditional_expectation(gm, p, seed);
  const HausdorffReport h = is_hausdorff(g);

  // Norm candidates for a few seeded elements: the grid sup-norm of the
  // image in C(X') and the sum of fiber norms, which bounds any C*-norm.
  json norms = json::array();
  {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> N(0.0, 1.0);
    const FellBundle& b = ex.grid_bundle;
    for (int t = 0; t < 3; ++t) {
      GridFunction<cd> sum{std::vector<cd>(gm.n, 0.0), std::vector<cd>(gm.upper_x.size(), 0.0)};
      double bound = 0.0;
      for (int s = 0; s < b.n(); ++s) {
        FiberElement a = b.zero(s);
        for (int i = 0; i < a.c.size(); ++i) a.c[i] = cd(N(rng), N(rng));
        bound += b.norm(a);
        const auto ga = embed_fiber(ex, gm, a);
        for (std::size_t k = 0; k < sum.lower.size(); ++k) sum.lower[k] += ga.lower[k];
        for (std::size_t k = 0; k < sum.upper.size(); ++k) sum.upper[k] += ga.upper[k];
      }
      norms.push_back({{"trial", t}, {"grid_sup_norm", sup(sum)}, {"fiber_norm_sum", bound}});
    }
  }

  auto checks_json = [](const AxiomReport& r) { return r.to_json(); };
  const bool pass = emb.pass && exp.pass && square.pass;
  return json{{"report_version", 1},
              {"n", n},
              {"weight", weight_info},
              {"germ_cells", cells},
              {"sigma_squared", json{{"pass", square.pass}, {"witness", square.witness}}},
              {"hausdorff", h.to_json(g)},
              {"hausdorff_informational", true},
              {"embeddings", checks_json(emb)},
              {"expectation", checks_json(exp)},
              {"norm_candidates", json{{"asserted_equal", false}, {"samples", norms}}},
              {"pass", pass}};
}

}  // namespace germlab
