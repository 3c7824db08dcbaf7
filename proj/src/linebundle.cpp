#include "germlab/linebundle.hpp"

#include <algorithm>
#include <random>
#include <set>

namespace germlab {

namespace {

int point_of_cell(const GermGroupoid& g, int c) {
  const int x = g.cell(c).point;
  if (x < 0) throw Error("NotDiscrete", "line bundles are built on discrete-model groupoids");
  return x;
}

// λ with [a, t, x] = λ [r, u, x], transporting through an idempotent fiber
// when the two elements sit over different representatives.
cd relative_coefficient(const FellBundle& b, const FiberElement& r, const FiberElement& a, int x) {
  if (r.s == a.s) {
    const FiberElement rs = b.star(r);
    return b.value_at(b.mul(rs, a), x) / b.value_at(b.mul(rs, r), x);
  }
  const InverseSemigroup& S = b.sg;
  for (int e : S.idempotents()) {
    const int idx = b.basis_index_at(e, x);
    if (idx < 0 || S.mul(r.s, e) != S.mul(a.s, e)) continue;
    const FiberElement c = b.basis(e, idx);
    const FiberElement rc = b.mul(r, c);
    const FiberElement ac = b.mul(a, c);
    const FiberElement rcs = b.star(rc);
    return b.value_at(b.mul(rcs, ac), x) / b.value_at(b.mul(rcs, rc), x);
  }
  throw Error("GermMismatch", "elements do not define the same germ",
              json{{"s", S.label(r.s)}, {"t", S.label(a.s)}, {"x", b.points[x]}});
}

std::vector<FiberElement> choose_refs(const FellBundle& b, const GermGroupoid& g, RefPolicy policy) {
  std::vector<FiberElement> refs(g.size());
  for (int k = 0; k < g.size(); ++k) {
    const int s = g.germ(k).s;
    const int x = point_of_cell(g, g.germ(k).cell);
    const int d = b.dim(s);
    bool found = false;
    for (int step = 0; step < d && !found; ++step) {
      const int i = policy == RefPolicy::First ? step : d - 1 - step;
      const FiberElement a = b.basis(s, i);
      const double q = b.square_at(a, x);
      if (q > b.zero_tol) {
        refs[k] = (1.0 / std::sqrt(q)) * a;
        found = true;
      }
    }
    if (!found) {
      throw Error("NoReference", "no fiber element is positive at this germ", json{{"germ", g.germ_to_json(k)}});
    }
    if (g.is_unit(k)) {
      const cd z = relative_coefficient(b, refs[k], b.mul(refs[k], refs[k]), x);
      refs[k] = (std::conj(z) / std::abs(z)) * refs[k];
    }
  }
  return refs;
}

LineBundle assemble(const FellBundle& b, const GermGroupoid& g, RefPolicy policy) {
  LineBundle l;
  l.groupoid = g;
  l.refs = choose_refs(b, g, policy);
  const int G = g.size();
  l.mulc.assign(static_cast<std::size_t>(G) * G, cd(0.0));
  for (int a = 0; a < G; ++a) {
    for (int h = 0; h < G; ++h) {
      const int ah = g.compose(a, h);
      if (ah < 0) continue;
      l.composable.push_back({a, h, ah});
      const int x = point_of_cell(g, g.source(h));
      l.mulc[static_cast<std::size_t>(a) * G + h] =
          relative_coefficient(b, l.refs[ah], b.mul(l.refs[a], l.refs[h]), x);
    }
  }
  l.starc.resize(G);
  for (int a = 0; a < G; ++a) {
    const int ia = g.inverse(a);
    l.starc[a] = relative_coefficient(b, l.refs[ia], b.star(l.refs[a]), point_of_cell(g, g.source(ia)));
  }
  return l;
}

json germ_pair(const GermGroupoid& g, int a, int h) { return json::array({g.germ_to_json(a), g.germ_to_json(h)}); }

}  // namespace

LineBundle build_line_bundle(const FellBundle& b, RefPolicy policy, bool verify_gauge) {
  return build_line_bundle(b, GermGroupoid::build(canonical_action(b)), policy, verify_gauge);
}

LineBundle build_line_bundle(const FellBundle& b, const GermGroupoid& g, RefPolicy policy, bool verify_gauge) {
  LineBundle l = assemble(b, g, policy);
  if (!verify_gauge) return l;
  const RefPolicy other = policy == RefPolicy::First ? RefPolicy::Last : RefPolicy::First;
  const LineBundle alt = assemble(b, g, other);
  std::vector<cd> c(g.size());
  for (int k = 0; k < g.size(); ++k) {
    c[k] = relative_coefficient(b, l.refs[k], alt.refs[k], point_of_cell(g, g.source(k)));
    if (std::abs(std::abs(c[k]) - 1.0) > 1e-10) {
      throw Error("WellDefinednessViolation", "references of one germ differ by a non-unimodular factor",
                  json{{"germ", g.germ_to_json(k)}, {"factor", complex_to_json(c[k])}});
    }
  }
  for (const auto& [a, h, ah] : l.composable) {
    const cd expected = c[a] * c[h] * l.mul_const(a, h) / c[ah];
    if (std::abs(alt.mul_const(a, h) - expected) > 1e-10) {
      throw Error("WellDefinednessViolation", "structure constants depend on the choice of reference",
                  json{{"pair", germ_pair(g, a, h)},
                       {"constant", complex_to_json(l.mul_const(a, h))},
                       {"alternative", complex_to_json(alt.mul_const(a, h))}});
    }
  }
  return l;
}

cd coefficient(const FellBundle& b, const LineBundle& l, int germ, const FiberElement& a) {
  return relative_coefficient(b, l.refs[germ], a, point_of_cell(l.groupoid, l.groupoid.source(germ)));
}

double line_norm(const FellBundle& b, const LineBundle& l, const LineElement& v) {
  const int x = point_of_cell(l.groupoid, l.groupoid.source(v.germ));
  return std::abs(v.lambda) * std::sqrt(b.square_at(l.refs[v.germ], x));
}

json LineBundle::to_json(const FellBundle& b) const {
  json refs_json = json::array();
  for (int k = 0; k < size(); ++k) {
    refs_json.push_back({{"germ", groupoid.germ_to_json(k)}, {"reference", element_to_json(b, refs[k])}});
  }
  json mul_json = json::array();
  for (const auto& [a, h, ah] : composable) {
    mul_json.push_back({{"g", a}, {"h", h}, {"gh", ah}, {"value", complex_to_json(mul_const(a, h))}});
  }
  json star_json = json::array();
  for (int k = 0; k < size(); ++k) star_json.push_back({{"g", k}, {"value", complex_to_json(starc[k])}});
  return json{{"groupoid", groupoid.to_json()}, {"references", refs_json}, {"mulc", mul_json}, {"starc", star_json}};
}

AxiomReport validate_line_bundle(const LineBundle& l) {
  const GermGroupoid& g = l.groupoid;
  AxiomReport rep;
  auto record = [&](CheckResult r) {
    rep.pass = rep.pass && r.pass;
    rep.checks.push_back(std::move(r));
  };
  {
    CheckResult r{"unimodular"};
    for (const auto& [a, h, ah] : l.composable) {
      if (std::abs(std::abs(l.mul_const(a, h)) - 1.0) > 1e-12) {
        r = {"unimodular", false, json{{"pair", germ_pair(g, a, h)}, {"value", complex_to_json(l.mul_const(a, h))}}};
        break;
      }
    }
    record(r);
  }
  {
    CheckResult r{"associativity"};
    for (const auto& [a, h, ah] : l.composable) {
      for (int k = 0; k < g.size() && r.pass; ++k) {
        const int hk = g.compose(h, k);
        if (hk < 0) continue;
        const cd lhs = l.mul_const(a, h) * l.mul_const(ah, k);
        const cd rhs = l.mul_const(h, k) * l.mul_const(a, hk);
        if (std::abs(lhs - rhs) > 1e-12) {
          r = {"associativity", false, json{{"g", g.germ_to_json(a)}, {"h", g.germ_to_json(h)}, {"k", g.germ_to_json(k)}}};
        }
      }
      if (!r.pass) break;
    }
    record(r);
  }
  {
    CheckResult r{"involution"};
    for (int a = 0; a < g.size(); ++a) {
      const int ia = g.inverse(a);
      if (std::abs(std::conj(l.starc[a]) * l.starc[ia] - 1.0) > 1e-12) {
        r = {"involution", false, json{{"germ", g.germ_to_json(a)}, {"problem", "(v*)* != v"}}};
        break;
      }
      if (std::abs(l.starc[a] * l.mul_const(ia, a) - 1.0) > 1e-12) {
        r = {"involution", false, json{{"germ", g.germ_to_json(a)}, {"problem", "v* v != 1"}}};
        break;
      }
    }
    for (const auto& [a, h, ah] : l.composable) {
      if (!r.pass) break;
      const cd lhs = std::conj(l.mul_const(a, h)) * l.starc[ah];
      const cd rhs = l.starc[h] * l.starc[a] * l.mul_const(g.inverse(h), g.inverse(a));
      if (std::abs(lhs - rhs) > 1e-12) {
        r = {"involution", false, json{{"pair", germ_pair(g, a, h)}, {"problem", "(vw)* != w* v*"}}};
      }
    }
    record(r);
  }
  {
    CheckResult r{"units"};
    for (const auto& [a, h, ah] : l.composable) {
      if (g.is_unit(a) && g.is_unit(h) && std::abs(l.mul_const(a, h) - 1.0) > 1e-12) {
        r = {"units", false, json{{"pair", germ_pair(g, a, h)}}};
        break;
      }
    }
    record(r);
  }
  return rep;
}

// ------------------------------------------------------------------ sections

Section zero_section(const LineBundle& l) { return Section::Zero(l.size()); }

Section convolve(const LineBundle& l, const Section& xi, const Section& eta) {
  Section out = zero_section(l);
  for (const auto& [a, h, ah] : l.composable) {
    if (xi[a] == 0.0 || eta[h] == 0.0) continue;
    out[ah] += l.mul_const(a, h) * xi[a] * eta[h];
  }
  return out;
}

Section involution(const LineBundle& l, const Section& xi) {
  Section out = zero_section(l);
  for (int d = 0; d < l.size(); ++d) {
    const int di = l.groupoid.inverse(d);
    out[d] = std::conj(xi[di]) * l.starc[di];
  }
  return out;
}

Section gelfand(const FellBundle& b, const LineBundle& l, const FiberElement& a) {
  Section out = zero_section(l);
  const GermGroupoid& g = l.groupoid;
  for (int c = 0; c < g.num_cells(); ++c) {
    const int k = g.germ_of(a.s, c);
    if (k >= 0) out[k] = coefficient(b, l, k, a);
  }
  return out;
}

namespace {

FiberElement random_element(const FellBundle& b, int s, std::mt19937_64& rng) {
  std::normal_distribution<double> N(0.0, 1.0);
  FiberElement a = b.zero(s);
  for (int i = 0; i < b.dim(s); ++i) a.c[i] = cd(N(rng), N(rng));
  return a;
}

double sup(const Section& v) { return v.size() == 0 ? 0.0 : v.cwiseAbs().maxCoeff(); }

int matrix_rank(const Eigen::MatrixXcd& m) {
  if (m.size() == 0) return 0;
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(m);
  int r = 0;
  for (int k = 0; k < svd.singularValues().size(); ++k) {
    if (svd.singularValues()(k) > kRankTol) ++r;
  }
  return r;
}

}  // namespace

AxiomReport verify_gelfand_iso(const FellBundle& b, const LineBundle& l, std::uint64_t seed, int random_elements) {
  std::mt19937_64 rng(seed);
  const InverseSemigroup& S = b.sg;
  const int n = b.n();
  std::vector<int> nonzero;
  for (int s = 0; s < n; ++s) {
    if (b.dim(s) > 0) nonzero.push_back(s);
  }
  AxiomReport rep;
  auto record = [&](CheckResult r) {
    rep.pass = rep.pass && r.pass;
    rep.checks.push_back(std::move(r));
  };
  auto pick = [&]() { return nonzero[std::uniform_int_distribution<std::size_t>(0, nonzero.size() - 1)(rng)]; };
  const double tol = 1e-12;
  auto scaled = [&](double scale) { return tol * std::max(1.0, scale); };

  {
    CheckResult r{"linearity"};
    for (int k = 0; k < random_elements && !nonzero.empty(); ++k) {
      const int s = pick();
      const FiberElement a1 = random_element(b, s, rng), a2 = random_element(b, s, rng);
      const cd z(std::normal_distribution<double>(0, 1)(rng), std::normal_distribution<double>(0, 1)(rng));
      const Section lhs = gelfand(b, l, z * a1 + a2);
      const Section rhs = z * gelfand(b, l, a1) + gelfand(b, l, a2);
      if (sup(lhs - rhs) > scaled(sup(rhs))) {
        r = {"linearity", false, json{{"s", S.label(s)}, {"trial", k}, {"seed", seed}}};
        break;
      }
    }
    record(r);
  }
  {
    CheckResult r{"isometry"};
    for (int k = 0; k < random_elements && !nonzero.empty(); ++k) {
      const int s = pick();
      const FiberElement a = random_element(b, s, rng);
      const double lhs = sup(gelfand(b, l, a)), rhs = b.norm(a);
      if (std::abs(lhs - rhs) > scaled(rhs)) {
        r = {"isometry", false,
             json{{"s", S.label(s)}, {"trial", k}, {"seed", seed}, {"sup_norm", lhs}, {"bundle_norm", rhs}}};
        break;
      }
    }
    record(r);
  }
  {
    // Exhaustive on basis pairs for small bundles; sampled otherwise.
    CheckResult r{"multiplicativity"};
    int total = 0;
    for (int s = 0; s < n; ++s) total += b.dim(s);
    std::vector<std::pair<FiberElement, FiberElement>> pairs;
    std::vector<json> refs;
    if (total <= 96) {
      for (int s = 0; s < n; ++s) {
        for (int t = 0; t < n; ++t) {
          for (int i = 0; i < b.dim(s); ++i) {
            for (int j = 0; j < b.dim(t); ++j) {
              pairs.push_back({b.basis(s, i), b.basis(t, j)});
              refs.push_back({{"s", S.label(s)}, {"i", i}, {"t", S.label(t)}, {"j", j}});
            }
          }
        }
      }
    } else {
      for (int k = 0; k < 500; ++k) {
        const int s = pick(), t = pick();
        const int i = std::uniform_int_distribution<int>(0, b.dim(s) - 1)(rng);
        const int j = std::uniform_int_distribution<int>(0, b.dim(t) - 1)(rng);
        pairs.push_back({b.basis(s, i), b.basis(t, j)});
        refs.push_back({{"s", S.label(s)}, {"i", i}, {"t", S.label(t)}, {"j", j}});
      }
    }
    for (int k = 0; k < random_elements && !nonzero.empty(); ++k) {
      const int s = pick(), t = pick();
      pairs.push_back({random_element(b, s, rng), random_element(b, t, rng)});
      refs.push_back({{"s", S.label(s)}, {"t", S.label(t)}, {"random_trial", k}, {"seed", seed}});
    }
    for (std::size_t k = 0; k < pairs.size(); ++k) {
      const auto& [a1, a2] = pairs[k];
      const Section lhs = gelfand(b, l, b.mul(a1, a2));
      const Section rhs = convolve(l, gelfand(b, l, a1), gelfand(b, l, a2));
      if (sup(lhs - rhs) > scaled(sup(rhs))) {
        json w = refs[k];
        for (int g = 0; g < l.size(); ++g) {
          if (std::abs(lhs[g] - rhs[g]) > scaled(sup(rhs))) {
            w["germ"] = l.groupoid.germ_to_json(g);
            break;
          }
        }
        for (const auto& [x, y, xy] : l.composable) {
          if (xy == l.groupoid.germ_of(b.sg.mul(a1.s, a2.s), l.groupoid.source(xy)) &&
              gelfand(b, l, a1)[x] != 0.0 && gelfand(b, l, a2)[y] != 0.0) {
            w["composable_pair"] = germ_pair(l.groupoid, x, y);
            break;
          }
        }
        r = {"multiplicativity", false, w};
        break;
      }
    }
    record(r);
  }
  {
    CheckResult r{"star"};
    for (int s = 0; s < n && r.pass; ++s) {
      for (int i = 0; i < b.dim(s); ++i) {
        const FiberElement a = b.basis(s, i);
        const Section lhs = gelfand(b, l, b.star(a));
        const Section rhs = involution(l, gelfand(b, l, a));
        if (sup(lhs - rhs) > tol) {
          r = {"star", false, json{{"s", S.label(s)}, {"i", i}}};
          break;
        }
      }
    }
    record(r);
  }
  {
    CheckResult r{"inclusion"};
    for (int t = 0; t < n && r.pass; ++t) {
      for (int s = 0; s < n && r.pass; ++s) {
        if (s == t || !S.leq(s, t)) continue;
        for (int i = 0; i < b.dim(s); ++i) {
          const FiberElement a = b.basis(s, i);
          const Section lhs = gelfand(b, l, b.include(t, a));
          const Section rhs = gelfand(b, l, a);
          if (sup(lhs - rhs) > tol) {
            r = {"inclusion", false, json{{"s", S.label(s)}, {"t", S.label(t)}, {"i", i}}};
            break;
          }
        }
      }
    }
    record(r);
  }
  {
    CheckResult r{"surjectivity"};
    for (int s = 0; s < n; ++s) {
      const auto O = bissection_Os(l.groupoid, s);
      Eigen::MatrixXcd m(static_cast<int>(O.size()), b.dim(s));
      for (int i = 0; i < b.dim(s); ++i) {
        const Section v = gelfand(b, l, b.basis(s, i));
        for (std::size_t k = 0; k < O.size(); ++k) m(static_cast<int>(k), i) = v[O[k]];
      }
      const int rank = matrix_rank(m);
      if (rank != static_cast<int>(O.size())) {
        r = {"surjectivity", false, json{{"s", S.label(s)}, {"rank", rank}, {"bissection_size", O.size()}}};
        break;
      }
    }
    record(r);
  }
  return rep;
}

// ------------------------------------------------------------------ twist

TwistElement twist_mul(const LineBundle& l, const TwistElement& p, const TwistElement& q) {
  const int pq = l.groupoid.compose(p.germ, q.germ);
  if (pq < 0) throw Error("NotComposable", "twist elements are not composable");
  return TwistElement{p.z * q.z * l.mul_const(p.germ, q.germ), pq};
}

TwistElement twist_inverse(const LineBundle& l, const TwistElement& p) {
  return TwistElement{std::conj(p.z) * l.starc[p.germ], l.groupoid.inverse(p.germ)};
}

TwistElement iota(const LineBundle& l, cd z, int cell) { return TwistElement{z, l.groupoid.unit_at(cell)}; }

int twist_projection(const TwistElement& p) { return p.germ; }

TwistElement triple_class(const FellBundle& b, const LineBundle& l, const FiberElement& a, int x) {
  const GermGroupoid& g = l.groupoid;
  const int c = g.cell_of_point(x);
  const int k = c < 0 ? -1 : g.germ_of(a.s, c);
  if (k < 0 || !(b.square_at(a, x) > b.zero_tol)) {
    throw Error("NotInDomain", "x is not in dom(a)", json{{"element", element_to_json(b, a)}, {"x", b.points[x]}});
  }
  const cd lambda = coefficient(b, l, k, a);
  return TwistElement{lambda / std::abs(lambda), k};
}

AxiomReport build_twist(const FellBundle& b, const LineBundle& l, std::uint64_t seed) {
  const GermGroupoid& g = l.groupoid;
  AxiomReport rep;
  auto record = [&](CheckResult r) {
    rep.pass = rep.pass && r.pass;
    rep.checks.push_back(std::move(r));
  };
  auto same = [](const TwistElement& p, const TwistElement& q) { return p.germ == q.germ && std::abs(p.z - q.z) <= 1e-12; };
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> angle(0.0, 2 * M_PI);

  {
    CheckResult r{"iota_homomorphism"};
    for (int c = 0; c < g.num_cells() && r.pass; ++c) {
      if (g.unit_at(c) < 0) continue;
      const cd z = std::polar(1.0, angle(rng)), w = std::polar(1.0, angle(rng));
      if (!same(twist_mul(l, iota(l, z, c), iota(l, w, c)), iota(l, z * w, c))) {
        r = {"iota_homomorphism", false, json{{"x", g.cell_to_json(c)}}};
      }
    }
    record(r);
  }
  {
    // pi^{-1}(G^0) = image(iota): every element over a unit germ is iota(z, x).
    CheckResult r{"exact"};
    for (int k = 0; k < g.size(); ++k) {
      if (g.is_unit(k) != (g.unit_at(g.source(k)) == k)) {
        r = {"exact", false, json{{"germ", g.germ_to_json(k)}}};
        break;
      }
      if (g.is_unit(k)) {
        const TwistElement p{std::polar(1.0, angle(rng)), k};
        if (!same(iota(l, p.z, g.source(k)), p)) r = {"exact", false, json{{"germ", g.germ_to_json(k)}}};
      }
    }
    record(r);
  }
  {
    CheckResult r{"free_action"};
    for (int k = 0; k < g.size(); ++k) {
      const cd z = std::polar(1.0, angle(rng));
      const TwistElement p{cd(1.0), k};
      const TwistElement zp{z * p.z, k};
      if (std::abs(z - 1.0) > 1e-9 && same(zp, p)) {
        r = {"free_action", false, json{{"germ", g.germ_to_json(k)}}};
        break;
      }
    }
    record(r);
  }
  {
    CheckResult r{"group_laws"};
    for (const auto& [a, h, ah] : l.composable) {
      const TwistElement p{std::polar(1.0, angle(rng)), a}, q{std::polar(1.0, angle(rng)), h};
      const TwistElement pq = twist_mul(l, p, q);
      if (std::abs(std::abs(pq.z) - 1.0) > 1e-12) {
        r = {"group_laws", false, json{{"pair", germ_pair(g, a, h)}, {"problem", "product leaves the circle"}}};
        break;
      }
      const TwistElement pinv = twist_inverse(l, p);
      if (!same(twist_mul(l, pinv, p), iota(l, 1.0, g.source(a)))) {
        r = {"group_laws", false, json{{"germ", g.germ_to_json(a)}, {"problem", "p^-1 p != 1"}}};
        break;
      }
      for (int k = 0; k < g.size(); ++k) {
        if (g.compose(h, k) < 0) continue;
        const TwistElement w{std::polar(1.0, angle(rng)), k};
        if (!same(twist_mul(l, pq, w), twist_mul(l, p, twist_mul(l, q, w)))) {
          r = {"group_laws", false, json{{"g", g.germ_to_json(a)}, {"h", g.germ_to_json(h)}, {"k", g.germ_to_json(k)}}};
          break;
        }
      }
      if (!r.pass) break;
    }
    record(r);
  }
  {
    // <a, s, θ_t y><b, t, y> = <ab, st, y> computed through the triple classes.
    CheckResult r{"triple_classes"};
    const InverseSemigroup& S = b.sg;
    std::normal_distribution<double> N(0.0, 1.0);
    int trials = 0;
    for (int s = 0; s < b.n() && r.pass; ++s) {
      for (int t = 0; t < b.n() && r.pass; ++t) {
        for (int y = 0; y < b.num_points() && r.pass; ++y) {
          const int yc = g.cell_of_point(y);
          if (yc < 0 || g.germ_of(t, yc) < 0 || g.germ_of(S.mul(s, t), yc) < 0) continue;
          const int x = g.cell(g.range(g.germ_of(t, yc))).point;
          FiberElement a = b.zero(s), c = b.zero(t);
          for (int i = 0; i < a.c.size(); ++i) a.c[i] = cd(N(rng), N(rng));
          for (int i = 0; i < c.c.size(); ++i) c.c[i] = cd(N(rng), N(rng));
          if (!(b.square_at(a, x) > 1e-9) || !(b.square_at(c, y) > 1e-9)) continue;
          const FiberElement ac = b.mul(a, c);
          if (!(b.square_at(ac, y) > 1e-9)) continue;
          ++trials;
          const TwistElement lhs = twist_mul(l, triple_class(b, l, a, x), triple_class(b, l, c, y));
          const TwistElement rhs = triple_class(b, l, ac, y);
          if (std::abs(lhs.z - rhs.z) > 1e-10 || lhs.germ != rhs.germ) {
            r = {"triple_classes", false, json{{"s", S.label(s)}, {"t", S.label(t)}, {"y", b.points[y]}}};
          }
        }
      }
    }
    if (r.pass) r.witness = json{{"trials", trials}};
    record(r);
  }
  return rep;
}

// ------------------------------------------------------------------ round trip

json round_trip(const GroupoidLineBundle& input) {
  const GroupoidBundleData data = groupoid_bundle(input);
  const FiniteGroupoid& G = input.groupoid;
  const auto& fam = data.closed.bissections;
  const auto& labels = data.closed.bissection_labels;

  {  // wideness of the closed family inside the input groupoid
    std::vector<bool> covered(G.size(), false);
    for (const auto& m : fam) {
      for (int a : m) covered[a] = true;
    }
    for (int a = 0; a < G.size(); ++a) {
      if (!covered[a]) throw Error("NotWide", "the family does not cover the groupoid", json{{"arrow", G.labels[a]}});
    }
    for (std::size_t u = 0; u < fam.size(); ++u) {
      for (std::size_t v = 0; v < fam.size(); ++v) {
        std::vector<int> both;
        std::set_intersection(fam[u].begin(), fam[u].end(), fam[v].begin(), fam[v].end(), std::back_inserter(both));
        for (int a : both) {
          bool ok = false;
          for (const auto& w : fam) {
            if (std::binary_search(w.begin(), w.end(), a) && std::includes(both.begin(), both.end(), w.begin(), w.end())) {
              ok = true;
              break;
            }
          }
          if (!ok) {
            throw Error("NotWide", "no member interpolates an intersection",
                        json{{"U", labels[u]}, {"V", labels[v]}, {"arrow", G.labels[a]}});
          }
        }
      }
    }
  }

  const FellBundle b = build_bundle(data.presentation);
  const AxiomReport axioms = validate_axioms(b);
  const LineBundle l = build_line_bundle(b);
  const GermGroupoid& g = l.groupoid;

  std::vector<CheckResult> checks;
  checks.push_back({"bundle_axioms", axioms.pass, axioms.pass ? json(nullptr) : axioms.first_failure()->witness});

  // φ([U, y]) is the arrow of U with source y.
  std::vector<int> phi(g.size(), -1);
  for (int k = 0; k < g.size(); ++k) phi[k] = data.arrow_of[g.germ(k).s][g.cell(g.germ(k).cell).point];
  {
    CheckResult r{"phi_bijective"};
    std::vector<int> hits(G.size(), 0);
    for (int k = 0; k < g.size(); ++k) {
      if (phi[k] < 0) {
        r = {"phi_bijective", false, json{{"germ", g.germ_to_json(k)}, {"problem", "no arrow"}}};
        break;
      }
      ++hits[phi[k]];
    }
    for (int a = 0; a < G.size() && r.pass; ++a) {
      if (hits[a] != 1) r = {"phi_bijective", false, json{{"arrow", G.labels[a]}, {"preimages", hits[a]}}};
    }
    checks.push_back(r);
    if (!r.pass) {
      return json{{"pass", false}, {"checks", json::array({json{{"name", r.name}, {"pass", false}, {"witness", r.witness}}})}};
    }
  }
  {
    CheckResult r{"phi_homomorphism"};
    for (int k = 0; k < g.size() && r.pass; ++k) {
      const int x = g.cell(g.source(k)).point, y = g.cell(g.range(k)).point;
      if (G.src[phi[k]] != G.units[x] || G.rng[phi[k]] != G.units[y]) {
        r = {"phi_homomorphism", false, json{{"germ", g.germ_to_json(k)}, {"problem", "source or range"}}};
      } else if (phi[g.inverse(k)] != G.inverse[phi[k]]) {
        r = {"phi_homomorphism", false, json{{"germ", g.germ_to_json(k)}, {"problem", "inverse"}}};
      } else if (g.is_unit(k) != G.is_unit(phi[k])) {
        r = {"phi_homomorphism", false, json{{"germ", g.germ_to_json(k)}, {"problem", "units"}}};
      }
    }
    for (const auto& [a, h, ah] : l.composable) {
      if (!r.pass) break;
      if (phi[ah] != G.comp[phi[a]][phi[h]]) r = {"phi_homomorphism", false, json{{"pair", germ_pair(g, a, h)}}};
    }
    int pairs = 0;
    for (int a = 0; a < G.size(); ++a) {
      for (int h = 0; h < G.size(); ++h) pairs += G.comp[a][h] >= 0 ? 1 : 0;
    }
    if (r.pass && pairs != static_cast<int>(l.composable.size())) {
      r = {"phi_homomorphism", false, json{{"problem", "composable pair count"}, {"input", pairs}, {"rebuilt", l.composable.size()}}};
    }
    checks.push_back(r);
  }

  // ψ(u_ρ) = (ζ(ρ), φ(ρ)) with ζ(ρ) the phase of the reference at φ(ρ).
  std::vector<cd> zeta(g.size());
  for (int k = 0; k < g.size(); ++k) {
    const cd v = b.value_at(l.refs[k], g.cell(g.source(k)).point);
    zeta[k] = v / std::abs(v);
  }
  {
    CheckResult r{"psi_homomorphism"};
    for (const auto& [a, h, ah] : l.composable) {
      const cd lhs = zeta[a] * zeta[h] * input.sigma[phi[a]][phi[h]];
      const cd rhs = l.mul_const(a, h) * zeta[ah];
      if (std::abs(lhs - rhs) > 1e-12) {
        r = {"psi_homomorphism", false,
             json{{"pair", germ_pair(g, a, h)}, {"input_side", complex_to_json(lhs)}, {"rebuilt_side", complex_to_json(rhs)}}};
        break;
      }
    }
    checks.push_back(r);
  }
  {
    CheckResult r{"psi_involution"};
    for (int k = 0; k < g.size(); ++k) {
      // ψ(u*) = ψ(u)^{-1} in T x_σ G, where (z, γ)^{-1} = (conj(z σ(γ^{-1}, γ)), γ^{-1}).
      const int ki = g.inverse(k);
      const cd lhs = l.starc[k] * zeta[ki];
      const cd rhs = std::conj(zeta[k] * input.sigma[G.inverse[phi[k]]][phi[k]]);
      if (std::abs(lhs - rhs) > 1e-12) {
        r = {"psi_involution", false, json{{"germ", g.germ_to_json(k)}}};
        break;
      }
    }
    checks.push_back(r);
  }
  {
    CheckResult r{"extension_diagram"};
    for (int k = 0; k < g.size(); ++k) {
      if (std::abs(std::abs(zeta[k]) - 1.0) > 1e-12) {
        r = {"extension_diagram", false, json{{"germ", g.germ_to_json(k)}, {"problem", "phase not unimodular"}}};
        break;
      }
      if (g.is_unit(k) && std::abs(zeta[k] - 1.0) > 1e-12) {
        r = {"extension_diagram", false, json{{"germ", g.germ_to_json(k)}, {"problem", "psi o iota != iota"}}};
        break;
      }
    }
    checks.push_back(r);
  }
  {
    CheckResult r{"circle_equivariance"};
    std::mt19937_64 rng(0);
    std::uniform_real_distribution<double> angle(0.0, 2 * M_PI);
    for (int k = 0; k < g.size(); ++k) {
      const cd z = std::polar(1.0, angle(rng));
      const TwistElement p = triple_class(b, l, z * l.refs[k], g.cell(g.source(k)).point);
      if (p.germ != k || std::abs(p.z - z) > 1e-12) {
        r = {"circle_equivariance", false, json{{"germ", g.germ_to_json(k)}}};
        break;
      }
    }
    checks.push_back(r);
  }

  bool pass = true;
  json checks_json = json::array();
  for (const auto& c : checks) {
    pass = pass && c.pass;
    checks_json.push_back({{"name", c.name}, {"pass", c.pass}, {"witness", c.witness}});
  }
  json phi_json = json::array(), psi_json = json::array();
  for (int k = 0; k < g.size(); ++k) {
    phi_json.push_back({{"germ", g.germ_to_json(k)}, {"arrow", G.labels[phi[k]]}});
    psi_json.push_back({{"germ", g.germ_to_json(k)}, {"arrow", G.labels[phi[k]]}, {"phase", complex_to_json(zeta[k])}});
  }
  return json{{"pass", pass},
              {"checks", checks_json},
              {"family", labels},
              {"num_arrows", G.size()},
              {"num_germs", g.size()},
              {"phi", phi_json},
              {"psi", psi_json}};
}

}  // namespace germlab
