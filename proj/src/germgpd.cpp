#include "germlab/germgpd.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace germlab {

namespace {

constexpr std::size_t kMaxBreakpoints = 4096;

// Breakpoints of the interval model: component ends and piece ends of every
// θ_s, closed under the affine extensions of the pieces.
std::vector<Rational> interval_breakpoints(const Action& action) {
  const Space& X = action.space();
  const int n = action.semigroup().size();
  std::set<Rational> pts;
  for (const auto& [a, b] : X.components()) {
    pts.insert(a);
    pts.insert(b);
  }
  for (int s = 0; s < n; ++s) {
    for (const auto& p : action.theta(s).piece_list()) {
      pts.insert(p.dom.lo);
      pts.insert(p.dom.hi);
      const Piece im = p.image();
      pts.insert(im.lo);
      pts.insert(im.hi);
    }
  }
  std::vector<Rational> frontier(pts.begin(), pts.end());
  while (!frontier.empty()) {
    std::vector<Rational> next;
    for (const auto& x : frontier) {
      for (int s = 0; s < n; ++s) {
        for (const auto& p : action.theta(s).piece_list()) {
          if (x < p.dom.lo || x > p.dom.hi) continue;
          const Rational y = p.apply(x);
          if (X.contains(y) && pts.insert(y).second) next.push_back(y);
        }
      }
    }
    if (pts.size() > kMaxBreakpoints) {
      throw Error("TooManyCells", "breakpoint closure of the interval action does not stabilize",
                  json{{"limit", kMaxBreakpoints}});
    }
    frontier = std::move(next);
  }
  return {pts.begin(), pts.end()};
}

bool cell_in(const OpenSet& u, const Cell& c) {
  return c.point >= 0 ? u.contains(c.point) : u.contains(c.sample);
}

}  // namespace

GermGroupoid GermGroupoid::build(const Action& action) {
  GermGroupoid g;
  g.action_ = action;
  const InverseSemigroup& S = action.semigroup();
  const Space& X = action.space();
  const int n = S.size();

  if (X.kind() == SpaceKind::Discrete) {
    for (int x = 0; x < X.num_points(); ++x) {
      Cell c;
      c.point = x;
      g.cells_.push_back(c);
    }
  } else {
    const auto bps = interval_breakpoints(action);
    for (const auto& [a, b] : X.components()) {
      std::vector<Rational> inside;
      for (const auto& x : bps) {
        if (x >= a && x <= b) inside.push_back(x);
      }
      for (std::size_t i = 0; i < inside.size(); ++i) {
        Cell pc;
        pc.piece = point_piece(inside[i]);
        pc.sample = inside[i];
        g.cells_.push_back(pc);
        if (i + 1 < inside.size()) {
          Cell gap;
          gap.is_point_cell = false;
          gap.piece = Piece{inside[i], inside[i + 1], false, false};
          gap.sample = gap.piece.sample();
          g.cells_.push_back(gap);
        }
      }
    }
  }
  const int C = g.num_cells();

  std::vector<std::vector<bool>> in_dom(n, std::vector<bool>(C));
  for (int s = 0; s < n; ++s) {
    const OpenSet d = action.domain(s);
    for (int c = 0; c < C; ++c) in_dom[s][c] = cell_in(d, g.cells_[c]);
  }

  g.germ_of_.assign(static_cast<std::size_t>(n) * C, -1);
  g.source_fiber_.assign(C, {});
  for (int c = 0; c < C; ++c) {
    for (int s = 0; s < n; ++s) {
      if (!in_dom[s][c]) continue;
      int found = -1;
      for (int t = 0; t < s && found < 0; ++t) {
        if (in_dom[t][c] && g.germ_equal(t, s, c)) found = g.germ_of_[static_cast<std::size_t>(t) * C + c];
      }
      if (found < 0) {
        found = static_cast<int>(g.germs_.size());
        g.germs_.push_back(Germ{s, c});
        g.source_fiber_[c].push_back(found);
      }
      g.germ_of_[static_cast<std::size_t>(s) * C + c] = found;
    }
  }

  const int G = g.size();
  g.range_.resize(G);
  for (int k = 0; k < G; ++k) {
    const Germ& gm = g.germs_[k];
    const Cell& c = g.cells_[gm.cell];
    if (c.point >= 0) {
      g.range_[k] = g.cell_of_point(*action.theta(gm.s).apply(c.point));
    } else {
      g.range_[k] = g.cell_of(*action.theta(gm.s).apply(c.sample));
    }
  }
  g.inverse_.resize(G);
  for (int k = 0; k < G; ++k) g.inverse_[k] = g.germ_of(S.star(g.germs_[k].s), g.range_[k]);

  g.compose_.assign(static_cast<std::size_t>(G) * G, -1);
  for (int a = 0; a < G; ++a) {
    for (int b = 0; b < G; ++b) {
      if (g.range_[b] != g.germs_[a].cell) continue;
      g.compose_[static_cast<std::size_t>(a) * G + b] = g.germ_of(S.mul(g.germs_[a].s, g.germs_[b].s), g.germs_[b].cell);
    }
  }

  g.unit_at_.assign(C, -1);
  for (int c = 0; c < C; ++c) {
    for (int e : S.idempotents()) {
      if (in_dom[e][c]) {
        g.unit_at_[c] = g.germ_of(e, c);
        break;
      }
    }
  }
  g.is_unit_.assign(G, false);
  for (int c = 0; c < C; ++c) {
    if (g.unit_at_[c] >= 0) g.is_unit_[g.unit_at_[c]] = true;
  }
  return g;
}

int GermGroupoid::cell_of_point(int x) const {
  for (int c = 0; c < num_cells(); ++c) {
    if (cells_[c].point == x) return c;
  }
  return -1;
}

int GermGroupoid::cell_of(const Rational& x) const {
  for (int c = 0; c < num_cells(); ++c) {
    if (cells_[c].point < 0 && cells_[c].piece.contains(x)) return c;
  }
  return -1;
}

bool GermGroupoid::germ_equal(int s, int t, int c) const {
  if (s == t) return true;
  const InverseSemigroup& S = semigroup();
  for (int e : S.idempotents()) {
    if (S.mul(s, e) == S.mul(t, e) && cell_in(action_.domain(e), cells_[c])) return true;
  }
  return false;
}

json GermGroupoid::cell_to_json(int c) const {
  const Cell& cl = cells_[c];
  if (cl.point >= 0) return action_.space().point_label(cl.point);
  if (cl.is_point_cell) return format_rational(cl.sample);
  return format_piece(cl.piece);
}

json GermGroupoid::germ_to_json(int g) const {
  const Germ& gm = germs_[g];
  const Cell& cl = cells_[gm.cell];
  json j{{"s", semigroup().label(gm.s)}};
  if (cl.is_point_cell) {
    j["x"] = cell_to_json(gm.cell);
  } else {
    j["cell"] = cell_to_json(gm.cell);
    j["x"] = format_rational(cl.sample);
  }
  return j;
}

json GermGroupoid::to_json() const {
  json cells = json::array();
  for (int c = 0; c < num_cells(); ++c) cells.push_back(cell_to_json(c));
  json germs = json::array();
  for (int k = 0; k < size(); ++k) {
    json j = germ_to_json(k);
    j["id"] = k;
    j["source"] = cell_to_json(source(k));
    j["range"] = cell_to_json(range(k));
    j["inverse"] = inverse(k);
    j["unit"] = is_unit(k);
    germs.push_back(j);
  }
  json comp = json::array();
  for (int a = 0; a < size(); ++a) {
    for (int b = 0; b < size(); ++b) {
      if (compose(a, b) >= 0) comp.push_back({a, b, compose(a, b)});
    }
  }
  int units = 0;
  for (int k = 0; k < size(); ++k) units += is_unit(k) ? 1 : 0;
  return json{{"cells", cells},   {"germs", germs},         {"compose", comp},
              {"num_germs", size()}, {"num_units", units}, {"empty", size() == 0}};
}

// ------------------------------------------------------------------ Hausdorffness

json HausdorffReport::to_json(const GermGroupoid& g) const {
  json pairs = json::array();
  for (auto [a, b] : non_separated) pairs.push_back({g.germ_to_json(a), g.germ_to_json(b)});
  json witness = non_separated.empty() ? json(nullptr) : pairs[0];
  return json{{"hausdorff", hausdorff}, {"witness", witness}, {"non_separated", pairs}};
}

HausdorffReport is_hausdorff(const GermGroupoid& g) {
  HausdorffReport rep;
  const InverseSemigroup& S = g.semigroup();
  const Action& act = g.action();
  std::map<std::pair<int, int>, OpenSet> closures;
  auto agreement_closure = [&](int s, int t) -> const OpenSet& {
    auto key = std::make_pair(std::min(s, t), std::max(s, t));
    auto it = closures.find(key);
    if (it != closures.end()) return it->second;
    OpenSet u = OpenSet::empty_of(act.space().kind());
    for (int e : S.idempotents()) {
      if (S.mul(s, e) == S.mul(t, e)) u = unite(u, act.domain(e));
    }
    return closures.emplace(key, closure(u, act.space())).first->second;
  };
  for (int c = 0; c < g.num_cells(); ++c) {
    const Cell& cl = g.cell(c);
    if (!cl.is_point_cell) continue;
    const auto& fiber = g.source_fiber(c);
    for (std::size_t i = 0; i < fiber.size(); ++i) {
      for (std::size_t j = i + 1; j < fiber.size(); ++j) {
        const int s = g.germ(fiber[i]).s, t = g.germ(fiber[j]).s;
        const OpenSet& cl_e = agreement_closure(s, t);
        const bool inside = cl.point >= 0 ? cl_e.contains(cl.point) : cl_e.contains(cl.sample);
        if (inside) rep.non_separated.push_back({fiber[i], fiber[j]});
      }
    }
  }
  rep.hausdorff = rep.non_separated.empty();
  return rep;
}

// ------------------------------------------------------------------ bissections

std::vector<int> bissection_Os(const GermGroupoid& g, int s) {
  std::vector<int> out;
  for (int c = 0; c < g.num_cells(); ++c) {
    if (g.germ_of(s, c) >= 0) out.push_back(g.germ_of(s, c));
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<int> germ_set_product(const GermGroupoid& g, const std::vector<int>& u, const std::vector<int>& v) {
  std::vector<int> out;
  for (int a : u) {
    for (int b : v) {
      if (g.compose(a, b) >= 0) out.push_back(g.compose(a, b));
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<int> germ_set_inverse(const GermGroupoid& g, const std::vector<int>& u) {
  std::vector<int> out;
  for (int a : u) out.push_back(g.inverse(a));
  std::sort(out.begin(), out.end());
  return out;
}

CheckResult verify_bissection_identities(const GermGroupoid& g) {
  const InverseSemigroup& S = g.semigroup();
  std::vector<std::vector<int>> O(S.size());
  for (int s = 0; s < S.size(); ++s) O[s] = bissection_Os(g, s);
  for (int s = 0; s < S.size(); ++s) {
    if (germ_set_inverse(g, O[s]) != O[S.star(s)]) {
      return {"bissection_identities", false, json{{"s", S.label(s)}, {"problem", "O_s^-1 != O_{s*}"}}};
    }
    for (int t = 0; t < S.size(); ++t) {
      if (germ_set_product(g, O[s], O[t]) != O[S.mul(s, t)]) {
        return {"bissection_identities", false,
                json{{"s", S.label(s)}, {"t", S.label(t)}, {"problem", "O_s O_t != O_st"}}};
      }
    }
  }
  return {"bissection_identities", true, nullptr};
}

json WideReport::to_json() const {
  return json{{"wide", wide}, {"covering", covering}, {"interpolation", interpolation}, {"witness", witness}};
}

WideReport is_wide(const GermGroupoid& g, const std::vector<std::vector<int>>& family,
                   const std::vector<std::string>& labels) {
  for (std::size_t k = 0; k < family.size(); ++k) {
    std::set<int> srcs, rngs;
    for (int a : family[k]) {
      if (!srcs.insert(g.source(a)).second || !rngs.insert(g.range(a)).second) {
        throw Error("NotABissection", "member " + labels[k] + " repeats a source or range",
                    json{{"member", labels[k]}, {"germ", g.germ_to_json(a)}});
      }
    }
  }
  WideReport rep;
  std::vector<bool> covered(g.size(), false);
  for (const auto& m : family) {
    for (int a : m) covered[a] = true;
  }
  for (int a = 0; a < g.size(); ++a) {
    if (!covered[a]) {
      rep.covering = false;
      rep.witness = json{{"uncovered", g.germ_to_json(a)}};
      break;
    }
  }
  for (std::size_t u = 0; u < family.size() && rep.interpolation; ++u) {
    for (std::size_t v = 0; v < family.size() && rep.interpolation; ++v) {
      std::vector<int> both;
      std::set_intersection(family[u].begin(), family[u].end(), family[v].begin(), family[v].end(),
                            std::back_inserter(both));
      for (int a : both) {
        bool ok = false;
        for (const auto& w : family) {
          if (std::binary_search(w.begin(), w.end(), a) && std::includes(both.begin(), both.end(), w.begin(), w.end())) {
            ok = true;
            break;
          }
        }
        if (!ok) {
          rep.interpolation = false;
          if (rep.witness.is_null()) {
            rep.witness = json{{"U", labels[u]}, {"V", labels[v]}, {"germ", g.germ_to_json(a)}};
          }
          break;
        }
      }
    }
  }
  rep.wide = rep.covering && rep.interpolation;
  return rep;
}

// ------------------------------------------------------------------ s -> O_s

json InjectivityReport::to_json(const InverseSemigroup& S) const {
  json w = nullptr;
  if (witness) w = {S.label(witness->first), S.label(witness->second)};
  auto opt = [](const std::optional<bool>& b) { return b ? json(*b) : json(nullptr); };
  return json{{"injective", injective},
              {"witness", w},
              {"continuous", opt(continuous)},
              {"semi_faithful", semi_faithful},
              {"zero_fiber_trivial", opt(zero_fiber_trivial)},
              {"hypotheses_hold", hypotheses_hold},
              {"contradiction", contradiction}};
}

InjectivityReport map_s_to_Os_injective(const GermGroupoid& g) {
  const InverseSemigroup& S = g.semigroup();
  const Action& act = g.action();
  InjectivityReport rep;
  std::vector<std::vector<int>> O(S.size());
  for (int s = 0; s < S.size(); ++s) O[s] = bissection_Os(g, s);
  for (int s = 0; s < S.size() && rep.injective; ++s) {
    for (int t = s + 1; t < S.size(); ++t) {
      if (O[s] == O[t]) {
        rep.injective = false;
        rep.witness = std::make_pair(s, t);
        break;
      }
    }
  }
  if (S.zero()) {
    rep.continuous = is_continuous(S).continuous;
    rep.zero_fiber_trivial = act.domain(*S.zero()).empty();
  }
  rep.semi_faithful = true;
  const auto& E = S.idempotents();
  for (std::size_t i = 0; i < E.size() && rep.semi_faithful; ++i) {
    const OpenSet ui = act.domain(E[i]);
    if (ui.empty() && S.zero() != E[i]) rep.semi_faithful = false;
    for (std::size_t j = i + 1; j < E.size(); ++j) {
      if (ui == act.domain(E[j])) rep.semi_faithful = false;
    }
  }
  rep.hypotheses_hold = rep.continuous.value_or(false) && rep.zero_fiber_trivial.value_or(false) && rep.semi_faithful;
  rep.contradiction = rep.hypotheses_hold && !rep.injective;
  return rep;
}

}  // namespace germlab
