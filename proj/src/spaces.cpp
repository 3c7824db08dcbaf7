#include "germlab/spaces.hpp"

#include <algorithm>
#include <set>

namespace germlab {

// ---------------------------------------------------------------- pieces

bool Piece::empty() const {
  if (lo > hi) return true;
  if (lo == hi) return !(lo_closed && hi_closed);
  return false;
}

bool Piece::contains(const Rational& x) const {
  const bool above = x > lo || (x == lo && lo_closed);
  const bool below = x < hi || (x == hi && hi_closed);
  return above && below;
}

Rational Piece::sample() const {
  if (lo == hi) return lo;
  return (lo + hi) / 2;
}

Piece point_piece(const Rational& x) { return Piece{x, x, true, true}; }

Piece intersect(const Piece& a, const Piece& b) {
  Piece r;
  if (a.lo > b.lo) {
    r.lo = a.lo;
    r.lo_closed = a.lo_closed;
  } else if (b.lo > a.lo) {
    r.lo = b.lo;
    r.lo_closed = b.lo_closed;
  } else {
    r.lo = a.lo;
    r.lo_closed = a.lo_closed && b.lo_closed;
  }
  if (a.hi < b.hi) {
    r.hi = a.hi;
    r.hi_closed = a.hi_closed;
  } else if (b.hi < a.hi) {
    r.hi = b.hi;
    r.hi_closed = b.hi_closed;
  } else {
    r.hi = a.hi;
    r.hi_closed = a.hi_closed && b.hi_closed;
  }
  return r;
}

std::string format_piece(const Piece& p) {
  if (p.is_point()) return "{" + format_rational(p.lo) + "}";
  return std::string(p.lo_closed ? "[" : "(") + format_rational(p.lo) + "," + format_rational(p.hi) +
         (p.hi_closed ? "]" : ")");
}

namespace {

bool piece_less(const Piece& a, const Piece& b) {
  if (a.lo != b.lo) return a.lo < b.lo;
  return a.lo_closed && !b.lo_closed;
}

bool touches(const Piece& left, const Piece& right) {
  return right.lo < left.hi || (right.lo == left.hi && (left.hi_closed || right.lo_closed));
}

std::vector<Piece> canonical_pieces(std::vector<Piece> ps) {
  ps.erase(std::remove_if(ps.begin(), ps.end(), [](const Piece& p) { return p.empty(); }), ps.end());
  std::sort(ps.begin(), ps.end(), piece_less);
  std::vector<Piece> out;
  for (const auto& p : ps) {
    if (!out.empty() && touches(out.back(), p)) {
      Piece& cur = out.back();
      if (p.hi > cur.hi) {
        cur.hi = p.hi;
        cur.hi_closed = p.hi_closed;
      } else if (p.hi == cur.hi) {
        cur.hi_closed = cur.hi_closed || p.hi_closed;
      }
    } else {
      out.push_back(p);
    }
  }
  return out;
}

std::vector<int> sorted_unique(std::vector<int> v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

}  // namespace

// ---------------------------------------------------------------- space

Space Space::discrete(std::vector<std::string> points) {
  std::set<std::string> seen;
  for (const auto& p : points) {
    if (!seen.insert(p).second) throw InputError("duplicate point label \"" + p + "\"");
  }
  Space s;
  s.kind_ = SpaceKind::Discrete;
  s.points_ = std::move(points);
  return s;
}

Space Space::interval(std::vector<std::pair<Rational, Rational>> components) {
  std::sort(components.begin(), components.end());
  for (std::size_t i = 0; i < components.size(); ++i) {
    if (components[i].first > components[i].second) {
      throw InputError("interval component with left endpoint above right endpoint");
    }
    if (i > 0 && components[i].first <= components[i - 1].second) {
      throw InputError("interval components must be pairwise disjoint");
    }
  }
  Space s;
  s.kind_ = SpaceKind::Interval;
  s.components_ = std::move(components);
  return s;
}

int Space::point_index(const std::string& label) const {
  for (int i = 0; i < num_points(); ++i) {
    if (points_[i] == label) return i;
  }
  throw InputError("unknown point \"" + label + "\"");
}

int Space::component_of(const Rational& x) const {
  for (std::size_t i = 0; i < components_.size(); ++i) {
    if (components_[i].first <= x && x <= components_[i].second) return static_cast<int>(i);
  }
  return -1;
}

// ---------------------------------------------------------------- open sets

OpenSet OpenSet::points(SpaceKind kind, std::vector<int> pts) {
  OpenSet u;
  u.kind_ = kind;
  u.points_ = sorted_unique(std::move(pts));
  return u;
}

OpenSet OpenSet::pieces(std::vector<Piece> ps) {
  OpenSet u;
  u.kind_ = SpaceKind::Interval;
  u.pieces_ = canonical_pieces(std::move(ps));
  return u;
}

OpenSet OpenSet::empty_of(SpaceKind kind) {
  OpenSet u;
  u.kind_ = kind;
  return u;
}

bool OpenSet::contains(int x) const { return std::binary_search(points_.begin(), points_.end(), x); }

bool OpenSet::contains(const Rational& x) const {
  for (const auto& p : pieces_) {
    if (p.contains(x)) return true;
  }
  return false;
}

OpenSet unite(const OpenSet& a, const OpenSet& b) {
  if (a.kind() == SpaceKind::Discrete) {
    std::vector<int> v = a.point_list();
    v.insert(v.end(), b.point_list().begin(), b.point_list().end());
    return OpenSet::points(SpaceKind::Discrete, v);
  }
  std::vector<Piece> v = a.piece_list();
  v.insert(v.end(), b.piece_list().begin(), b.piece_list().end());
  return OpenSet::pieces(v);
}

OpenSet intersect(const OpenSet& a, const OpenSet& b) {
  if (a.kind() == SpaceKind::Discrete) {
    std::vector<int> v;
    std::set_intersection(a.point_list().begin(), a.point_list().end(), b.point_list().begin(),
                          b.point_list().end(), std::back_inserter(v));
    return OpenSet::points(SpaceKind::Discrete, v);
  }
  std::vector<Piece> v;
  for (const auto& p : a.piece_list()) {
    for (const auto& q : b.piece_list()) v.push_back(intersect(p, q));
  }
  return OpenSet::pieces(v);
}

bool subset(const OpenSet& a, const OpenSet& b) { return intersect(a, b) == a; }

OpenSet closure(const OpenSet& u, const Space& /*space*/) {
  if (u.kind() == SpaceKind::Discrete) return u;
  std::vector<Piece> v = u.piece_list();
  for (auto& p : v) {
    p.lo_closed = true;
    p.hi_closed = true;
  }
  return OpenSet::pieces(v);
}

OpenSet complement_of_closure(const OpenSet& u, const Space& space) {
  if (u.kind() == SpaceKind::Discrete) {
    std::vector<int> v;
    for (int x = 0; x < space.num_points(); ++x) {
      if (!u.contains(x)) v.push_back(x);
    }
    return OpenSet::points(SpaceKind::Discrete, v);
  }
  const OpenSet c = closure(u, space);
  std::vector<Piece> out;
  for (const auto& [a, b] : space.components()) {
    Rational cursor = a;
    bool cursor_closed = true;
    for (const auto& p : c.piece_list()) {
      if (p.hi < a || p.lo > b) continue;
      out.push_back(Piece{cursor, p.lo, cursor_closed, false});
      cursor = p.hi;
      cursor_closed = false;
    }
    out.push_back(Piece{cursor, b, cursor_closed, true});
  }
  return OpenSet::pieces(out);
}

bool is_relatively_open(const OpenSet& u, const Space& space) {
  if (u.kind() == SpaceKind::Discrete) {
    for (int x : u.point_list()) {
      if (x < 0 || x >= space.num_points()) return false;
    }
    return true;
  }
  for (const auto& p : u.piece_list()) {
    const int c = space.component_of(p.sample());
    if (c < 0) return false;
    const auto& [a, b] = space.components()[c];
    if (p.lo < a || p.hi > b) return false;
    if (p.lo_closed && p.lo != a) return false;
    if (p.hi_closed && p.hi != b) return false;
  }
  return true;
}

json point_to_json(const Space& space, int x) { return space.point_label(x); }
json point_to_json(const Rational& x) { return format_rational(x); }

json open_set_to_json(const OpenSet& u, const Space& space) {
  json out = json::array();
  if (u.kind() == SpaceKind::Discrete) {
    for (int x : u.point_list()) out.push_back(space.point_label(x));
    return out;
  }
  for (const auto& p : u.piece_list()) {
    out.push_back({{"from", format_rational(p.lo)},
                   {"to", format_rational(p.hi)},
                   {"left_closed", p.lo_closed},
                   {"right_closed", p.hi_closed}});
  }
  return out;
}

// ---------------------------------------------------------------- partial homeomorphisms

Piece AffinePiece::image() const {
  const Rational a = apply(dom.lo);
  const Rational b = apply(dom.hi);
  if (slope > 0) return Piece{a, b, dom.lo_closed, dom.hi_closed};
  return Piece{b, a, dom.hi_closed, dom.lo_closed};
}

namespace {

std::vector<AffinePiece> canonical_affine(std::vector<AffinePiece> ps) {
  ps.erase(std::remove_if(ps.begin(), ps.end(), [](const AffinePiece& p) { return p.dom.empty(); }),
           ps.end());
  for (auto& p : ps) {
    if (p.dom.is_point()) {
      const Rational img = p.apply(p.dom.lo);
      p.slope = 1;
      p.offset = img - p.dom.lo;
    }
  }
  std::sort(ps.begin(), ps.end(), [](const AffinePiece& a, const AffinePiece& b) { return piece_less(a.dom, b.dom); });

  // Absorb isolated points into a neighbour whose affine extension agrees.
  std::vector<bool> absorbed(ps.size(), false);
  for (std::size_t i = 0; i < ps.size(); ++i) {
    if (!ps[i].dom.is_point()) continue;
    const Rational x = ps[i].dom.lo;
    const Rational img = ps[i].apply(x);
    for (std::size_t j = 0; j < ps.size(); ++j) {
      if (j == i || absorbed[j] || ps[j].dom.is_point()) continue;
      AffinePiece& q = ps[j];
      if (q.dom.lo == x && !q.dom.lo_closed && q.apply(x) == img) {
        q.dom.lo_closed = true;
        absorbed[i] = true;
        break;
      }
      if (q.dom.hi == x && !q.dom.hi_closed && q.apply(x) == img) {
        q.dom.hi_closed = true;
        absorbed[i] = true;
        break;
      }
    }
  }
  std::vector<AffinePiece> kept;
  for (std::size_t i = 0; i < ps.size(); ++i) {
    if (!absorbed[i]) kept.push_back(ps[i]);
  }

  std::vector<AffinePiece> out;
  for (const auto& p : kept) {
    if (!out.empty()) {
      AffinePiece& cur = out.back();
      const bool same_map = cur.slope == p.slope && cur.offset == p.offset;
      if (same_map && p.dom.lo == cur.dom.hi && (cur.dom.hi_closed || p.dom.lo_closed)) {
        cur.dom.hi = p.dom.hi;
        cur.dom.hi_closed = p.dom.hi_closed;
        continue;
      }
    }
    out.push_back(p);
  }
  return out;
}

bool pieces_overlap(const Piece& a, const Piece& b) { return !intersect(a, b).empty(); }

}  // namespace

PartialHomeo PartialHomeo::from_table(std::vector<int> table) {
  std::vector<int> seen(table.size(), -1);
  for (std::size_t x = 0; x < table.size(); ++x) {
    const int y = table[x];
    if (y < 0) continue;
    if (y >= static_cast<int>(table.size())) throw InputError("partial map image out of range");
    if (seen[y] >= 0) {
      throw Error("NotInjective", "two points share an image",
                  json{{"x1", seen[y]}, {"x2", static_cast<int>(x)}, {"image", y}});
    }
    seen[y] = static_cast<int>(x);
  }
  PartialHomeo f;
  f.kind_ = SpaceKind::Discrete;
  f.table_ = std::move(table);
  return f;
}

PartialHomeo PartialHomeo::from_pieces(std::vector<AffinePiece> ps) {
  for (const auto& p : ps) {
    if (p.slope == 0 && !p.dom.is_point()) throw Error("NotInjective", "affine piece with zero slope");
  }
  for (std::size_t i = 0; i < ps.size(); ++i) {
    for (std::size_t j = i + 1; j < ps.size(); ++j) {
      if (pieces_overlap(ps[i].dom, ps[j].dom)) {
        throw Error("NotInjective", "overlapping piece domains",
                    json{{"piece1", format_piece(ps[i].dom)}, {"piece2", format_piece(ps[j].dom)}});
      }
      if (pieces_overlap(ps[i].image(), ps[j].image())) {
        throw Error("NotInjective", "overlapping piece images",
                    json{{"piece1", format_piece(ps[i].dom)}, {"piece2", format_piece(ps[j].dom)}});
      }
    }
  }
  PartialHomeo f;
  f.kind_ = SpaceKind::Interval;
  f.pieces_ = canonical_affine(std::move(ps));
  return f;
}

PartialHomeo PartialHomeo::identity(const OpenSet& u, int num_points) {
  if (u.kind() == SpaceKind::Discrete) {
    std::vector<int> t(num_points, -1);
    for (int x : u.point_list()) t[x] = x;
    return from_table(t);
  }
  std::vector<AffinePiece> ps;
  for (const auto& p : u.piece_list()) ps.push_back(AffinePiece{p, 1, 0});
  return from_pieces(ps);
}

OpenSet PartialHomeo::domain() const {
  if (kind_ == SpaceKind::Discrete) {
    std::vector<int> v;
    for (std::size_t x = 0; x < table_.size(); ++x) {
      if (table_[x] >= 0) v.push_back(static_cast<int>(x));
    }
    return OpenSet::points(SpaceKind::Discrete, v);
  }
  std::vector<Piece> v;
  for (const auto& p : pieces_) v.push_back(p.dom);
  return OpenSet::pieces(v);
}

OpenSet PartialHomeo::range() const {
  if (kind_ == SpaceKind::Discrete) {
    std::vector<int> v;
    for (int y : table_) {
      if (y >= 0) v.push_back(y);
    }
    return OpenSet::points(SpaceKind::Discrete, v);
  }
  std::vector<Piece> v;
  for (const auto& p : pieces_) v.push_back(p.image());
  return OpenSet::pieces(v);
}

std::optional<int> PartialHomeo::apply(int x) const {
  if (x < 0 || x >= static_cast<int>(table_.size()) || table_[x] < 0) return std::nullopt;
  return table_[x];
}

std::optional<Rational> PartialHomeo::apply(const Rational& x) const {
  for (const auto& p : pieces_) {
    if (p.dom.contains(x)) return p.apply(x);
  }
  return std::nullopt;
}

PartialHomeo compose(const PartialHomeo& f, const PartialHomeo& g) {
  if (f.kind() == SpaceKind::Discrete) {
    std::vector<int> t(g.table().size(), -1);
    for (std::size_t x = 0; x < t.size(); ++x) {
      const int y = g.table()[x];
      if (y >= 0) t[x] = f.table()[y];
    }
    return PartialHomeo::from_table(t);
  }
  std::vector<AffinePiece> out;
  for (const auto& pg : g.piece_list()) {
    for (const auto& pf : f.piece_list()) {
      const Piece j = intersect(pg.image(), pf.dom);
      if (j.empty()) continue;
      Piece pre;
      if (pg.slope > 0) {
        pre = Piece{(j.lo - pg.offset) / pg.slope, (j.hi - pg.offset) / pg.slope, j.lo_closed, j.hi_closed};
      } else {
        pre = Piece{(j.hi - pg.offset) / pg.slope, (j.lo - pg.offset) / pg.slope, j.hi_closed, j.lo_closed};
      }
      out.push_back(AffinePiece{pre, pf.slope * pg.slope, pf.slope * pg.offset + pf.offset});
    }
  }
  return PartialHomeo::from_pieces(out);
}

PartialHomeo invert(const PartialHomeo& f) {
  if (f.kind() == SpaceKind::Discrete) {
    std::vector<int> t(f.table().size(), -1);
    for (std::size_t x = 0; x < t.size(); ++x) {
      if (f.table()[x] >= 0) t[f.table()[x]] = static_cast<int>(x);
    }
    return PartialHomeo::from_table(t);
  }
  std::vector<AffinePiece> out;
  for (const auto& p : f.piece_list()) {
    out.push_back(AffinePiece{p.image(), 1 / p.slope, -p.offset / p.slope});
  }
  return PartialHomeo::from_pieces(out);
}

json find_disagreement(const PartialHomeo& f, const PartialHomeo& g, const Space& space) {
  auto show = [&](const auto& v) -> json {
    if (!v) return nullptr;
    if constexpr (std::is_same_v<std::decay_t<decltype(*v)>, int>) {
      return space.point_label(*v);
    } else {
      return format_rational(*v);
    }
  };
  if (f.kind() == SpaceKind::Discrete) {
    const std::size_t n = std::max(f.table().size(), g.table().size());
    for (std::size_t x = 0; x < n; ++x) {
      auto a = f.apply(static_cast<int>(x));
      auto b = g.apply(static_cast<int>(x));
      if (a != b) return json{{"x", space.point_label(static_cast<int>(x))}, {"left", show(a)}, {"right", show(b)}};
    }
    return nullptr;
  }
  std::vector<Rational> marks;
  for (const auto* h : {&f, &g}) {
    for (const auto& p : h->piece_list()) {
      marks.push_back(p.dom.lo);
      marks.push_back(p.dom.hi);
    }
  }
  std::sort(marks.begin(), marks.end());
  marks.erase(std::unique(marks.begin(), marks.end()), marks.end());
  std::vector<Rational> candidates = marks;
  for (std::size_t i = 0; i + 1 < marks.size(); ++i) {
    const Rational d = marks[i + 1] - marks[i];
    candidates.push_back(marks[i] + d / 3);
    candidates.push_back(marks[i] + 2 * d / 3);
  }
  std::sort(candidates.begin(), candidates.end());
  for (const auto& x : candidates) {
    auto a = f.apply(x);
    auto b = g.apply(x);
    if (a != b) return json{{"x", format_rational(x)}, {"left", show(a)}, {"right", show(b)}};
  }
  return nullptr;
}

json partial_homeo_to_json(const PartialHomeo& f, const Space& space) {
  if (f.kind() == SpaceKind::Discrete) {
    json out = json::object();
    for (std::size_t x = 0; x < f.table().size(); ++x) {
      if (f.table()[x] >= 0) out[space.point_label(static_cast<int>(x))] = space.point_label(f.table()[x]);
    }
    return out;
  }
  json out = json::array();
  for (const auto& p : f.piece_list()) {
    out.push_back({{"from", format_rational(p.dom.lo)},
                   {"to", format_rational(p.dom.hi)},
                   {"left_closed", p.dom.lo_closed},
                   {"right_closed", p.dom.hi_closed},
                   {"slope", format_rational(p.slope)},
                   {"offset", format_rational(p.offset)}});
  }
  return out;
}

// ---------------------------------------------------------------- actions

Action Action::validate(const InverseSemigroup& S, Space space, std::vector<PartialHomeo> theta) {
  const int n = S.size();
  if (static_cast<int>(theta.size()) != n) throw InputError("action must give a partial map for every element");
  for (int s = 0; s < n; ++s) {
    if (theta[s].kind() != space.kind()) throw InputError("partial map kind does not match the space");
    if (space.kind() == SpaceKind::Discrete &&
        static_cast<int>(theta[s].table().size()) != space.num_points()) {
      throw InputError("partial map table size does not match the space");
    }
    if (!is_relatively_open(theta[s].domain(), space) || !is_relatively_open(theta[s].range(), space)) {
      throw Error("NotOpen", "domain or range of theta(" + S.label(s) + ") is not open in X",
                  json{{"s", S.label(s)}});
    }
  }
  for (int s = 0; s < n; ++s) {
    const int ss = S.src(s);
    if (!(theta[s].domain() == theta[ss].domain())) {
      throw Error("DomainMismatch", "dom theta(" + S.label(s) + ") != dom theta(s*s)",
                  json{{"s", S.label(s)},
                       {"point", find_disagreement(PartialHomeo::identity(theta[s].domain(), space.num_points()),
                                                   PartialHomeo::identity(theta[ss].domain(), space.num_points()),
                                                   space)["x"]}});
    }
  }
  for (int s = 0; s < n; ++s) {
    for (int t = 0; t < n; ++t) {
      const PartialHomeo st = compose(theta[s], theta[t]);
      if (!(st == theta[S.mul(s, t)])) {
        throw Error("NotHomomorphism",
                    "theta(" + S.label(s) + ")theta(" + S.label(t) + ") != theta(" + S.label(S.mul(s, t)) + ")",
                    json{{"s", S.label(s)}, {"t", S.label(t)},
                         {"point", find_disagreement(st, theta[S.mul(s, t)], space)}});
      }
    }
  }
  for (int s = 0; s < n; ++s) {
    const PartialHomeo inv = invert(theta[s]);
    if (!(inv == theta[S.star(s)])) {
      throw Error("StarNotInverse", "theta(" + S.label(s) + "*) != theta(" + S.label(s) + ")^-1",
                  json{{"s", S.label(s)}, {"point", find_disagreement(inv, theta[S.star(s)], space)}});
    }
  }
  for (int e : S.idempotents()) {
    const PartialHomeo id = PartialHomeo::identity(theta[e].domain(), space.num_points());
    if (!(id == theta[e])) {
      throw Error("IdempotentNotIdentity", "theta(" + S.label(e) + ") is not the identity on its domain",
                  json{{"e", S.label(e)}, {"point", find_disagreement(theta[e], id, space)}});
    }
  }
  Action a;
  a.S_ = S;
  a.space_ = std::move(space);
  a.theta_ = std::move(theta);
  return a;
}

}  // namespace germlab
