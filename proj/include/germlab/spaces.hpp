#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "germlab/common.hpp"
#include "germlab/invsgp.hpp"

namespace germlab {

enum class SpaceKind { Discrete, Interval };

// A subinterval of the real line with explicit endpoint inclusion flags.
// lo == hi with both ends closed is a single point.
struct Piece {
  Rational lo, hi;
  bool lo_closed = true;
  bool hi_closed = true;

  bool empty() const;
  bool is_point() const { return lo == hi && lo_closed && hi_closed; }
  bool contains(const Rational& x) const;
  // A rational strictly inside the piece (or its only point).
  Rational sample() const;
  bool operator==(const Piece& o) const = default;
};

Piece point_piece(const Rational& x);
Piece intersect(const Piece& a, const Piece& b);
std::string format_piece(const Piece& p);

class Space {
 public:
  static Space discrete(std::vector<std::string> points);
  static Space interval(std::vector<std::pair<Rational, Rational>> components);

  SpaceKind kind() const { return kind_; }
  // Discrete model.
  int num_points() const { return static_cast<int>(points_.size()); }
  const std::string& point_label(int x) const { return points_[x]; }
  const std::vector<std::string>& point_labels() const { return points_; }
  int point_index(const std::string& label) const;
  // Interval model.
  const std::vector<std::pair<Rational, Rational>>& components() const { return components_; }
  int component_of(const Rational& x) const;  // -1 if outside
  bool contains(const Rational& x) const { return component_of(x) >= 0; }

 private:
  SpaceKind kind_ = SpaceKind::Discrete;
  std::vector<std::string> points_;
  std::vector<std::pair<Rational, Rational>> components_;
};

// A subset of the base space kept in canonical form: a sorted point list for
// the discrete model, a sorted list of maximal merged pieces for intervals.
class OpenSet {
 public:
  OpenSet() = default;
  static OpenSet points(SpaceKind kind, std::vector<int> pts);
  static OpenSet pieces(std::vector<Piece> ps);
  static OpenSet empty_of(SpaceKind kind);

  SpaceKind kind() const { return kind_; }
  const std::vector<int>& point_list() const { return points_; }
  const std::vector<Piece>& piece_list() const { return pieces_; }
  bool empty() const { return points_.empty() && pieces_.empty(); }
  bool contains(int x) const;
  bool contains(const Rational& x) const;
  bool operator==(const OpenSet& o) const = default;

 private:
  SpaceKind kind_ = SpaceKind::Discrete;
  std::vector<int> points_;
  std::vector<Piece> pieces_;
};

OpenSet unite(const OpenSet& a, const OpenSet& b);
OpenSet intersect(const OpenSet& a, const OpenSet& b);
bool subset(const OpenSet& a, const OpenSet& b);
// Topological closure inside the space (same representation family).
OpenSet closure(const OpenSet& u, const Space& space);
// The open set X \ closure(u).
OpenSet complement_of_closure(const OpenSet& u, const Space& space);
// Every piece lies in one component and every closed finite endpoint is an
// endpoint of that component.
bool is_relatively_open(const OpenSet& u, const Space& space);
json open_set_to_json(const OpenSet& u, const Space& space);

// x -> slope * x + offset on dom.
struct AffinePiece {
  Piece dom;
  Rational slope{1};
  Rational offset{0};

  Rational apply(const Rational& x) const { return slope * x + offset; }
  Piece image() const;
  bool operator==(const AffinePiece& o) const = default;
};

// A partial bijection between subsets of the base space: a table for the
// discrete model, finitely many affine pieces for the interval model.
class PartialHomeo {
 public:
  PartialHomeo() = default;
  // table[x] is the image of x or -1. Throws Error("NotInjective").
  static PartialHomeo from_table(std::vector<int> table);
  // Throws Error("NotInjective") on overlapping domains or images.
  static PartialHomeo from_pieces(std::vector<AffinePiece> ps);
  static PartialHomeo identity(const OpenSet& u, int num_points = 0);

  SpaceKind kind() const { return kind_; }
  const std::vector<int>& table() const { return table_; }
  const std::vector<AffinePiece>& piece_list() const { return pieces_; }
  OpenSet domain() const;
  OpenSet range() const;
  std::optional<int> apply(int x) const;
  std::optional<Rational> apply(const Rational& x) const;
  bool operator==(const PartialHomeo& o) const = default;

 private:
  SpaceKind kind_ = SpaceKind::Discrete;
  std::vector<int> table_;
  std::vector<AffinePiece> pieces_;
};

// f ∘ g on g^{-1}(range(g) ∩ dom(f)).
PartialHomeo compose(const PartialHomeo& f, const PartialHomeo& g);
PartialHomeo invert(const PartialHomeo& f);

// A point where f and g differ (one defined and not the other, or different
// images), as a JSON value; null when they agree.
json find_disagreement(const PartialHomeo& f, const PartialHomeo& g, const Space& space);

json partial_homeo_to_json(const PartialHomeo& f, const Space& space);
json point_to_json(const Space& space, int x);
json point_to_json(const Rational& x);

// theta: S -> partial homeomorphisms of X, validated as an action.
class Action {
 public:
  // Checks dom θ(s) = dom θ(s*s), θ(e) = id on U_e, θ(s*) = θ(s)^{-1},
  // θ(st) = θ(s)θ(t). Throws Error with codes DomainMismatch,
  // IdempotentNotIdentity, StarNotInverse, NotHomomorphism.
  static Action validate(const InverseSemigroup& S, Space space, std::vector<PartialHomeo> theta);

  const InverseSemigroup& semigroup() const { return S_; }
  const Space& space() const { return space_; }
  const PartialHomeo& theta(int s) const { return theta_[s]; }
  // U_e = dom θ(e); for non-idempotents this is dom θ(s) = U_{s*s}.
  OpenSet domain(int s) const { return theta_[s].domain(); }

 private:
  InverseSemigroup S_;
  Space space_;
  std::vector<PartialHomeo> theta_;
};

}  // namespace germlab
