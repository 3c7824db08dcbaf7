#include <catch_amalgamated.hpp>

#include "oracles.hpp"

using namespace germlab;

namespace {

Rational q(const char* s) { return parse_rational(s); }

Piece P(const char* text) { return parse_piece(text); }

}  // namespace

TEST_CASE("rationals parse and print canonically", "[spaces]") {
  CHECK(format_rational(q("2/4")) == "1/2");
  CHECK(format_rational(q("-3")) == "-3");
  CHECK(format_rational(q("6/-4")) == "-3/2");
  CHECK_THROWS_AS(parse_rational("1/0"), InputError);
  CHECK_THROWS_AS(parse_rational("x"), InputError);
}

TEST_CASE("pieces know their endpoints", "[spaces]") {
  const Piece p = P("[-1,0)");
  CHECK(p.contains(q("-1")));
  CHECK_FALSE(p.contains(q("0")));
  CHECK(p.sample() == q("-1/2"));
  CHECK(P("{1/3}").is_point());
  CHECK(intersect(P("[0,1]"), P("(1/2,2)")) == P("(1/2,1]"));
  CHECK(intersect(P("[0,1)"), P("[1,2]")).empty());
}

TEST_CASE("discrete open sets: every subset is open and closed", "[spaces]") {
  const Space X = Space::discrete({"a", "b", "c"});
  const OpenSet u = OpenSet::points(SpaceKind::Discrete, {0, 2});
  const OpenSet v = OpenSet::points(SpaceKind::Discrete, {2, 1});
  CHECK(is_relatively_open(u, X));
  CHECK(closure(u, X) == u);
  CHECK(intersect(u, v) == OpenSet::points(SpaceKind::Discrete, {2}));
  CHECK(unite(u, v) == OpenSet::points(SpaceKind::Discrete, {0, 1, 2}));
  CHECK(subset(intersect(u, v), u));
  CHECK(complement_of_closure(u, X) == OpenSet::points(SpaceKind::Discrete, {1}));
}

TEST_CASE("interval closures add the endpoints and stay inside the component", "[spaces]") {
  const Space X = Space::interval({{q("-1"), q("1")}});
  const OpenSet u = OpenSet::pieces({P("[-1,0)")});
  CHECK(is_relatively_open(u, X));
  const OpenSet cl = closure(u, X);
  CHECK(cl.contains(q("0")));
  CHECK_FALSE(cl.contains(q("1/2")));
  CHECK_FALSE(is_relatively_open(OpenSet::pieces({P("[-1/2,0)")}), X));
  const OpenSet outside = complement_of_closure(u, X);
  CHECK(outside.contains(q("1/2")));
  CHECK_FALSE(outside.contains(q("0")));
}

TEST_CASE("the empty space and the empty set are legitimate", "[spaces]") {
  const Space X = Space::discrete({});
  const OpenSet e = OpenSet::empty_of(SpaceKind::Discrete);
  CHECK(e.empty());
  CHECK(is_relatively_open(e, X));
  CHECK(closure(e, X).empty());
}

TEST_CASE("partial bijections compose and invert", "[spaces]") {
  const PartialHomeo f = PartialHomeo::from_table({1, 2, -1});
  const PartialHomeo g = invert(f);
  CHECK(g.table() == std::vector<int>{-1, 0, 1});
  CHECK(compose(g, f) == PartialHomeo::identity(OpenSet::points(SpaceKind::Discrete, {0, 1}), 3));
  CHECK_THROWS_AS(PartialHomeo::from_table({1, 1}), Error);
}

TEST_CASE("affine pieces compose and invert exactly", "[spaces]") {
  const PartialHomeo f = PartialHomeo::from_pieces({AffinePiece{P("[0,1]"), q("1/2"), q("1/4")}});
  CHECK(*f.apply(q("1")) == q("3/4"));
  const PartialHomeo g = invert(f);
  CHECK(*g.apply(q("3/4")) == q("1"));
  const PartialHomeo id = compose(g, f);
  for (const char* x : {"0", "1/3", "1"}) CHECK(*id.apply(q(x)) == q(x));
  CHECK_FALSE(f.apply(q("2")).has_value());
  CHECK_THROWS_AS(PartialHomeo::from_pieces({AffinePiece{P("[0,1]"), q("1"), q("0")},
                                             AffinePiece{P("[1/2,2]"), q("1"), q("5")}}),
                  Error);
}

TEST_CASE("action validation rejects a map that is not a homomorphism", "[spaces]") {
  const InverseSemigroup S = InverseSemigroup::validate({"1", "g"}, {{0, 1}, {1, 0}});
  const Space X = Space::discrete({"a", "b", "c"});
  // g swaps a,b but g^2 must be the identity on dom(1) = X, and c is not moved back.
  std::vector<PartialHomeo> bad{PartialHomeo::from_table({0, 1, 2}), PartialHomeo::from_table({1, 2, 0})};
  CHECK_THROWS_AS(Action::validate(S, X, bad), Error);
  std::vector<PartialHomeo> good{PartialHomeo::from_table({0, 1, 2}), PartialHomeo::from_table({1, 0, 2})};
  const Action a = Action::validate(S, X, good);
  CHECK(a.domain(1) == OpenSet::points(SpaceKind::Discrete, {0, 1, 2}));
}

TEST_CASE("action validation rejects mismatched domains", "[spaces]") {
  const InverseSemigroup S = InverseSemigroup::validate({"0", "1"}, {{0, 0}, {0, 1}}, 0);
  const Space X = Space::discrete({"a", "b"});
  std::vector<PartialHomeo> bad{PartialHomeo::from_table({0, 1}), PartialHomeo::from_table({0, -1})};
  CHECK_THROWS_AS(Action::validate(S, X, bad), Error);
}
