#include <catch_amalgamated.hpp>

#include "oracles.hpp"

using namespace germlab;

namespace {

InverseSemigroup z2() { return InverseSemigroup::validate({"1", "g"}, {{0, 1}, {1, 0}}); }

InverseSemigroup chain3() {
  // 0 < f < 1 as a meet semilattice.
  return InverseSemigroup::validate({"0", "f", "1"}, {{0, 0, 0}, {0, 1, 1}, {0, 1, 2}}, 0);
}

// The symmetric inverse monoid on one point {0, 1} and on two points, built
// by composing partial bijections, serves as a known-good table.
InverseSemigroup partial_bijections_on_two_points() {
  // Elements as tables over {0,1}; -1 undefined.
  std::vector<std::vector<int>> maps{{-1, -1}, {0, -1}, {-1, 1}, {0, 1}, {1, 0}, {1, -1}, {-1, 0}};
  std::vector<std::string> labels{"0", "e0", "e1", "id", "swap", "a", "b"};
  auto compose = [&](int s, int t) {
    std::vector<int> out(2, -1);
    for (int x = 0; x < 2; ++x) {
      if (maps[t][x] >= 0) out[x] = maps[s][maps[t][x]];
    }
    return static_cast<int>(std::find(maps.begin(), maps.end(), out) - maps.begin());
  };
  std::vector<std::vector<int>> table(7, std::vector<int>(7));
  for (int s = 0; s < 7; ++s) {
    for (int t = 0; t < 7; ++t) table[s][t] = compose(s, t);
  }
  return InverseSemigroup::validate(labels, table, 0);
}

}  // namespace

TEST_CASE("group tables validate with inverses and a single idempotent", "[invsgp]") {
  const auto S = z2();
  CHECK(S.size() == 2);
  CHECK(S.star(1) == 1);
  CHECK(S.idempotents() == std::vector<int>{0});
  CHECK_FALSE(S.zero().has_value());
}

TEST_CASE("non-associative tables are rejected with a triple", "[invsgp]") {
  try {
    InverseSemigroup::validate({"a", "b"}, {{1, 0}, {0, 0}});
    FAIL("accepted a non-associative table");
  } catch (const Error& e) {
    CHECK(e.code() == "NotAssociative");
    CHECK(e.witness().is_object());
  }
}

TEST_CASE("tables without unique inverses are rejected", "[invsgp]") {
  // Left-zero band {a, b}: xy = x. Every element is an inverse of every other.
  try {
    InverseSemigroup::validate({"a", "b"}, {{0, 0}, {1, 1}});
    FAIL("accepted a left-zero band");
  } catch (const Error& e) {
    CHECK((e.code() == "NoUniqueInverse" || e.code() == "IdempotentsDoNotCommute"));
  }
}

TEST_CASE("a declared zero must absorb", "[invsgp]") {
  CHECK_THROWS_AS(InverseSemigroup::validate({"1", "g"}, {{0, 1}, {1, 0}}, 1), Error);
}

TEST_CASE("malformed tables are input errors", "[invsgp]") {
  CHECK_THROWS_AS(InverseSemigroup::validate({"a"}, {{0, 0}}), InputError);
  CHECK_THROWS_AS(InverseSemigroup::validate({"a"}, {{3}}), InputError);
}

TEST_CASE("inverse semigroup laws hold on the two-point symmetric inverse monoid", "[invsgp][property]") {
  const auto S = partial_bijections_on_two_points();
  const int n = S.size();
  for (int s = 0; s < n; ++s) {
    CHECK(S.mul(S.mul(s, S.star(s)), s) == s);
    CHECK(S.mul(S.mul(S.star(s), s), S.star(s)) == S.star(s));
    CHECK(S.star(S.star(s)) == s);
    for (int t = 0; t < n; ++t) CHECK(S.star(S.mul(s, t)) == S.mul(S.star(t), S.star(s)));
  }
  for (int e : S.idempotents()) {
    for (int f : S.idempotents()) CHECK(S.mul(e, f) == S.mul(f, e));
  }
  CHECK(S.idempotents().size() == 4);
}

TEST_CASE("natural order agrees with s = te for an idempotent e", "[invsgp][property]") {
  const auto S = partial_bijections_on_two_points();
  for (int s = 0; s < S.size(); ++s) {
    for (int t = 0; t < S.size(); ++t) {
      bool expected = false;
      for (int e : S.idempotents()) expected = expected || S.mul(t, e) == s;
      CHECK(S.leq(s, t) == expected);
    }
  }
}

TEST_CASE("continuity needs a zero and holds on semilattices", "[invsgp]") {
  CHECK_THROWS_AS(is_continuous(z2()), Error);
  CHECK(is_continuous(chain3()).continuous);
  CHECK(is_continuous(partial_bijections_on_two_points()).continuous);
}

TEST_CASE("congruence at zero is reflexive and separates distinct idempotents of a chain", "[invsgp]") {
  const auto S = chain3();
  for (int s = 0; s < S.size(); ++s) CHECK(congruent_at_zero(S, s, s));
  CHECK_FALSE(congruent_at_zero(S, 1, 2));
}
