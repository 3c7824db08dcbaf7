#include <catch_amalgamated.hpp>

#include "oracles.hpp"

using namespace germlab;

TEST_CASE("built-in discrete bundles satisfy every axiom", "[fellbundle]") {
  for (const char* name : {"z2-flip", "semilattice", "group-zero", "zero-bundle"}) {
    INFO(name);
    const PreparedBundle p = oracle::prepared_fixture(name);
    const AxiomReport r = validate_axioms(p.bundle);
    CHECK(r.pass);
    CHECK(oracle::associative(p.bundle));
    CHECK(is_semi_abelian(p.bundle));
    CHECK(is_saturated(p.bundle));
  }
}

TEST_CASE("random bundles satisfy the axioms and the dense associativity check", "[fellbundle][property]") {
  for (const json& doc : oracle::random_fixture_set(15)) {
    INFO(doc.dump());
    const PreparedBundle p = oracle::prepared_from(doc);
    CHECK(validate_axioms(p.bundle, 3).pass);
    CHECK(oracle::associative(p.bundle));
  }
}

TEST_CASE("the canonical action of a twisted-action bundle is the input action", "[fellbundle][property]") {
  for (const json& doc : oracle::random_fixture_set(10, 100)) {
    const PreparedBundle p = oracle::prepared_from(doc);
    const Action recovered = canonical_action(p.bundle);
    for (int s = 0; s < p.bundle.n(); ++s) CHECK(recovered.theta(s) == p.exact_action.theta(s));
  }
}

TEST_CASE("fiber dimensions match the domains of the action", "[fellbundle]") {
  const PreparedBundle p = oracle::prepared_fixture("semilattice");
  CHECK(p.bundle.dim(0) == 1);
  CHECK(p.bundle.dim(1) == 2);
  const PreparedBundle z = oracle::prepared_fixture("zero-bundle");
  for (int s = 0; s < z.bundle.n(); ++s) CHECK(z.bundle.dim(s) == 0);
}

TEST_CASE("cocycle checks name the offending slot", "[fellbundle]") {
  BundleDocument doc = parse_document(oracle::load_fixture("z2-flip"));
  TwistedAction& t = doc.discrete;
  SECTION("not unimodular") {
    t.omega[1 * 2 + 1][0] = cd(2.0, 0.0);
    try {
      check_cocycle(t);
      FAIL("accepted");
    } catch (const Error& e) {
      CHECK(e.code() == "CocycleNotUnimodular");
      CHECK(e.witness().contains("x"));
    }
  }
  SECTION("not normalized on an idempotent slot") {
    t.omega[0 * 2 + 1][1] = cd(0.0, 1.0);
    try {
      check_cocycle(t);
      FAIL("accepted");
    } catch (const Error& e) {
      CHECK(e.code() == "CocycleNotNormalized");
    }
  }
  SECTION("not a cocycle") {
    // The identity for the triple (sigma, sigma, sigma) forces the value
    // at a to equal the value at b.
    t.omega[1 * 2 + 1][0] = cd(0.0, 1.0);
    t.inverse_slots_normalized = false;
    CHECK_THROWS_AS(check_cocycle(t), Error);
  }
}

TEST_CASE("inclusions are isometric and transitive on a chain", "[fellbundle]") {
  const json doc = json::parse(R"({
    "semigroup": {"elements": ["0", "f", "1"], "mul": [[0,0,0],[0,1,1],[0,1,2]], "zero": "0"},
    "action": {"space": {"kind": "discrete", "points": ["a", "b", "c"]},
               "theta": {"0": {"a": "a"}, "f": {"a": "a", "b": "b"}, "1": {"a": "a", "b": "b", "c": "c"}}}
  })");
  const PreparedBundle p = oracle::prepared_from(doc);
  const AxiomReport r = validate_axioms(p.bundle);
  CHECK(r.pass);
  const FellBundle& b = p.bundle;
  const FiberElement a = b.basis(0, 0);
  CHECK(distance(b.include(2, a), b.include(2, b.include(1, a))) == 0.0);
  CHECK(b.norm(b.include(2, a)) == b.norm(a));
  CHECK_THROWS_AS(b.include(0, b.basis(2, 0)), Error);
}

TEST_CASE("x-equivalence compares values at x only", "[fellbundle]") {
  const PreparedBundle p = oracle::prepared_fixture("semilattice");
  const FellBundle& b = p.bundle;
  FiberElement a = b.basis(1, 0), c = b.basis(1, 0);
  c.c[1] = cd(5.0, 0.0);
  CHECK(eqx(b, a, c, 0));
  CHECK_FALSE(eqx(b, a, c, 1));
  CHECK_THROWS_AS(eqx(b, a, b.basis(0, 0), 0), Error);
}

TEST_CASE("the groupoid section bundle closes the family and keeps the cocycle", "[fellbundle]") {
  const GroupoidLineBundle p = parse_groupoid_line_bundle(oracle::load_fixture("rt-z4-cocycle"));
  const GroupoidBundleData d = groupoid_bundle(p);
  // Shifts coincide with singletons, and products of singletons stay singletons.
  CHECK(d.closed.bissections.size() == 4);
  const FellBundle b = build_bundle(d.presentation);
  CHECK(validate_axioms(b).pass);
  CHECK(oracle::associative(b));
}

TEST_CASE("a family with a repeated source is not a bissection family", "[fellbundle]") {
  json doc = oracle::load_fixture("rt-z2");
  doc["subsemigroup"] = json::array({json::array({"0-0:0", "0-0:1"})});
  const GroupoidLineBundle p = parse_groupoid_line_bundle(doc);
  try {
    groupoid_bundle(p);
    FAIL("accepted");
  } catch (const Error& e) {
    CHECK(e.code() == "NotABissection");
  }
}

TEST_CASE("the interval sampler keeps grid points and their orbits", "[fellbundle]") {
  const IntervalTwistedAction ex = doubled_point_presentation();
  const SampledBundle s = sample_interval(ex, 11);
  CHECK(s.samples.size() == 11);
  CHECK(s.samples.front() == -1);
  CHECK(s.samples.back() == 1);
  const FellBundle b = build_bundle(s.presentation);
  CHECK(b.dim(0) == 5);  // samples with x < 0
  CHECK(b.dim(1) == 11);
  CHECK(validate_axioms(b).pass);
}
