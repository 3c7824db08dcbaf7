#include <catch_amalgamated.hpp>

#include <random>

#include "oracles.hpp"

using namespace germlab;

TEST_CASE("line bundles on fixtures satisfy the line bundle axioms", "[linebundle]") {
  for (const char* name : {"z2-flip", "semilattice", "group-zero", "zero-bundle"}) {
    INFO(name);
    const PreparedBundle p = oracle::prepared_fixture(name);
    const LineBundle l = build_line_bundle(p.bundle);
    CHECK(validate_line_bundle(l).pass);
    CHECK(build_twist(p.bundle, l).pass);
  }
}

TEST_CASE("structure constants are unimodular and the product is isometric", "[linebundle][property]") {
  for (const json& doc : oracle::random_fixture_set(20)) {
    const PreparedBundle p = oracle::prepared_from(doc);
    const LineBundle l = build_line_bundle(p.bundle);
    for (const auto& [g, h, gh] : l.composable) {
      CHECK(std::abs(std::abs(l.mul_const(g, h)) - 1.0) < 1e-12);
      const double n = line_norm(p.bundle, l, {gh, l.mul_const(g, h)});
      CHECK(std::abs(n - 1.0) < 1e-12);
    }
    for (int g = 0; g < l.size(); ++g) CHECK(std::abs(std::abs(l.starc[g]) - 1.0) < 1e-12);
  }
}

TEST_CASE("the other reference policy differs by a coboundary", "[linebundle][property]") {
  for (const json& doc : oracle::random_fixture_set(20, 500)) {
    const PreparedBundle p = oracle::prepared_from(doc);
    const LineBundle first = build_line_bundle(p.bundle, RefPolicy::First, false);
    const LineBundle last = build_line_bundle(p.bundle, RefPolicy::Last, false);
    REQUIRE(first.size() == last.size());
    // c(g) = coordinate of the Last reference against the First one.
    std::vector<cd> c(first.size());
    for (int g = 0; g < first.size(); ++g) c[g] = coefficient(p.bundle, first, g, last.refs[g]);
    for (const auto& [g, h, gh] : first.composable) {
      const cd expected = c[g] * c[h] * first.mul_const(g, h) / c[gh];
      CHECK(std::abs(last.mul_const(g, h) - expected) < 1e-10);
    }
  }
}

TEST_CASE("the Gelfand map is an isomorphism on fixtures", "[linebundle]") {
  for (const char* name : {"z2-flip", "semilattice", "group-zero"}) {
    INFO(name);
    const PreparedBundle p = oracle::prepared_fixture(name);
    const LineBundle l = build_line_bundle(p.bundle);
    const AxiomReport r = verify_gelfand_iso(p.bundle, l, 0, 30);
    INFO(r.to_json().dump());
    CHECK(r.pass);
  }
}

TEST_CASE("Gelfand sections have sup norm equal to the fiber norm", "[linebundle][property]") {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> N;
  for (const json& doc : oracle::random_fixture_set(10, 700)) {
    const PreparedBundle p = oracle::prepared_from(doc);
    const FellBundle& b = p.bundle;
    const LineBundle l = build_line_bundle(b);
    for (int s = 0; s < b.n(); ++s) {
      FiberElement a = b.zero(s);
      for (int i = 0; i < a.c.size(); ++i) a.c[i] = cd(N(rng), N(rng));
      const Section hat = gelfand(b, l, a);
      const double sup = hat.size() ? hat.cwiseAbs().maxCoeff() : 0.0;
      CHECK(std::abs(sup - b.norm(a)) < 1e-12 * std::max(1.0, b.norm(a)));
    }
  }
}

TEST_CASE("convolution is associative and the involution is anti-multiplicative", "[linebundle][property]") {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> N;
  for (const json& doc : oracle::random_fixture_set(10, 900)) {
    const PreparedBundle p = oracle::prepared_from(doc);
    const LineBundle l = build_line_bundle(p.bundle);
    auto random_section = [&] {
      Section s(l.size());
      for (int k = 0; k < l.size(); ++k) s[k] = cd(N(rng), N(rng));
      return s;
    };
    const Section a = random_section(), b = random_section(), c = random_section();
    CHECK((convolve(l, convolve(l, a, b), c) - convolve(l, a, convolve(l, b, c))).norm() < 1e-10);
    CHECK((involution(l, convolve(l, a, b)) - convolve(l, involution(l, b), involution(l, a))).norm() < 1e-10);
    CHECK((involution(l, involution(l, a)) - a).norm() < 1e-12);
  }
}

TEST_CASE("twist multiplication and inverses", "[linebundle]") {
  const PreparedBundle p = oracle::prepared_fixture("z2-flip");
  const LineBundle l = build_line_bundle(p.bundle);
  for (int g = 0; g < l.size(); ++g) {
    const TwistElement t{std::polar(1.0, 0.3 * g), g};
    const TwistElement prod = twist_mul(l, t, twist_inverse(l, t));
    CHECK(l.groupoid.is_unit(prod.germ));
    CHECK(std::abs(prod.z - 1.0) < 1e-12);
    CHECK(twist_projection(t) == g);
  }
  CHECK_THROWS_AS(twist_mul(l, TwistElement{1.0, 0}, TwistElement{1.0, l.groupoid.unit_at(1)}), Error);
}

TEST_CASE("round trip holds on every groupoid fixture and transports the cocycle", "[linebundle]") {
  for (const std::string& name : round_trip_fixture_names()) {
    INFO(name);
    const GroupoidLineBundle p = parse_groupoid_line_bundle(oracle::load_fixture(name));
    const json r = round_trip(p);
    INFO(r.dump());
    CHECK(r["pass"] == true);
    CHECK(oracle::transport_error(p) < 1e-12);
  }
}

TEST_CASE("a family that misses an arrow is not wide", "[linebundle]") {
  json doc = oracle::load_fixture("rt-z2");
  doc["subsemigroup"] = json::array({json::array({"0-0:0"})});
  try {
    round_trip(parse_groupoid_line_bundle(doc));
    FAIL("accepted");
  } catch (const Error& e) {
    CHECK(e.code() == "NotWide");
  }
}
