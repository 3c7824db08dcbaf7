#include <catch_amalgamated.hpp>

#include "oracles.hpp"

using namespace germlab;

TEST_CASE("weights parse affine and piecewise text", "[cartanlab]") {
  CHECK(WeightFunction::parse("1-x/2")(Rational(1)) == Rational(1, 2));
  CHECK(WeightFunction::parse("x/3+1/4")(Rational(3, 4)) == Rational(1, 2));
  CHECK(WeightFunction::parse("2*x")(Rational(1, 4)) == Rational(1, 2));
  CHECK(WeightFunction::parse("3x/4")(Rational(1)) == Rational(3, 4));
  CHECK(WeightFunction::parse("1")(Rational(1, 3)) == 1);
  const WeightFunction w = WeightFunction::parse("[0,0]:1;(0,1]:1/2");
  CHECK(w(Rational(0)) == 1);
  CHECK(w(Rational(1, 7)) == Rational(1, 2));
  CHECK_THROWS_AS(w(Rational(2)), Error);
  CHECK_THROWS_AS(WeightFunction::parse("1-y"), InputError);
  CHECK_THROWS_AS(WeightFunction::parse(""), InputError);
}

TEST_CASE("grid models need an odd resolution", "[cartanlab]") {
  CHECK_THROWS_AS(GridModel::make(100), InputError);
  CHECK_THROWS_AS(GridModel::make(1), InputError);
  const GridModel gm = GridModel::make(5);
  CHECK(gm.lower_x.size() == 5);
  CHECK(gm.upper_x.size() == 3);
  CHECK(gm.upper_x.front() == 0);
  CHECK(gm.lower_x[gm.zero_index()] == 0);
}

TEST_CASE("E is exactly idempotent on rational grid functions", "[cartanlab]") {
  const GridModel gm = GridModel::make(9);
  const WeightFunction p = WeightFunction::parse("1-x/2");
  GridFunction<QComplex> g{std::vector<QComplex>(9), std::vector<QComplex>(5)};
  for (int k = 0; k < 9; ++k) g.lower[k] = QComplex(Rational(k, 3), Rational(-k, 7));
  for (int k = 0; k < 5; ++k) g.upper[k] = QComplex(Rational(5 - k, 2), Rational(1, k + 1));
  const auto e1 = expectation_E(gm, g, p);
  const auto e2 = expectation_E(gm, e1, p);
  CHECK(e1.lower == e2.lower);
  CHECK(e1.upper == e2.upper);
  // Below zero nothing changes.
  for (int k = 0; k < gm.zero_index(); ++k) CHECK(e1.lower[k] == g.lower[k]);
  // At zero the weight is 1, so the lower value wins.
  CHECK(e1.upper[0] == g.lower[gm.zero_index()]);
}

TEST_CASE("E rejects grid functions of the wrong shape", "[cartanlab]") {
  const GridModel gm = GridModel::make(5);
  GridFunction<cd> g{std::vector<cd>(4), std::vector<cd>(3)};
  CHECK_THROWS_AS(expectation_E(gm, g, WeightFunction::parse("1")), Error);
}

TEST_CASE("conditional expectation suite", "[cartanlab]") {
  const GridModel gm = GridModel::make(101);
  SECTION("a strictly interpolating weight is faithful") {
    const AxiomReport r = verify_conditional_expectation(gm, WeightFunction::parse("1-x/2"));
    INFO(r.to_json().dump());
    CHECK(r.pass);
  }
  SECTION("the constant weight 1 is not faithful and the witness lives upstairs") {
    const AxiomReport r = verify_conditional_expectation(gm, WeightFunction::parse("1"));
    const CheckResult* f = r.first_failure();
    REQUIRE(f != nullptr);
    CHECK(f->name == "faithful");
    CHECK(f->witness["level"] == "upper");
  }
}

TEST_CASE("embeddings of the three fibers into the doubled interval", "[cartanlab]") {
  const DoubledPointExample ex = build_doubled_point_example(21);
  const GridModel gm = GridModel::make(21);
  const AxiomReport r = verify_embeddings(ex, gm);
  INFO(r.to_json().dump());
  CHECK(r.pass);
  // sigma is +1 below and -1 above.
  const FiberElement one_at_half = ex.grid_bundle.basis(ex.sigma, ex.grid_bundle.dim(ex.sigma) - 1);
  const auto g = embed_fiber(ex, gm, one_at_half);
  CHECK(g.lower.back() == cd(1.0));
  CHECK(g.upper.back() == cd(-1.0));
}

TEST_CASE("the report collects the exact and grid results", "[cartanlab]") {
  const json r = cartan_example_report(21, "1-x/2", 0);
  CHECK(r["report_version"] == 1);
  CHECK(r["hausdorff"]["hausdorff"] == false);
  CHECK(r["norm_candidates"]["asserted_equal"] == false);
  CHECK(r["pass"] == true);
}
