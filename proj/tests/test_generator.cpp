#include <catch_amalgamated.hpp>

#include "oracles.hpp"

using namespace germlab;

TEST_CASE("same seed, byte-identical document", "[generator]") {
  for (std::uint64_t seed : {0ULL, 1ULL, 42ULL, 0xFFFFFFFFFFFFULL}) {
    CHECK(random_fixture(seed, 8, 6).dump() == random_fixture(seed, 8, 6).dump());
  }
  CHECK(random_fixture(1, 8, 6).dump() != random_fixture(2, 8, 6).dump());
}

TEST_CASE("seed 0 on two points is accepted by the pipeline", "[generator]") {
  const PipelineResult r = run_pipeline(random_fixture(0, 8, 2), {0, false, false});
  INFO(r.report.dump());
  CHECK(r.exit_code == kExitPass);
}

TEST_CASE("a thousand seeds produce no validator rejections", "[generator][property]") {
  int rejected = 0;
  for (std::uint64_t seed = 0; seed < 1000; ++seed) {
    const json doc = random_fixture(seed, 1 + static_cast<int>(seed % 16), 1 + static_cast<int>(seed % 32));
    try {
      const BundleDocument d = parse_document(doc);
      check_cocycle(d.discrete);
      const FellBundle b = build_bundle(d.discrete);
      if (static_cast<int>(doc["semigroup"]["elements"].size()) > 16) ++rejected;
      if (b.n() <= 8 && !validate_axioms(b, seed).pass) ++rejected;
    } catch (const Error& e) {
      UNSCOPED_INFO("seed " << seed << ": " << e.what());
      ++rejected;
    }
  }
  CHECK(rejected == 0);
}

TEST_CASE("size limits are enforced", "[generator]") {
  CHECK_THROWS_AS(random_fixture(0, 17, 4), InputError);
  CHECK_THROWS_AS(random_fixture(0, 4, 33), InputError);
  CHECK_THROWS_AS(random_fixture(0, 0, 4), InputError);
}

TEST_CASE("every built-in fixture parses and matches the file in fixtures/", "[generator]") {
  std::vector<std::string> names = builtin_fixture_names();
  for (const auto& n : round_trip_fixture_names()) names.push_back(n);
  for (const auto& name : names) {
    INFO(name);
    const json doc = builtin_fixture(name);
    CHECK_NOTHROW(parse_document(doc));
    CHECK(oracle::load_fixture(name) == doc);
  }
  CHECK_THROWS_AS(builtin_fixture("nope"), InputError);
}
