#include <catch_amalgamated.hpp>

#include "oracles.hpp"

using namespace germlab;

namespace {

const json& stage(const json& report, const std::string& name) {
  for (const auto& s : report["stages"]) {
    if (s["name"] == name) return s;
  }
  static const json missing = nullptr;
  return missing;
}

PipelineOptions no_timings() {
  PipelineOptions o;
  o.timings = false;
  return o;
}

}  // namespace

TEST_CASE("zero bundle: every stage passes and the groupoid is empty", "[pipeline]") {
  const PipelineResult r = run_pipeline(oracle::load_fixture("zero-bundle"), no_timings());
  CHECK(r.exit_code == kExitPass);
  CHECK(r.report["report_version"] == 1);
  for (const auto& s : r.report["stages"]) CHECK(s["verdict"] == "pass");
  CHECK(stage(r.report, "germs")["result"]["empty_groupoid"] == true);
  CHECK(stage(r.report, "linebundle")["result"]["empty_twist"] == true);
}

TEST_CASE("flip fixture: full pass including the reduced isomorphism", "[pipeline]") {
  const PipelineResult r = run_pipeline(oracle::load_fixture("z2-flip"), no_timings());
  CHECK(r.exit_code == kExitPass);
  const json& red = stage(r.report, "reduced-iso");
  REQUIRE_FALSE(red.is_null());
  CHECK(red["verdict"] == "pass");
  CHECK(red["result"]["algebra_dim"] == 4);
}

TEST_CASE("doubled-point fixture: informational Hausdorff failure, expectation passes", "[pipeline]") {
  const json doc = oracle::load_fixture("doubled-point");
  const PipelineResult r = run_pipeline(doc, no_timings());
  CHECK(r.exit_code == kExitPass);
  const json& h = stage(r.report, "hausdorff");
  CHECK(h["verdict"] == "fail");
  CHECK(h["informational"] == true);
  CHECK(h["result"]["witness"][1]["s"] == "sigma");
  CHECK(stage(r.report, "expectation")["verdict"] == "pass");

  PipelineOptions strict = no_timings();
  strict.require_hausdorff = true;
  CHECK(run_pipeline(doc, strict).exit_code == kExitFail);
}

TEST_CASE("groupoid documents run the round trip stage", "[pipeline]") {
  const PipelineResult r = run_pipeline(oracle::load_fixture("rt-z4-cocycle"), no_timings());
  CHECK(r.exit_code == kExitPass);
  CHECK(stage(r.report, "round-trip")["verdict"] == "pass");
}

TEST_CASE("reports are reproducible without timings", "[pipeline]") {
  const json doc = random_fixture(17, 8, 5);
  CHECK(run_pipeline(doc, no_timings()).report == run_pipeline(doc, no_timings()).report);
}

TEST_CASE("a structural failure stops the run and carries a witness", "[pipeline]") {
  json doc = oracle::load_fixture("z2-flip");
  doc["omega"] = json{{"(sigma,sigma)", {{"a", "1/4"}}}};
  const PipelineResult r = run_pipeline(doc, no_timings());
  CHECK(r.exit_code == kExitFail);
  const json& v = stage(r.report, "validate");
  CHECK(v["verdict"] == "fail");
  CHECK(v["error"]["code"] == "CocycleNotNormalized");
  CHECK_FALSE(v["error"]["witness"].is_null());
  CHECK(r.report["stages"].size() == 1);
}

TEST_CASE("unparsable documents surface as input errors", "[pipeline]") {
  CHECK_THROWS_AS(run_pipeline(json::parse(R"J({"semigroup": {}})J")), InputError);
}

TEST_CASE("digests depend on content only", "[pipeline]") {
  CHECK(document_digest(json{{"a", 1}}) == document_digest(json::parse(R"J({ "a" : 1 })J")));
  CHECK(document_digest(json{{"a", 1}}) != document_digest(json{{"a", 2}}));
}
