#include "germlab/pipeline.hpp"

#include <chrono>
#include <cstdio>
#include <functional>

#include "germlab/cartanlab.hpp"
#include "germlab/convalg.hpp"
#include "germlab/linebundle.hpp"

namespace germlab {

std::string document_digest(const json& document) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : document.dump()) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

json error_to_json(const Error& e) {
  return json{{"code", e.code()}, {"message", e.what()}, {"witness", e.witness()}};
}

PreparedBundle prepare_bundle(const BundleDocument& doc) {
  PreparedBundle p;
  p.doc = doc;
  switch (doc.kind) {
    case DocumentKind::TwistedAction:
      p.bundle = build_bundle(doc.discrete);
      p.exact_action = doc.discrete.action;
      break;
    case DocumentKind::IntervalAction: {
      const SampledBundle s = sample_interval(doc.interval, doc.grid);
      p.bundle = build_bundle(s.presentation);
      p.bundle.zero_tol = kCoordTol;
      p.exact_action = doc.interval.action;
      p.sampled = true;
      break;
    }
    case DocumentKind::GroupoidLineBundle:
      p.groupoid_data = groupoid_bundle(doc.groupoid);
      p.bundle = build_bundle(p.groupoid_data->presentation);
      p.exact_action = p.groupoid_data->presentation.action;
      break;
  }
  return p;
}

namespace {

bool same_action_as_example(const Action& a) {
  const IntervalTwistedAction ex = doubled_point_presentation();
  const Action& b = ex.action;
  if (a.space().kind() != SpaceKind::Interval || a.space().components() != b.space().components()) return false;
  if (a.semigroup().table() != b.semigroup().table()) return false;
  for (int s = 0; s < a.semigroup().size(); ++s) {
    if (!(a.theta(s) == b.theta(s))) return false;
  }
  return true;
}

}  // namespace

PipelineResult run_pipeline(const json& document, const PipelineOptions& options) {
  PipelineResult result;
  json stages = json::array();
  bool stopped = false;
  bool failed = false;

  auto run_stage = [&](const std::string& name, const std::function<json(bool&)>& body, bool informational = false) {
    if (stopped) return;
    const auto t0 = std::chrono::steady_clock::now();
    json stage{{"name", name}};
    bool pass = true;
    try {
      stage["result"] = body(pass);
    } catch (const Error& e) {
      pass = false;
      stopped = true;
      stage["error"] = error_to_json(e);
    }
    stage["verdict"] = pass ? "pass" : "fail";
    if (informational) stage["informational"] = true;
    if (!pass && !informational) failed = true;
    if (options.timings) {
      stage["timing_ms"] =
          std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    }
    stages.push_back(stage);
  };

  const BundleDocument doc = parse_document(document);
  std::optional<PreparedBundle> prepared;
  std::optional<GermGroupoid> exact;
  std::optional<LineBundle> line;

  run_stage("validate", [&](bool& pass) {
    prepared = prepare_bundle(doc);
    const AxiomReport axioms = validate_axioms(prepared->bundle, options.seed);
    json sa_w, sat_w;
    const bool sa = is_semi_abelian(prepared->bundle, &sa_w);
    const bool sat = is_saturated(prepared->bundle, &sat_w);
    pass = axioms.pass && sa && sat;
    if (!axioms.pass) stopped = true;
    return json{{"axioms", axioms.to_json()},
                {"semi_abelian", sa},
                {"semi_abelian_witness", sa_w},
                {"saturated", sat},
                {"saturated_witness", sat_w},
                {"sampled", prepared->sampled},
                {"num_points", prepared->bundle.num_points()}};
  });

  run_stage("germs", [&](bool& pass) {
    exact = GermGroupoid::build(prepared->exact_action);
    const CheckResult ids = verify_bissection_identities(*exact);
    const InjectivityReport inj = map_s_to_Os_injective(*exact);
    pass = ids.pass && !inj.contradiction;
    int units = 0;
    for (int g = 0; g < exact->size(); ++g) units += exact->is_unit(g) ? 1 : 0;
    return json{{"num_germs", exact->size()},
                {"num_units", units},
                {"num_cells", exact->num_cells()},
                {"empty_groupoid", exact->size() == 0},
                {"bissection_identities", {{"pass", ids.pass}, {"witness", ids.witness}}},
                {"s_to_Os", inj.to_json(exact->semigroup())}};
  });

  run_stage(
      "hausdorff",
      [&](bool& pass) {
        const HausdorffReport h = is_hausdorff(*exact);
        pass = h.hausdorff;
        return h.to_json(*exact);
      },
      !options.require_hausdorff);

  run_stage("linebundle", [&](bool& pass) {
    line = build_line_bundle(prepared->bundle, RefPolicy::First, true);
    const AxiomReport axioms = validate_line_bundle(*line);
    const AxiomReport twist = build_twist(prepared->bundle, *line, options.seed);
    pass = axioms.pass && twist.pass;
    return json{{"num_germs", line->size()}, {"axioms", axioms.to_json()}, {"twist", twist.to_json()},
                {"empty_twist", line->size() == 0}};
  });

  run_stage("gelfand", [&](bool& pass) {
    const AxiomReport r = verify_gelfand_iso(prepared->bundle, *line, options.seed);
    pass = r.pass;
    return r.to_json();
  });

  if (doc.kind != DocumentKind::IntervalAction) {
    run_stage("kernel", [&](bool& pass) {
      const KernelReport k = kernel_equals_ideal(prepared->bundle, *line);
      pass = k.equal;
      return k.to_json();
    });
    run_stage("reduced-iso", [&](bool& pass) {
      const ReducedIsoReport r = verify_reduced_iso(prepared->bundle, *line, options.seed);
      pass = r.pass;
      json out = r.to_json();
      if (is_hausdorff(line->groupoid).hausdorff) {
        const AxiomReport e = verify_expectation(*line, options.seed);
        pass = pass && e.pass;
        out["expectation"] = e.to_json();
      }
      return out;
    });
  }

  if (doc.kind == DocumentKind::GroupoidLineBundle) {
    run_stage("round-trip", [&](bool& pass) {
      json r = round_trip(doc.groupoid);
      pass = r.value("pass", false);
      return r;
    });
  }

  if (doc.expectation) {
    run_stage("expectation", [&](bool& pass) {
      if (doc.kind != DocumentKind::IntervalAction || !same_action_as_example(doc.interval.action)) {
        throw Error("UnsupportedExpectation",
                    "the expectation stage is defined for the doubled-point action on [-1,1] only");
      }
      json r = cartan_example_report(doc.expectation->grid, doc.expectation->weight, options.seed);
      pass = r.value("pass", false);
      return r;
    });
  }

  result.exit_code = failed ? kExitFail : kExitPass;
  result.report = json{{"report_version", kReportVersion},
                       {"inputs", {{"document", document_digest(document)}, {"seed", options.seed}}},
                       {"stages", stages},
                       {"pass", !failed}};
  if (document.contains("name")) result.report["name"] = document["name"];
  return result;
}

}  // namespace germlab
