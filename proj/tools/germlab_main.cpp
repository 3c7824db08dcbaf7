// Command-line front end. Every subcommand prints one JSON report.

#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "germlab/cartanlab.hpp"
#include "germlab/convalg.hpp"
#include "germlab/generator.hpp"
#include "germlab/germgpd.hpp"
#include "germlab/io.hpp"
#include "germlab/linebundle.hpp"
#include "germlab/pipeline.hpp"

using namespace germlab;

namespace {

struct Output {
  std::string path;
  void emit(const json& report) const {
    if (path.empty()) {
      std::cout << report.dump(2) << "\n";
      return;
    }
    std::ofstream out(path);
    if (!out) throw InputError("cannot write \"" + path + "\"");
    out << report.dump(2) << "\n";
  }
};

json with_version(json j) {
  j["report_version"] = kReportVersion;
  return j;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"germlab: Fell bundles over inverse semigroups and their germ groupoids"};
  app.require_subcommand(1);
  app.fallthrough();

  Output out;
  std::string input;
  std::uint64_t seed = 0;
  bool require_hausdorff = false;
  app.add_option("-o,--output", out.path, "write the report here instead of stdout");

  auto add_input = [&](CLI::App* sub) {
    sub->add_option("bundle", input, "presentation document (JSON)")->required()->check(CLI::ExistingFile);
  };
  auto add_seed = [&](CLI::App* sub) { sub->add_option("--seed", seed, "64-bit seed for randomized checks"); };

  auto* validate = app.add_subcommand("validate", "check the Fell bundle axioms of a presentation");
  add_input(validate);
  add_seed(validate);

  auto* pipeline = app.add_subcommand("pipeline", "run every stage and report each verdict");
  add_input(pipeline);
  add_seed(pipeline);
  pipeline->add_flag("--require-hausdorff", require_hausdorff, "treat a non-Hausdorff groupoid as a failure");

  auto* germs = app.add_subcommand("germs", "emit the germ groupoid table");
  add_input(germs);

  auto* hausdorff = app.add_subcommand("hausdorff", "test the germ groupoid for Hausdorffness");
  add_input(hausdorff);
  hausdorff->add_flag("--require-hausdorff", require_hausdorff, "exit 1 when the groupoid is not Hausdorff");

  auto* linebundle = app.add_subcommand("linebundle", "emit references and structure constants of the line bundle");
  add_input(linebundle);
  add_seed(linebundle);

  std::string elements_path;
  auto* norms = app.add_subcommand("norms", "reduced norms of sections");
  add_input(norms);
  norms->add_option("--elements", elements_path, "sections document (JSON)")->required()->check(CLI::ExistingFile);

  auto* verify_iso = app.add_subcommand("verify-iso", "check the Gelfand, kernel and reduced isomorphisms");
  add_input(verify_iso);
  add_seed(verify_iso);

  auto* round_trip_cmd = app.add_subcommand("round-trip", "rebuild a twisted groupoid from its section bundle");
  add_input(round_trip_cmd);

  int grid = 101;
  std::string weight = "1-x/2";
  auto* cartan = app.add_subcommand("cartan-example", "the doubled-point example and its conditional expectation");
  cartan->add_option("--n", grid, "grid resolution (odd)");
  cartan->add_option("--p", weight, "weight on [0,1], e.g. \"1-x/2\" or \"[0,0]:1;(0,1]:1/2\"");
  add_seed(cartan);

  std::string fixture_name;
  int max_elements = 8, num_points = 4;
  auto* gen = app.add_subcommand("gen-fixture", "emit a built-in or seeded random presentation document");
  gen->add_option("--name", fixture_name, "built-in fixture name");
  gen->add_option("--elements", max_elements, "maximum semigroup size (<= 16)");
  gen->add_option("--points", num_points, "number of points (<= 32)");
  add_seed(gen);
  gen->add_flag_callback("--list", [] {
    json names{{"builtin", builtin_fixture_names()}, {"round_trip", round_trip_fixture_names()}};
    std::cout << names.dump(2) << "\n";
    std::exit(kExitPass);
  }, "list built-in fixture names");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitPass : kExitInput;
  }

  try {
    if (*pipeline) {
      PipelineOptions opts;
      opts.seed = seed;
      opts.require_hausdorff = require_hausdorff;
      const PipelineResult r = run_pipeline(read_json_file(input), opts);
      out.emit(r.report);
      return r.exit_code;
    }
    if (*gen) {
      out.emit(fixture_name.empty() ? random_fixture(seed, max_elements, num_points) : builtin_fixture(fixture_name));
      return kExitPass;
    }
    if (*cartan) {
      const json r = cartan_example_report(grid, weight, seed);
      out.emit(r);
      return r.value("pass", false) ? kExitPass : kExitFail;
    }
    if (*round_trip_cmd) {
      const GroupoidLineBundle p = parse_groupoid_line_bundle(read_json_file(input));
      const json r = with_version(round_trip(p));
      out.emit(r);
      return r.value("pass", false) ? kExitPass : kExitFail;
    }

    const BundleDocument doc = load_document(input);
    if (*germs || *hausdorff) {
      const PreparedBundle p = prepare_bundle(doc);
      const GermGroupoid g = GermGroupoid::build(p.exact_action);
      if (*germs) {
        json r = g.to_json();
        r["s_to_Os"] = map_s_to_Os_injective(g).to_json(g.semigroup());
        out.emit(with_version(r));
        return kExitPass;
      }
      const HausdorffReport h = is_hausdorff(g);
      json r = h.to_json(g);
      r["verdict"] = h.hausdorff ? "PASS" : "FAIL";
      r["informational"] = !require_hausdorff;
      out.emit(with_version(r));
      return (!h.hausdorff && require_hausdorff) ? kExitFail : kExitPass;
    }

    const PreparedBundle p = prepare_bundle(doc);
    if (*validate) {
      const AxiomReport axioms = validate_axioms(p.bundle, seed);
      const bool sa = is_semi_abelian(p.bundle);
      const bool sat = is_saturated(p.bundle);
      const bool pass = axioms.pass && sa && sat;
      out.emit(with_version(json{{"axioms", axioms.to_json()},
                                 {"semi_abelian", sa},
                                 {"saturated", sat},
                                 {"sampled", p.sampled},
                                 {"pass", pass}}));
      return pass ? kExitPass : kExitFail;
    }

    const LineBundle l = build_line_bundle(p.bundle, RefPolicy::First, true);
    if (*linebundle) {
      const AxiomReport axioms = validate_line_bundle(l);
      const AxiomReport twist = build_twist(p.bundle, l, seed);
      json r = l.to_json(p.bundle);
      r["axioms"] = axioms.to_json();
      r["twist"] = twist.to_json();
      r["pass"] = axioms.pass && twist.pass;
      out.emit(with_version(r));
      return axioms.pass && twist.pass ? kExitPass : kExitFail;
    }
    if (*norms) {
      const auto elements = parse_elements(read_json_file(elements_path), p.bundle, l);
      json list = json::array();
      for (const auto& e : elements) {
        json per_unit;
        const double n = reduced_norm(l, e.section, &per_unit);
        list.push_back({{"element", e.source}, {"reduced_norm", n}, {"per_unit", per_unit}});
      }
      out.emit(with_version(json{{"norms", list}}));
      return kExitPass;
    }
    if (*verify_iso) {
      const AxiomReport gel = verify_gelfand_iso(p.bundle, l, seed);
      json r{{"gelfand", gel.to_json()}};
      bool pass = gel.pass;
      if (!p.sampled) {
        const KernelReport k = kernel_equals_ideal(p.bundle, l);
        const ReducedIsoReport red = verify_reduced_iso(p.bundle, l, seed);
        r["kernel"] = k.to_json();
        r["reduced"] = red.to_json();
        pass = pass && k.equal && red.pass;
      }
      r["pass"] = pass;
      out.emit(with_version(r));
      return pass ? kExitPass : kExitFail;
    }
  } catch (const InputError& e) {
    std::cerr << error_to_json(e).dump() << "\n";
    return kExitInput;
  } catch (const json::exception& e) {
    std::cerr << json{{"code", "InputError"}, {"message", e.what()}}.dump() << "\n";
    return kExitInput;
  } catch (const Error& e) {
    out.emit(with_version(json{{"pass", false}, {"error", error_to_json(e)}}));
    return kExitFail;
  }
  return kExitPass;
}
