#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "germlab/common.hpp"
#include "germlab/fellbundle.hpp"
#include "germlab/germgpd.hpp"
#include "germlab/io.hpp"

namespace germlab {

inline constexpr int kReportVersion = 1;

enum ExitCode { kExitPass = 0, kExitFail = 1, kExitInput = 2 };

// A parsed document turned into a computable bundle. For interval documents
// the germ groupoid comes from the exact action and the bundle from the
// sampled grid.
struct PreparedBundle {
  BundleDocument doc;
  FellBundle bundle;
  Action exact_action;
  std::optional<GroupoidBundleData> groupoid_data;
  bool sampled = false;
};

PreparedBundle prepare_bundle(const BundleDocument& doc);

struct PipelineOptions {
  std::uint64_t seed = 0;
  bool require_hausdorff = false;
  bool timings = true;
};

struct PipelineResult {
  json report;
  int exit_code = kExitPass;
};

// validate -> germs -> hausdorff -> linebundle -> gelfand, then kernel and
// reduced-iso for discrete documents, round-trip for groupoid documents and
// the expectation stage when requested. A stage that throws ends the run;
// verification failures do not.
PipelineResult run_pipeline(const json& document, const PipelineOptions& options = {});

// Hex FNV-1a of the compact dump, used as an input digest.
std::string document_digest(const json& document);

// Wraps an Error as {"code", "message", "witness"}.
json error_to_json(const Error& e);

}  // namespace germlab
