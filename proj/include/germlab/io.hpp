#pragma once

#include <optional>
#include <string>
#include <vector>

#include "germlab/common.hpp"
#include "germlab/convalg.hpp"
#include "germlab/fellbundle.hpp"
#include "germlab/invsgp.hpp"
#include "germlab/linebundle.hpp"
#include "germlab/spaces.hpp"

namespace germlab {

// All parsers throw InputError carrying a "path" into the document.

Rational rational_from_json(const json& v);
InverseSemigroup parse_semigroup(const json& doc);
Space parse_space(const json& doc);
// "[a,b)", "(a,b]", "{a}" and so on.
Piece parse_piece(const std::string& text);
Action parse_action(const InverseSemigroup& S, const json& doc);

struct ExpectationOptions {
  int grid = 101;
  std::string weight = "1-x/2";
};

enum class DocumentKind { TwistedAction, IntervalAction, GroupoidLineBundle };

struct BundleDocument {
  DocumentKind kind = DocumentKind::TwistedAction;
  TwistedAction discrete;
  IntervalTwistedAction interval;
  GroupoidLineBundle groupoid;
  int grid = 101;  // sampling resolution for interval documents
  std::optional<ExpectationOptions> expectation;
};

BundleDocument parse_document(const json& doc);
json read_json_file(const std::string& path);
BundleDocument load_document(const std::string& path);

// Groupoid documents accept either a top-level "kind" or the bare
// {"groupoid", "cocycle", "subsemigroup"} shape.
GroupoidLineBundle parse_groupoid_line_bundle(const json& doc);

// Elements for the norms subcommand: {"terms": [{"s": label, "c": [...]}]}
// is a finitely supported section of the bundle sent through the Gelfand
// map; {"section": [{"s", "x", "value"}]} lists germ values directly.
struct ParsedElement {
  Section section;
  json source;
};
std::vector<ParsedElement> parse_elements(const json& doc, const FellBundle& b, const LineBundle& l);

}  // namespace germlab
