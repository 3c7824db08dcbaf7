#include "germlab/io.hpp"

#include <fstream>
#include <sstream>

namespace germlab {

namespace {

const json& require(const json& doc, const std::string& key, const std::string& path) {
  if (!doc.is_object() || !doc.contains(key)) throw InputError("missing key \"" + key + "\"", json{{"path", path}});
  return doc.at(key);
}

std::string string_at(const json& v, const std::string& path) {
  if (!v.is_string()) throw InputError("expected a string", json{{"path", path}});
  return v.get<std::string>();
}

int label_or_index(const json& v, const std::vector<std::string>& labels, const std::string& path) {
  if (v.is_number_integer()) {
    const int k = v.get<int>();
    if (k < 0 || k >= static_cast<int>(labels.size())) throw InputError("index out of range", json{{"path", path}});
    return k;
  }
  const std::string s = string_at(v, path);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] == s) return static_cast<int>(i);
  }
  throw InputError("unknown label \"" + s + "\"", json{{"path", path}});
}

// "(s,t)" -> (s, t)
std::pair<int, int> parse_slot(const std::string& key, const std::vector<std::string>& labels, const std::string& path) {
  if (key.size() < 5 || key.front() != '(' || key.back() != ')') {
    throw InputError("omega keys must look like \"(s,t)\"", json{{"path", path}});
  }
  const std::string inner = key.substr(1, key.size() - 2);
  const auto comma = inner.find(',');
  if (comma == std::string::npos) throw InputError("omega keys must look like \"(s,t)\"", json{{"path", path}});
  auto trim = [](std::string s) {
    while (!s.empty() && s.front() == ' ') s.erase(s.begin());
    while (!s.empty() && s.back() == ' ') s.pop_back();
    return s;
  };
  return {label_or_index(json(trim(inner.substr(0, comma))), labels, path),
          label_or_index(json(trim(inner.substr(comma + 1))), labels, path)};
}

cd circle_at(const json& v, const std::string& path) {
  try {
    return parse_circle(v);
  } catch (const InputError& e) {
    throw InputError(std::string("bad circle value: ") + e.what(), json{{"path", path}});
  }
}

}  // namespace

Rational rational_from_json(const json& v) {
  if (v.is_number_integer()) return Rational(v.get<long long>());
  if (v.is_string()) return parse_rational(v.get<std::string>());
  throw InputError("expected a rational written as \"p/q\"", v);
}

InverseSemigroup parse_semigroup(const json& doc) {
  const json& elems = require(doc, "elements", "semigroup");
  if (!elems.is_array() || elems.empty()) throw InputError("elements must be a nonempty list", json{{"path", "semigroup.elements"}});
  std::vector<std::string> labels;
  for (std::size_t i = 0; i < elems.size(); ++i) {
    labels.push_back(string_at(elems[i], "semigroup.elements[" + std::to_string(i) + "]"));
  }
  const json& mul = require(doc, "mul", "semigroup");
  if (!mul.is_array() || mul.size() != labels.size()) {
    throw InputError("mul must be a square table matching elements", json{{"path", "semigroup.mul"}});
  }
  std::vector<std::vector<int>> table;
  for (std::size_t i = 0; i < mul.size(); ++i) {
    if (!mul[i].is_array() || mul[i].size() != labels.size()) {
      throw InputError("mul must be a square table matching elements", json{{"path", "semigroup.mul[" + std::to_string(i) + "]"}});
    }
    std::vector<int> row;
    for (std::size_t j = 0; j < mul[i].size(); ++j) {
      row.push_back(label_or_index(mul[i][j], labels,
                                   "semigroup.mul[" + std::to_string(i) + "][" + std::to_string(j) + "]"));
    }
    table.push_back(std::move(row));
  }
  std::optional<int> zero;
  if (doc.contains("zero") && !doc["zero"].is_null()) zero = label_or_index(doc["zero"], labels, "semigroup.zero");
  return InverseSemigroup::validate(labels, table, zero);
}

Space parse_space(const json& doc) {
  const std::string kind = string_at(require(doc, "kind", "space"), "space.kind");
  if (kind == "discrete") {
    const json& pts = require(doc, "points", "space");
    if (!pts.is_array()) throw InputError("points must be a list", json{{"path", "space.points"}});
    std::vector<std::string> labels;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      const std::string p = string_at(pts[i], "space.points[" + std::to_string(i) + "]");
      if (std::find(labels.begin(), labels.end(), p) != labels.end()) {
        throw InputError("duplicate point \"" + p + "\"", json{{"path", "space.points"}});
      }
      labels.push_back(p);
    }
    return Space::discrete(labels);
  }
  if (kind == "interval") {
    const json& comps = require(doc, "components", "space");
    if (!comps.is_array()) throw InputError("components must be a list", json{{"path", "space.components"}});
    std::vector<std::pair<Rational, Rational>> cs;
    for (std::size_t i = 0; i < comps.size(); ++i) {
      if (!comps[i].is_array() || comps[i].size() != 2) {
        throw InputError("components are [a, b] pairs", json{{"path", "space.components[" + std::to_string(i) + "]"}});
      }
      cs.emplace_back(rational_from_json(comps[i][0]), rational_from_json(comps[i][1]));
    }
    return Space::interval(cs);
  }
  throw InputError("space kind must be discrete or interval", json{{"path", "space.kind"}});
}

Piece parse_piece(const std::string& raw) {
  std::string t;
  for (char c : raw) {
    if (c != ' ') t.push_back(c);
  }
  if (t.size() >= 3 && t.front() == '{' && t.back() == '}') return point_piece(parse_rational(t.substr(1, t.size() - 2)));
  const auto comma = t.find(',');
  if (t.size() < 5 || comma == std::string::npos || (t.front() != '[' && t.front() != '(') ||
      (t.back() != ']' && t.back() != ')')) {
    throw InputError("pieces are written like \"[a,b)\"", json{{"piece", raw}});
  }
  Piece p{parse_rational(t.substr(1, comma - 1)), parse_rational(t.substr(comma + 1, t.size() - comma - 2)),
          t.front() == '[', t.back() == ']'};
  if (p.empty()) throw InputError("empty piece", json{{"piece", raw}});
  return p;
}

Action parse_action(const InverseSemigroup& S, const json& doc) {
  Space space = parse_space(require(doc, "space", "action"));
  const json& th = require(doc, "theta", "action");
  if (!th.is_object()) throw InputError("theta must map element labels to partial maps", json{{"path", "action.theta"}});
  std::vector<PartialHomeo> theta;
  for (int s = 0; s < S.size(); ++s) {
    const std::string path = "action.theta." + S.label(s);
    if (!th.contains(S.label(s))) throw InputError("no partial map for element", json{{"path", path}});
    const json& m = th.at(S.label(s));
    if (space.kind() == SpaceKind::Discrete) {
      if (!m.is_object()) throw InputError("discrete partial maps are {point: image}", json{{"path", path}});
      std::vector<int> table(space.num_points(), -1);
      for (auto it = m.begin(); it != m.end(); ++it) {
        const int x = label_or_index(json(it.key()), space.point_labels(), path);
        table[x] = label_or_index(it.value(), space.point_labels(), path + "." + it.key());
      }
      theta.push_back(PartialHomeo::from_table(table));
    } else {
      if (!m.is_array()) throw InputError("interval partial maps are lists of affine pieces", json{{"path", path}});
      std::vector<AffinePiece> ps;
      for (std::size_t i = 0; i < m.size(); ++i) {
        const std::string pp = path + "[" + std::to_string(i) + "]";
        AffinePiece a;
        a.dom = parse_piece(string_at(require(m[i], "dom", pp), pp + ".dom"));
        if (m[i].contains("slope")) a.slope = rational_from_json(m[i]["slope"]);
        if (m[i].contains("offset")) a.offset = rational_from_json(m[i]["offset"]);
        ps.push_back(a);
      }
      theta.push_back(PartialHomeo::from_pieces(ps));
    }
  }
  return Action::validate(S, std::move(space), std::move(theta));
}

GroupoidLineBundle parse_groupoid_line_bundle(const json& doc) {
  const json& gd = require(doc, "groupoid", "document");
  const json& arrows = require(gd, "arrows", "groupoid");
  if (!arrows.is_array() || arrows.empty()) throw InputError("arrows must be a nonempty list", json{{"path", "groupoid.arrows"}});
  FiniteGroupoid g;
  for (std::size_t i = 0; i < arrows.size(); ++i) {
    g.labels.push_back(string_at(require(arrows[i], "label", "groupoid.arrows"), "groupoid.arrows[" + std::to_string(i) + "].label"));
  }
  const int n = g.size();
  g.src.assign(n, -1);
  g.rng.assign(n, -1);
  for (int a = 0; a < n; ++a) {
    const std::string path = "groupoid.arrows[" + std::to_string(a) + "]";
    g.src[a] = label_or_index(require(arrows[a], "src", path), g.labels, path + ".src");
    g.rng[a] = label_or_index(require(arrows[a], "rng", path), g.labels, path + ".rng");
  }
  for (int a = 0; a < n; ++a) {
    if (g.src[a] == a && g.rng[a] == a) g.units.push_back(a);
  }
  g.comp.assign(n, std::vector<int>(n, -1));
  for (int a = 0; a < n; ++a) {
    const int u = g.rng[a], v = g.src[a];
    if (u >= 0 && g.src[u] == u) g.comp[u][a] = a;
    if (v >= 0 && g.src[v] == v) g.comp[a][v] = a;
  }
  if (gd.contains("comp")) {
    const json& comp = gd["comp"];
    if (!comp.is_array()) throw InputError("comp must be a list of [a, b, ab]", json{{"path", "groupoid.comp"}});
    for (std::size_t i = 0; i < comp.size(); ++i) {
      const std::string path = "groupoid.comp[" + std::to_string(i) + "]";
      if (!comp[i].is_array() || comp[i].size() != 3) throw InputError("comp entries are [a, b, ab]", json{{"path", path}});
      g.comp[label_or_index(comp[i][0], g.labels, path)][label_or_index(comp[i][1], g.labels, path)] =
          label_or_index(comp[i][2], g.labels, path);
    }
  }
  g.inverse.assign(n, -1);
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) {
      if (g.comp[a][b] == g.rng[a] && g.comp[b][a] == g.src[a] && g.rng[a] >= 0) {
        g.inverse[a] = b;
        break;
      }
    }
  }
  g.validate();

  GroupoidLineBundle p;
  p.groupoid = g;
  p.sigma.assign(n, std::vector<cd>(n, cd(1.0)));
  if (doc.contains("cocycle") && !doc["cocycle"].is_null()) {
    const json& c = doc["cocycle"];
    if (!c.is_object()) throw InputError("cocycle maps \"(a,b)\" to circle values", json{{"path", "cocycle"}});
    for (auto it = c.begin(); it != c.end(); ++it) {
      const auto [a, b] = parse_slot(it.key(), g.labels, "cocycle");
      if (g.comp[a][b] < 0) throw InputError("cocycle value on a non-composable pair", json{{"path", "cocycle." + it.key()}});
      p.sigma[a][b] = circle_at(it.value(), "cocycle." + it.key());
    }
  }
  const json& fam = require(doc, "subsemigroup", "document");
  auto add_member = [&](const std::string& label, const json& arrows_json, const std::string& path) {
    if (!arrows_json.is_array()) throw InputError("bissections are lists of arrows", json{{"path", path}});
    std::vector<int> members;
    for (const auto& v : arrows_json) members.push_back(label_or_index(v, g.labels, path));
    std::sort(members.begin(), members.end());
    members.erase(std::unique(members.begin(), members.end()), members.end());
    p.bissections.push_back(members);
    p.bissection_labels.push_back(label);
  };
  if (fam.is_array()) {
    for (std::size_t i = 0; i < fam.size(); ++i) {
      std::string label = "B" + std::to_string(i);
      add_member(label, fam[i], "subsemigroup[" + std::to_string(i) + "]");
    }
  } else if (fam.is_object()) {
    for (auto it = fam.begin(); it != fam.end(); ++it) add_member(it.key(), it.value(), "subsemigroup." + it.key());
  } else {
    throw InputError("subsemigroup must be a list or a labelled map of bissections", json{{"path", "subsemigroup"}});
  }
  return p;
}

BundleDocument parse_document(const json& doc) {
  if (!doc.is_object()) throw InputError("document must be a JSON object");
  BundleDocument out;
  std::string kind;
  if (doc.contains("kind")) kind = string_at(doc["kind"], "kind");
  else if (doc.contains("groupoid")) kind = "groupoid_line_bundle";
  else kind = "twisted_action";

  if (doc.contains("grid")) {
    out.grid = doc["grid"].get<int>();
    if (out.grid < 3 || out.grid % 2 == 0) throw InputError("grid must be odd and at least 3", json{{"path", "grid"}});
  }
  if (doc.contains("expectation") && !doc["expectation"].is_null()) {
    ExpectationOptions e;
    const json& ej = doc["expectation"];
    if (ej.contains("grid")) e.grid = ej["grid"].get<int>();
    if (ej.contains("weight")) e.weight = string_at(ej["weight"], "expectation.weight");
    out.expectation = e;
  }

  if (kind == "groupoid_line_bundle") {
    out.kind = DocumentKind::GroupoidLineBundle;
    out.groupoid = parse_groupoid_line_bundle(doc);
    return out;
  }
  if (kind != "twisted_action") throw InputError("unknown document kind \"" + kind + "\"", json{{"path", "kind"}});

  const InverseSemigroup S = parse_semigroup(require(doc, "semigroup", "document"));
  Action action = parse_action(S, require(doc, "action", "document"));
  const int n = S.size();
  const json omega = doc.contains("omega") ? doc["omega"] : json::object();
  if (!omega.is_object()) throw InputError("omega maps \"(s,t)\" to value tables", json{{"path", "omega"}});

  if (action.space().kind() == SpaceKind::Interval) {
    out.kind = DocumentKind::IntervalAction;
    out.interval.omega.assign(static_cast<std::size_t>(n) * n, cd(1.0));
    for (auto it = omega.begin(); it != omega.end(); ++it) {
      const auto [s, t] = parse_slot(it.key(), S.labels(), "omega");
      out.interval.omega[s * n + t] = circle_at(it.value(), "omega." + it.key());
    }
    out.interval.action = std::move(action);
    return out;
  }

  out.kind = DocumentKind::TwistedAction;
  out.discrete.omega = trivial_omega(action);
  for (auto it = omega.begin(); it != omega.end(); ++it) {
    const auto [s, t] = parse_slot(it.key(), S.labels(), "omega");
    const std::string path = "omega." + it.key();
    if (!it.value().is_object()) throw InputError("omega values are {point: circle value}", json{{"path", path}});
    for (auto jt = it.value().begin(); jt != it.value().end(); ++jt) {
      const int x = label_or_index(json(jt.key()), action.space().point_labels(), path);
      out.discrete.omega[s * n + t][x] = circle_at(jt.value(), path + "." + jt.key());
    }
  }
  if (doc.contains("inverse_slots_normalized")) {
    out.discrete.inverse_slots_normalized = doc["inverse_slots_normalized"].get<bool>();
  }
  out.discrete.action = std::move(action);
  return out;
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open \"" + path + "\"", json{{"file", path}});
  std::stringstream buf;
  buf << in.rdbuf();
  try {
    return json::parse(buf.str());
  } catch (const json::parse_error& e) {
    throw InputError(std::string("JSON parse error: ") + e.what(), json{{"file", path}, {"byte", e.byte}});
  }
}

BundleDocument load_document(const std::string& path) {
  const json doc = read_json_file(path);
  try {
    return parse_document(doc);
  } catch (const json::exception& e) {
    throw InputError(std::string("malformed document: ") + e.what(), json{{"file", path}});
  }
}

std::vector<ParsedElement> parse_elements(const json& doc, const FellBundle& b, const LineBundle& l) {
  const json& list = doc.is_array() ? doc : require(doc, "elements", "elements");
  if (!list.is_array()) throw InputError("elements must be a list", json{{"path", "elements"}});
  const GermGroupoid& g = l.groupoid;
  std::vector<ParsedElement> out;
  for (std::size_t i = 0; i < list.size(); ++i) {
    const std::string path = "elements[" + std::to_string(i) + "]";
    const json& e = list[i];
    Section xi = zero_section(l);
    if (e.contains("terms")) {
      for (std::size_t k = 0; k < e["terms"].size(); ++k) {
        const json& term = e["terms"][k];
        const std::string tp = path + ".terms[" + std::to_string(k) + "]";
        const int s = label_or_index(require(term, "s", tp), b.sg.labels(), tp + ".s");
        const json& c = require(term, "c", tp);
        if (!c.is_array() || static_cast<int>(c.size()) != b.dim(s)) {
          throw InputError("coefficient list must match the fiber dimension", json{{"path", tp + ".c"}, {"dim", b.dim(s)}});
        }
        FiberElement a = b.zero(s);
        for (int j = 0; j < b.dim(s); ++j) a.c[j] = parse_complex(c[j]);
        xi += gelfand(b, l, a);
      }
    } else if (e.contains("section")) {
      for (std::size_t k = 0; k < e["section"].size(); ++k) {
        const json& v = e["section"][k];
        const std::string vp = path + ".section[" + std::to_string(k) + "]";
        const int s = label_or_index(require(v, "s", vp), b.sg.labels(), vp + ".s");
        const int x = label_or_index(require(v, "x", vp), b.points, vp + ".x");
        const int c = g.cell_of_point(x);
        const int germ = c < 0 ? -1 : g.germ_of(s, c);
        if (germ < 0) throw InputError("no germ [s,x] at this point", json{{"path", vp}});
        xi[germ] += parse_complex(require(v, "value", vp));
      }
    } else {
      throw InputError("element needs \"terms\" or \"section\"", json{{"path", path}});
    }
    out.push_back({xi, e});
  }
  return out;
}

}  // namespace germlab
