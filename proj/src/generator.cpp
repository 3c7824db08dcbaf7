#include "germlab/generator.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <numeric>
#include <random>

#include "germlab/germgpd.hpp"
#include "germlab/invsgp.hpp"
#include "germlab/spaces.hpp"

namespace germlab {

namespace {

using Map = std::vector<int>;  // partial bijection as a table, -1 = undefined

Map compose_maps(const Map& s, const Map& t) {
  Map out(t.size(), -1);
  for (std::size_t x = 0; x < t.size(); ++x) {
    if (t[x] >= 0) out[x] = s[t[x]];
  }
  return out;
}

Map invert_map(const Map& s) {
  Map out(s.size(), -1);
  for (std::size_t x = 0; x < s.size(); ++x) {
    if (s[x] >= 0) out[s[x]] = static_cast<int>(x);
  }
  return out;
}

// Closure under composition and inversion; empty result when it exceeds cap.
std::vector<Map> close_maps(const std::vector<Map>& gens, int cap) {
  std::vector<Map> all;
  std::map<Map, int> seen;
  auto add = [&](const Map& m) {
    if (seen.count(m)) return true;
    seen[m] = static_cast<int>(all.size());
    all.push_back(m);
    return static_cast<int>(all.size()) <= cap;
  };
  for (const auto& g : gens) {
    if (!add(g) || !add(invert_map(g))) return {};
  }
  for (std::size_t done = 0; done < all.size(); ++done) {
    for (std::size_t j = 0; j <= done; ++j) {
      const Map a = all[done], b = all[j];
      if (!add(compose_maps(a, b)) || !add(compose_maps(b, a))) return {};
    }
  }
  return all;
}

std::string point_name(int x) { return "x" + std::to_string(x); }

json discrete_document(const std::string& name, const std::vector<std::string>& labels,
                       const std::vector<std::vector<int>>& mul, const json& zero,
                       const std::vector<std::string>& points, const std::vector<Map>& theta, const json& omega) {
  json th = json::object();
  for (std::size_t s = 0; s < labels.size(); ++s) {
    json m = json::object();
    for (std::size_t x = 0; x < points.size(); ++x) {
      if (theta[s][x] >= 0) m[points[x]] = points[theta[s][x]];
    }
    th[labels[s]] = m;
  }
  json sg{{"elements", labels}, {"mul", mul}};
  if (!zero.is_null()) sg["zero"] = zero;
  return json{{"kind", "twisted_action"},
              {"name", name},
              {"semigroup", sg},
              {"action", {{"space", {{"kind", "discrete"}, {"points", points}}}, {"theta", th}}},
              {"omega", omega}};
}

std::vector<std::vector<int>> table_of(const std::vector<Map>& maps) {
  std::map<Map, int> index;
  for (std::size_t i = 0; i < maps.size(); ++i) index[maps[i]] = static_cast<int>(i);
  std::vector<std::vector<int>> mul(maps.size(), std::vector<int>(maps.size()));
  for (std::size_t s = 0; s < maps.size(); ++s) {
    for (std::size_t t = 0; t < maps.size(); ++t) mul[s][t] = index.at(compose_maps(maps[s], maps[t]));
  }
  return mul;
}

}  // namespace

json random_fixture(std::uint64_t seed, int max_elements, int num_points) {
  if (max_elements < 1 || max_elements > kMaxGeneratedElements) {
    throw InputError("max_elements must lie in [1, 16]", json{{"max_elements", max_elements}});
  }
  if (num_points < 1 || num_points > kMaxGeneratedPoints) {
    throw InputError("num_points must lie in [1, 32]", json{{"num_points", num_points}});
  }
  std::mt19937_64 rng(seed);
  auto uniform = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };

  std::vector<Map> maps;
  for (int attempt = 0; attempt < 64 && maps.empty(); ++attempt) {
    const int num_gens = attempt < 32 ? uniform(2, 3) : 1;
    std::vector<Map> gens;
    for (int k = 0; k < num_gens; ++k) {
      std::vector<int> dom(num_points), img(num_points);
      std::iota(dom.begin(), dom.end(), 0);
      std::iota(img.begin(), img.end(), 0);
      std::shuffle(dom.begin(), dom.end(), rng);
      std::shuffle(img.begin(), img.end(), rng);
      // Partial identities give the idempotent semilattice some shape and
      // cycles give germs that compose nontrivially; both keep the closure
      // small. The third kind is an arbitrary small partial bijection.
      const int kind = uniform(0, 2);
      Map m(num_points, -1);
      if (kind == 0) {
        const int d = uniform(1, num_points);
        for (int i = 0; i < d; ++i) m[dom[i]] = dom[i];
      } else if (kind == 1 && num_points >= 2) {
        const int d = uniform(2, std::min(num_points, 4));
        for (int i = 0; i < d; ++i) m[dom[i]] = dom[(i + 1) % d];
      } else {
        const int d = uniform(1, std::min(num_points, attempt < 32 ? 3 : 2));
        for (int i = 0; i < d; ++i) m[dom[i]] = img[i];
      }
      gens.push_back(m);
    }
    maps = close_maps(gens, max_elements);
    // Early attempts insist on a semigroup with some room in it.
    if (attempt < 48 && static_cast<int>(maps.size()) < std::min(max_elements, 4)) maps.clear();
  }
  if (maps.empty()) {
    // A single partial identity always closes to one element.
    Map m(num_points, -1);
    m[0] = 0;
    maps = {m};
  }

  std::vector<std::string> labels;
  json zero = nullptr;
  int k = 0;
  for (const auto& m : maps) {
    if (std::all_of(m.begin(), m.end(), [](int v) { return v < 0; })) {
      labels.push_back("0");
      zero = "0";
    } else {
      labels.push_back("s" + std::to_string(k++));
    }
  }
  const auto mul = table_of(maps);
  std::vector<std::string> points;
  for (int x = 0; x < num_points; ++x) points.push_back(point_name(x));

  // Germ function with values in Z/8; the cocycle is its coboundary.
  std::vector<PartialHomeo> theta;
  for (const auto& m : maps) theta.push_back(PartialHomeo::from_table(m));
  std::optional<int> zero_index;
  if (!zero.is_null()) zero_index = static_cast<int>(std::find(labels.begin(), labels.end(), "0") - labels.begin());
  const InverseSemigroup S = InverseSemigroup::validate(labels, mul, zero_index);
  const Action action = Action::validate(S, Space::discrete(points), theta);
  const GermGroupoid g = GermGroupoid::build(action);
  std::vector<int> c(g.size(), -1);
  for (int germ = 0; germ < g.size(); ++germ) {
    if (c[germ] >= 0) continue;
    const int inv = g.inverse(germ);
    if (g.is_unit(germ)) {
      c[germ] = 0;
    } else if (inv == germ) {
      c[germ] = 4 * uniform(0, 1);
    } else {
      c[germ] = uniform(0, 7);
      c[inv] = (8 - c[germ]) % 8;
    }
  }
  const int n = S.size();
  json omega = json::object();
  for (int s = 0; s < n; ++s) {
    for (int t = 0; t < n; ++t) {
      const int st = S.mul(s, t);
      json values = json::object();
      for (int x = 0; x < num_points; ++x) {
        const auto tx = theta[t].apply(x);
        if (!tx || !theta[s].apply(*tx)) continue;
        const int gs = g.germ_of(s, g.cell_of_point(*tx));
        const int gt = g.germ_of(t, g.cell_of_point(x));
        const int gst = g.germ_of(st, g.cell_of_point(x));
        const int m = ((c[gs] + c[gt] - c[gst]) % 8 + 8) % 8;
        if (m != 0) values[points[x]] = std::to_string(m) + "/8";
      }
      if (!values.empty()) omega["(" + labels[s] + "," + labels[t] + ")"] = values;
    }
  }
  json doc = discrete_document("random", labels, mul, zero, points, maps, omega);
  doc["seed"] = seed;
  return doc;
}

// ------------------------------------------------------------------ built-ins

namespace {

json z2_flip() {
  return discrete_document("z2-flip", {"1", "sigma"}, {{0, 1}, {1, 0}}, nullptr, {"a", "b"}, {{0, 1}, {1, 0}},
                           json::object());
}

json semilattice() {
  return discrete_document("semilattice", {"0", "1"}, {{0, 0}, {0, 1}}, "0", {"x0", "x1"}, {{0, -1}, {0, 1}},
                           json::object());
}

json group_zero() {
  return discrete_document("group-zero", {"0", "1", "g"}, {{0, 0, 0}, {0, 1, 2}, {0, 2, 1}}, "0", {"p"},
                           {{-1}, {0}, {0}}, json::object());
}

json zero_bundle() {
  return discrete_document("zero-bundle", {"0", "1"}, {{0, 0}, {0, 1}}, "0", {}, {{}, {}}, json::object());
}

json doubled_point() {
  json whole = json::array({json{{"dom", "[-1,1]"}, {"slope", "1"}, {"offset", "0"}}});
  return json{{"kind", "twisted_action"},
              {"name", "doubled-point"},
              {"semigroup", {{"elements", {"e", "1", "sigma"}}, {"mul", {{0, 0, 0}, {0, 1, 2}, {0, 2, 1}}}}},
              {"action",
               {{"space", {{"kind", "interval"}, {"components", json::array({json::array({"-1", "1"})})}}},
                {"theta",
                 {{"e", json::array({json{{"dom", "[-1,0)"}, {"slope", "1"}, {"offset", "0"}}})},
                  {"1", whole},
                  {"sigma", whole}}}}},
              {"omega", json::object()},
              {"grid", 101},
              {"expectation", {{"grid", 101}, {"weight", "1-x/2"}}}};
}

// Pair groupoid on each block times a finite abelian group, with the
// bilinear cocycle exp(2 pi i sum_{p,q} B[p][q] g_p h_q / d).
struct GroupoidShape {
  std::string name;
  std::vector<int> blocks;          // number of points per block
  std::vector<int> orders;          // cyclic factors of the group
  std::vector<std::vector<int>> B;  // bilinear form numerators
  int d = 1;
};

json groupoid_document(const GroupoidShape& shape) {
  std::vector<std::vector<int>> elems{{}};
  for (int m : shape.orders) {
    std::vector<std::vector<int>> next;
    for (const auto& e : elems) {
      for (int v = 0; v < m; ++v) {
        auto f = e;
        f.push_back(v);
        next.push_back(f);
      }
    }
    elems = next;
  }
  auto group_label = [](const std::vector<int>& g) {
    std::string s;
    for (std::size_t i = 0; i < g.size(); ++i) s += (i ? "." : "") + std::to_string(g[i]);
    return s.empty() ? std::string("0") : s;
  };
  struct Arrow {
    int i, j, g;
  };
  std::vector<Arrow> arrows;
  std::vector<std::string> labels;
  std::map<std::tuple<int, int, int>, int> index;
  int base = 0;
  std::vector<std::vector<int>> block_points;
  for (int size : shape.blocks) {
    std::vector<int> pts;
    for (int k = 0; k < size; ++k) pts.push_back(base + k);
    base += size;
    block_points.push_back(pts);
  }
  // Units first so that they come first in input order.
  for (const auto& pts : block_points) {
    for (int i : pts) {
      index[{i, i, 0}] = static_cast<int>(arrows.size());
      arrows.push_back({i, i, 0});
    }
  }
  for (const auto& pts : block_points) {
    for (int i : pts) {
      for (int j : pts) {
        for (int g = 0; g < static_cast<int>(elems.size()); ++g) {
          if (i == j && g == 0) continue;
          index[{i, j, g}] = static_cast<int>(arrows.size());
          arrows.push_back({i, j, g});
        }
      }
    }
  }
  for (const auto& a : arrows) labels.push_back(std::to_string(a.i) + "-" + std::to_string(a.j) + ":" + group_label(elems[a.g]));
  auto add = [&](int g, int h) {
    std::vector<int> s(shape.orders.size());
    for (std::size_t p = 0; p < s.size(); ++p) s[p] = (elems[g][p] + elems[h][p]) % shape.orders[p];
    return static_cast<int>(std::find(elems.begin(), elems.end(), s) - elems.begin());
  };
  auto turns = [&](int g, int h) {
    int num = 0;
    for (std::size_t p = 0; p < shape.orders.size(); ++p) {
      for (std::size_t q = 0; q < shape.orders.size(); ++q) num += shape.B[p][q] * elems[g][p] * elems[h][q];
    }
    num = ((num % shape.d) + shape.d) % shape.d;
    return num;
  };

  json arrows_json = json::array();
  for (const auto& a : arrows) {
    arrows_json.push_back({{"label", labels[index.at({a.i, a.j, a.g})]},
                           {"rng", labels[index.at({a.i, a.i, 0})]},
                           {"src", labels[index.at({a.j, a.j, 0})]}});
  }
  json comp = json::array();
  json cocycle = json::object();
  for (const auto& a : arrows) {
    for (const auto& b : arrows) {
      if (a.j != b.i) continue;
      const int ab = index.at({a.i, b.j, add(a.g, b.g)});
      const std::string la = labels[index.at({a.i, a.j, a.g})], lb = labels[index.at({b.i, b.j, b.g})];
      comp.push_back({la, lb, labels[ab]});
      const int t = turns(a.g, b.g);
      if (t != 0) cocycle["(" + la + "," + lb + ")"] = std::to_string(t) + "/" + std::to_string(shape.d);
    }
  }

  // Singletons, the unit space, and for each block and group element the
  // global bissections {(i, i, g)} and {(i, i+1 mod n, g)}.
  json family = json::object();
  for (std::size_t k = 0; k < arrows.size(); ++k) family["{" + labels[k] + "}"] = json::array({labels[k]});
  json unit_space = json::array();
  for (const auto& a : arrows) {
    if (a.i == a.j && a.g == 0) unit_space.push_back(labels[index.at({a.i, a.i, 0})]);
  }
  family["units"] = unit_space;
  for (std::size_t bi = 0; bi < block_points.size(); ++bi) {
    const auto& pts = block_points[bi];
    for (int g = 0; g < static_cast<int>(elems.size()); ++g) {
      for (int shift : {0, 1}) {
        if (shift == 1 && pts.size() < 2) continue;
        if (shift == 0 && g == 0) continue;
        json member = json::array();
        for (std::size_t k = 0; k < pts.size(); ++k) {
          member.push_back(labels[index.at({pts[k], pts[(k + shift) % pts.size()], g})]);
        }
        family["block" + std::to_string(bi) + "/shift" + std::to_string(shift) + "/" + group_label(elems[g])] = member;
      }
    }
  }
  return json{{"kind", "groupoid_line_bundle"},
              {"name", shape.name},
              {"groupoid", {{"arrows", arrows_json}, {"comp", comp}}},
              {"cocycle", cocycle},
              {"subsemigroup", family}};
}

const std::vector<GroupoidShape>& groupoid_shapes() {
  static const std::vector<GroupoidShape> shapes{
      {"rt-pair2", {2}, {}, {}, 1},
      {"rt-z2", {1}, {2}, {{0}}, 1},
      {"rt-z4-cocycle", {1}, {4}, {{1}}, 4},
      {"rt-z3", {1}, {3}, {{0}}, 1},
      {"rt-pair3", {3}, {}, {}, 1},
      {"rt-units2", {1, 1}, {}, {}, 1},
      {"rt-pair2-z2-sign", {2}, {2}, {{1}}, 2},
      {"rt-klein-cocycle", {1}, {2, 2}, {{0, 1}, {0, 0}}, 2},
      {"rt-pair2-z4-cocycle", {2}, {4}, {{1}}, 4},
      {"rt-two-z2", {1, 1}, {2}, {{1}}, 2},
  };
  return shapes;
}

}  // namespace

std::vector<std::string> builtin_fixture_names() {
  return {"z2-flip", "semilattice", "group-zero", "zero-bundle", "doubled-point"};
}

std::vector<std::string> round_trip_fixture_names() {
  std::vector<std::string> out;
  for (const auto& s : groupoid_shapes()) out.push_back(s.name);
  return out;
}

json builtin_fixture(const std::string& name) {
  if (name == "z2-flip") return z2_flip();
  if (name == "semilattice") return semilattice();
  if (name == "group-zero") return group_zero();
  if (name == "zero-bundle") return zero_bundle();
  if (name == "doubled-point") return doubled_point();
  for (const auto& s : groupoid_shapes()) {
    if (s.name == name) return groupoid_document(s);
  }
  throw InputError("unknown fixture \"" + name + "\"");
}

}  // namespace germlab
