#include "germlab/invsgp.hpp"

#include <set>

namespace germlab {

InverseSemigroup InverseSemigroup::validate(std::vector<std::string> labels,
                                            std::vector<std::vector<int>> table,
                                            std::optional<int> zero) {
  const int n = static_cast<int>(labels.size());
  if (static_cast<int>(table.size()) != n) {
    throw InputError("multiplication table has " + std::to_string(table.size()) +
                     " rows for " + std::to_string(n) + " elements");
  }
  std::set<std::string> seen;
  for (const auto& l : labels) {
    if (!seen.insert(l).second) throw InputError("duplicate element label \"" + l + "\"");
  }
  for (int a = 0; a < n; ++a) {
    if (static_cast<int>(table[a].size()) != n) {
      throw InputError("row " + std::to_string(a) + " of the multiplication table has wrong length");
    }
    for (int b = 0; b < n; ++b) {
      if (table[a][b] < 0 || table[a][b] >= n) {
        throw InputError("table entry out of range", json{{"row", a}, {"column", b}});
      }
    }
  }
  if (zero && (*zero < 0 || *zero >= n)) throw InputError("zero index out of range");

  auto lab = [&](int i) { return labels[i]; };

  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) {
      const int ab = table[a][b];
      for (int c = 0; c < n; ++c) {
        if (table[ab][c] != table[a][table[b][c]]) {
          throw Error("NotAssociative",
                      "(" + lab(a) + lab(b) + ")" + lab(c) + " != " + lab(a) + "(" + lab(b) + lab(c) + ")",
                      json{{"a", lab(a)}, {"b", lab(b)}, {"c", lab(c)},
                           {"left", lab(table[ab][c])}, {"right", lab(table[a][table[b][c]])}});
        }
      }
    }
  }

  std::vector<int> star(n, -1);
  for (int s = 0; s < n; ++s) {
    std::vector<int> inverses;
    for (int t = 0; t < n; ++t) {
      if (table[table[s][t]][s] == s && table[table[t][s]][t] == t) inverses.push_back(t);
    }
    if (inverses.size() != 1) {
      json cands = json::array();
      for (int t : inverses) cands.push_back(lab(t));
      throw Error("NoUniqueInverse", "element " + lab(s) + " has " + std::to_string(inverses.size()) + " inverses",
                  json{{"s", lab(s)}, {"inverses", cands}});
    }
    star[s] = inverses[0];
  }

  std::vector<int> idem;
  for (int s = 0; s < n; ++s) {
    if (table[s][s] == s) idem.push_back(s);
  }
  for (int e : idem) {
    for (int f : idem) {
      if (table[e][f] != table[f][e]) {
        throw Error("IdempotentsDoNotCommute", lab(e) + lab(f) + " != " + lab(f) + lab(e),
                    json{{"e", lab(e)}, {"f", lab(f)}});
      }
    }
  }

  if (zero) {
    for (int s = 0; s < n; ++s) {
      if (table[*zero][s] != *zero || table[s][*zero] != *zero) {
        throw Error("ZeroNotAbsorbing", "declared zero does not absorb " + lab(s),
                    json{{"zero", lab(*zero)}, {"s", lab(s)}});
      }
    }
  }

  InverseSemigroup S;
  S.labels_ = std::move(labels);
  S.table_ = std::move(table);
  S.star_ = std::move(star);
  S.idempotents_ = std::move(idem);
  S.zero_ = zero;
  S.order_.assign(n, std::vector<bool>(n, false));
  for (int s = 0; s < n; ++s) {
    const int ss = S.table_[S.star_[s]][s];
    for (int t = 0; t < n; ++t) S.order_[s][t] = (S.table_[t][ss] == s);
  }
  return S;
}

int InverseSemigroup::index_of(const std::string& label) const {
  for (int i = 0; i < size(); ++i) {
    if (labels_[i] == label) return i;
  }
  throw InputError("unknown semigroup element \"" + label + "\"");
}

bool congruent_at_zero(const InverseSemigroup& S, int s, int t) {
  if (!S.zero()) throw Error("NoZeroElement", "the continuity relation needs a zero element");
  const int z = *S.zero();
  if (S.src(s) != S.src(t)) return false;
  const int ss = S.src(s);
  for (int f : S.idempotents()) {
    if (f == z || !S.leq(f, ss)) continue;
    bool found = false;
    for (int e : S.idempotents()) {
      if (e == z || !S.leq(e, f)) continue;
      if (S.mul(s, e) == S.mul(t, e)) {
        found = true;
        break;
      }
    }
    if (!found) return false;
  }
  return true;
}

ContinuityResult is_continuous(const InverseSemigroup& S) {
  if (!S.zero()) throw Error("NoZeroElement", "the continuity predicate needs a zero element");
  ContinuityResult r;
  for (int s = 0; s < S.size(); ++s) {
    for (int t = s + 1; t < S.size(); ++t) {
      if (congruent_at_zero(S, s, t)) {
        r.continuous = false;
        r.witness = std::make_pair(s, t);
        return r;
      }
    }
  }
  return r;
}

}  // namespace germlab
