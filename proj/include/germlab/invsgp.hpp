#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "germlab/common.hpp"

namespace germlab {

// A finite inverse semigroup given by its multiplication table. Elements are
// indices 0..n-1 in input order; labels are kept for reporting.
class InverseSemigroup {
 public:
  InverseSemigroup() = default;

  // Exhaustively checks associativity, uniqueness of inverses, commutation
  // of idempotents and (if declared) absorption by zero. Throws Error with
  // codes NotAssociative, NoUniqueInverse, IdempotentsDoNotCommute,
  // ZeroNotAbsorbing; throws InputError for a malformed table.
  static InverseSemigroup validate(std::vector<std::string> labels,
                                   std::vector<std::vector<int>> table,
                                   std::optional<int> zero = std::nullopt);

  int size() const { return static_cast<int>(labels_.size()); }
  int mul(int s, int t) const { return table_[s][t]; }
  int star(int s) const { return star_[s]; }
  bool is_idempotent(int s) const { return table_[s][s] == s; }
  const std::vector<int>& idempotents() const { return idempotents_; }
  // Natural partial order: s <= t iff s = t (s* s).
  bool leq(int s, int t) const { return order_[s][t]; }
  std::optional<int> zero() const { return zero_; }

  const std::string& label(int s) const { return labels_[s]; }
  const std::vector<std::string>& labels() const { return labels_; }
  int index_of(const std::string& label) const;
  const std::vector<std::vector<int>>& table() const { return table_; }

  // Source and range idempotents.
  int src(int s) const { return mul(star(s), s); }
  int rng(int s) const { return mul(s, star(s)); }

 private:
  std::vector<std::string> labels_;
  std::vector<std::vector<int>> table_;
  std::vector<int> star_;
  std::vector<int> idempotents_;
  std::vector<std::vector<bool>> order_;
  std::optional<int> zero_;
};

// s ≡ t iff s*s = t*t and every nonzero idempotent f <= s*s dominates a
// nonzero idempotent e <= f with se = te. Requires a zero element.
bool congruent_at_zero(const InverseSemigroup& S, int s, int t);

struct ContinuityResult {
  bool continuous = true;
  std::optional<std::pair<int, int>> witness;
};

// Throws Error("NoZeroElement") when S has no declared zero.
ContinuityResult is_continuous(const InverseSemigroup& S);

}  // namespace germlab
