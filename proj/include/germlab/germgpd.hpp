#pragma once

#include <optional>
#include <string>
#include <vector>

#include "germlab/common.hpp"
#include "germlab/fellbundle.hpp"
#include "germlab/spaces.hpp"

namespace germlab {

// A piece of the partition of X on which the germ pattern is constant. For
// the discrete model every cell is a point; for the interval model a cell is
// either a breakpoint or an open gap between consecutive breakpoints.
struct Cell {
  int point = -1;   // discrete model
  Piece piece;      // interval model
  bool is_point_cell = true;
  Rational sample;  // a representative coordinate (interval model)
};

// The germ [s, x] with s the first element in input order among the
// representatives of its class.
struct Germ {
  int s = -1;
  int cell = -1;
};

class GermGroupoid {
 public:
  static GermGroupoid build(const Action& action);

  const Action& action() const { return action_; }
  const InverseSemigroup& semigroup() const { return action_.semigroup(); }
  int num_cells() const { return static_cast<int>(cells_.size()); }
  const Cell& cell(int c) const { return cells_[c]; }
  int size() const { return static_cast<int>(germs_.size()); }
  const Germ& germ(int g) const { return germs_[g]; }
  int source(int g) const { return germs_[g].cell; }
  int range(int g) const { return range_[g]; }
  int inverse(int g) const { return inverse_[g]; }
  // gh when s(g) = r(h), otherwise -1.
  int compose(int g, int h) const { return compose_[static_cast<std::size_t>(g) * size() + h]; }
  bool is_unit(int g) const { return is_unit_[g]; }
  // The unit germ over a cell, or -1 when the cell lies in no U_e.
  int unit_at(int c) const { return unit_at_[c]; }
  // The germ [s, c] or -1 when c is outside dom θ_s.
  int germ_of(int s, int c) const { return germ_of_[static_cast<std::size_t>(s) * num_cells() + c]; }
  // Germs with source c, in index order.
  const std::vector<int>& source_fiber(int c) const { return source_fiber_[c]; }

  // The cell holding a point of the discrete model or a rational coordinate.
  int cell_of_point(int x) const;
  int cell_of(const Rational& x) const;

  // [s,x] = [t,x]: some idempotent e has x in U_e and se = te.
  bool germ_equal(int s, int t, int c) const;

  json cell_to_json(int c) const;
  json germ_to_json(int g) const;
  json to_json() const;

 private:
  Action action_;
  std::vector<Cell> cells_;
  std::vector<Germ> germs_;
  std::vector<int> range_, inverse_, compose_, unit_at_, germ_of_;
  std::vector<bool> is_unit_;
  std::vector<std::vector<int>> source_fiber_;
};

struct HausdorffReport {
  bool hausdorff = true;
  // Every non-separated pair of germs sharing a point cell.
  std::vector<std::pair<int, int>> non_separated;
  json to_json(const GermGroupoid& g) const;
};

// Germs [s,x] != [t,x] fail to separate iff x lies in the closure of
// E_{s,t} = union of U_e over idempotents e with se = te.
HausdorffReport is_hausdorff(const GermGroupoid& g);

// O_s as a sorted list of germ indices.
std::vector<int> bissection_Os(const GermGroupoid& g, int s);
// O_s O_t = O_{st} and O_s^{-1} = O_{s*} for all s, t.
CheckResult verify_bissection_identities(const GermGroupoid& g);

std::vector<int> germ_set_product(const GermGroupoid& g, const std::vector<int>& u, const std::vector<int>& v);
std::vector<int> germ_set_inverse(const GermGroupoid& g, const std::vector<int>& u);

struct WideReport {
  bool wide = true;
  bool covering = true;
  bool interpolation = true;
  json witness = nullptr;
  json to_json() const;
};

// Throws Error NotABissection when a member repeats a source or a range.
WideReport is_wide(const GermGroupoid& g, const std::vector<std::vector<int>>& family,
                   const std::vector<std::string>& labels);

struct InjectivityReport {
  bool injective = true;
  std::optional<std::pair<int, int>> witness;  // s != t with O_s = O_t
  std::optional<bool> continuous;              // null without a zero element
  bool semi_faithful = false;
  std::optional<bool> zero_fiber_trivial;      // U_0 empty, null without zero
  bool hypotheses_hold = false;
  bool contradiction = false;                  // hypotheses hold, map not injective
  json to_json(const InverseSemigroup& S) const;
};

InjectivityReport map_s_to_Os_injective(const GermGroupoid& g);

}  // namespace germlab
