#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "germlab/common.hpp"
#include "germlab/invsgp.hpp"
#include "germlab/spaces.hpp"

namespace germlab {

// An element of the fiber over s, stored by its coefficients against the
// fiber basis. For coordinate fibers basis vector i is the indicator of the
// point basis_point[s][i] of U_{s*s}.
struct FiberElement {
  int s = -1;
  Eigen::VectorXcd c;
};

// Structure constants of the product A_s x A_t -> A_st: entry (i, j) lists
// the nonzero coefficients of basis_i * basis_j.
struct ProductTable {
  int rows = 0;
  int cols = 0;
  std::vector<std::vector<std::pair<int, cd>>> entries;

  void init(int r, int c) {
    rows = r;
    cols = c;
    entries.assign(static_cast<std::size_t>(r) * c, {});
  }
  std::vector<std::pair<int, cd>>& at(int i, int j) { return entries[static_cast<std::size_t>(i) * cols + j]; }
  const std::vector<std::pair<int, cd>>& at(int i, int j) const {
    return entries[static_cast<std::size_t>(i) * cols + j];
  }
};

// A Fell bundle over a finite inverse semigroup with finite-dimensional
// fibers, held as structure constants. Data members are public so that
// tests can build hand-made bundles and apply mutations.
struct FellBundle {
  InverseSemigroup sg;
  std::vector<std::string> points;
  std::vector<std::vector<int>> basis_point;  // -1 for abstract basis vectors
  std::vector<ProductTable> products;         // index s * n + t
  std::vector<Eigen::MatrixXcd> stars;        // dim(s*) x dim(s), applied to conj(a)
  std::vector<Eigen::MatrixXcd> inclusions;   // index t * n + s when s <= t
  double zero_tol = 0.0;                      // threshold for (a*a)(x) > 0

  int n() const { return sg.size(); }
  int dim(int s) const { return static_cast<int>(basis_point[s].size()); }
  int num_points() const { return static_cast<int>(points.size()); }
  bool coordinate_fiber(int s) const;
  int basis_index_at(int s, int x) const;  // -1 when x is not a basis point

  FiberElement basis(int s, int i) const;
  FiberElement zero(int s) const;
  FiberElement mul(const FiberElement& a, const FiberElement& b) const;
  FiberElement star(const FiberElement& a) const;
  FiberElement include(int t, const FiberElement& a) const;
  bool has_inclusion(int t, int s) const;
  // Value at x of an element of a coordinate fiber.
  cd value_at(const FiberElement& d, int x) const;
  // (a* a)(x) for a in A_s and x in U_{s*s}.
  double square_at(const FiberElement& a, int x) const;
  double norm(const FiberElement& a) const;
  // Points of U_e, read off the coordinate fiber A_e.
  std::vector<int> unit_support(int e) const;
};

FiberElement operator+(const FiberElement& a, const FiberElement& b);
FiberElement operator-(const FiberElement& a, const FiberElement& b);
FiberElement operator*(cd z, const FiberElement& a);
double distance(const FiberElement& a, const FiberElement& b);

// ------------------------------------------------------------------ presentations

// Functions on U_{s*s} with (a·b)(x) = a(θ_t x) b(x) ω(s,t)(x).
struct TwistedAction {
  Action action;                          // discrete model
  std::vector<std::vector<cd>> omega;     // [s*n+t][x], 1 where unspecified
  bool inverse_slots_normalized = true;   // require ω(s,s*) = 1
};

std::vector<std::vector<cd>> trivial_omega(const Action& action);

// Throws Error with codes CocycleNotUnimodular, CocycleNotNormalized,
// CocycleNotAssociative, each with the witnessing slot.
void check_cocycle(const TwistedAction& p);

enum class BuildCheck { Full, None };

// With BuildCheck::None the cocycle is not inspected; validate_axioms is then
// the only safeguard (used by mutation tests).
FellBundle build_bundle(const TwistedAction& p, BuildCheck check = BuildCheck::Full);

// Exact interval-model presentation with constant cocycle values.
struct IntervalTwistedAction {
  Action action;             // interval model
  std::vector<cd> omega;     // [s*n+t]
};

struct SampledBundle {
  TwistedAction presentation;       // discrete model on the sample points
  std::vector<Rational> samples;    // sample point coordinates
};

// Samples each component at `grid` equally spaced points, adds the orbit of
// those points under the action, and restricts the presentation to them.
SampledBundle sample_interval(const IntervalTwistedAction& p, int grid = 101);

// A finite groupoid with units as distinguished arrows.
struct FiniteGroupoid {
  std::vector<std::string> labels;
  std::vector<int> src, rng;                 // unit arrows
  std::vector<int> units;                    // arrow indices of units
  std::vector<std::vector<int>> comp;        // comp[a][b] = ab or -1
  std::vector<int> inverse;

  int size() const { return static_cast<int>(labels.size()); }
  bool is_unit(int a) const { return src[a] == a; }
  int index_of(const std::string& label) const;
  // Throws Error NotAGroupoid with a witness.
  void validate() const;
};

// Circle-valued 2-cocycle on composable pairs, a family of bissections, and
// the Fell bundle of sections over it.
struct GroupoidLineBundle {
  FiniteGroupoid groupoid;
  std::vector<std::vector<cd>> sigma;                  // [a][b], composable pairs
  std::vector<std::vector<int>> bissections;           // sorted arrow sets
  std::vector<std::string> bissection_labels;
};

struct GroupoidBundleData {
  GroupoidLineBundle closed;      // family after closure
  TwistedAction presentation;     // over the unit space
  // arrow_of[U][x] is the arrow of bissection U with source x, or -1.
  std::vector<std::vector<int>> arrow_of;
};
// Closes the family under products and inverses (new members get labels
// "[a,b,...]"), checks it is a bissection family, checks the cocycle and
// returns the twisted-action form of the section bundle over the units.
// Throws Error with codes NotABissection, CocycleNotNormalized,
// CocycleNotAssociative, CocycleNotUnimodular.
GroupoidBundleData groupoid_bundle(const GroupoidLineBundle& p);
void check_groupoid_cocycle(const FiniteGroupoid& g, const std::vector<std::vector<cd>>& sigma);

// ------------------------------------------------------------------ checks

struct CheckResult {
  std::string name;
  bool pass = true;
  json witness = nullptr;
};

struct AxiomReport {
  bool pass = true;
  std::vector<CheckResult> checks;
  json to_json() const;
  const CheckResult* first_failure() const;
};

// Axioms (i)-(ix) on basis elements and a few seeded random combinations.
AxiomReport validate_axioms(const FellBundle& b, std::uint64_t seed = 0);

bool is_semi_abelian(const FellBundle& b, json* witness = nullptr);
bool is_saturated(const FellBundle& b, json* witness = nullptr);

// The unique partial map with (a* d a)(x) = (a* a)(x) d(θ_a x). Throws
// Error NotSemiAbelian or NoSolution.
PartialHomeo theta_from_element(const FellBundle& b, const FiberElement& a);
// Glue of θ_a over the basis of A_s. Throws GluingConflict or NotSaturated.
PartialHomeo theta_s(const FellBundle& b, int s);
// The action of S on the spectrum points, glued and validated.
Action canonical_action(const FellBundle& b);

// a ≡_x a2 iff ((a - a2)*(a - a2))(x) = 0. Throws FiberMismatch.
bool eqx(const FellBundle& b, const FiberElement& a, const FiberElement& a2, int x);

json element_to_json(const FellBundle& b, const FiberElement& a);

}  // namespace germlab
