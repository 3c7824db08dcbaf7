#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "germlab/common.hpp"
#include "germlab/fellbundle.hpp"
#include "germlab/linebundle.hpp"

namespace germlab {

// Coordinates on C_c(A) = direct sum of the fibers: entry k is the coefficient
// of basis vector items[k] = (s, i).
struct AlgebraBasis {
  std::vector<std::pair<int, int>> items;
  std::vector<int> offset;  // offset[s] = first k with items[k].first == s

  explicit AlgebraBasis(const FellBundle& b);
  int size() const { return static_cast<int>(items.size()); }
  FiberElement element(const FellBundle& b, const Eigen::VectorXcd& v, int s) const;
  Eigen::VectorXcd embed(const FiberElement& a) const;
};

Eigen::VectorXcd algebra_mul(const FellBundle& b, const AlgebraBasis& basis, const Eigen::VectorXcd& x,
                             const Eigen::VectorXcd& y);
Eigen::VectorXcd algebra_star(const FellBundle& b, const AlgebraBasis& basis, const Eigen::VectorXcd& x);

// Ψ on C_c(A), as a (#germs x dim C_c(A)) matrix whose columns are Gelfand
// sections of the basis vectors.
Eigen::MatrixXcd psi_matrix(const FellBundle& b, const LineBundle& l, const AlgebraBasis& basis);
Section psi_map(const FellBundle& b, const LineBundle& l, const AlgebraBasis& basis, const Eigen::VectorXcd& x);

struct KernelReport {
  int algebra_dim = 0;
  int psi_rank = 0;
  int kernel_dim = 0;
  int ideal_dim = 0;
  bool ideal_in_kernel = true;
  bool kernel_in_ideal = true;
  bool equal = true;
  json to_json() const;
};

// ker Ψ against span{a δ_s - j_{t,s}(a) δ_t : s < t}, by rank and double
// containment.
KernelReport kernel_equals_ideal(const FellBundle& b, const LineBundle& l);

// ------------------------------------------------------------------ representations

// π_x on ℓ²(G_x); basis vectors are the germs with source x in index order.
struct Representation {
  int cell = -1;
  std::vector<int> basis;
  int position(int germ) const;
};

Representation regular_rep(const LineBundle& l, int cell);
Eigen::MatrixXcd rep_matrix(const LineBundle& l, const Representation& rep, const Section& xi);

// <π_x(ξ) δ_x, δ_x>.
cd state_phi_x(const LineBundle& l, int cell, const Section& xi);

// sup over units of the largest singular value of π_x(ξ). per_unit, when
// given, receives {unit label: norm}.
double reduced_norm(const LineBundle& l, const Section& xi, json* per_unit = nullptr);

// φ̃_{x0}(a) computed from the bundle alone: (a δ_{x0})(x0) when some
// idempotent e <= s has x0 in U_e, else 0.
cd state_phitilde(const FellBundle& b, int x0, const FiberElement& a);
cd state_phitilde(const FellBundle& b, const AlgebraBasis& basis, int x0, const Eigen::VectorXcd& x);

struct ReducedIsoReport {
  bool pass = true;
  std::vector<CheckResult> checks;
  int algebra_dim = 0;   // dimension of the image of C_c(L) in the direct sum of the π_x
  int center_dim = 0;
  json to_json() const;
};

ReducedIsoReport verify_reduced_iso(const FellBundle& b, const LineBundle& l, std::uint64_t seed = 0,
                                    int random_elements = 200);

// Dimension of the reduced algebra and of its center, computed from the
// regular representations.
std::pair<int, int> reduced_algebra_dimensions(const LineBundle& l);

// ------------------------------------------------------------------ expectation

// Restriction of a section to unit germs. Throws Error NotHausdorff.
Section expectation_onto_units(const LineBundle& l, const Section& xi);
AxiomReport verify_expectation(const LineBundle& l, std::uint64_t seed = 0, int random_elements = 50);

}  // namespace germlab
