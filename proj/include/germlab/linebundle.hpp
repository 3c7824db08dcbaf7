#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "germlab/common.hpp"
#include "germlab/fellbundle.hpp"
#include "germlab/germgpd.hpp"

namespace germlab {

// Coefficients of a finitely supported section of L, indexed by germ.
using Section = Eigen::VectorXcd;

enum class RefPolicy { First, Last };

// The Fell line bundle over the germ groupoid, stored as one reference
// element per germ together with the structure constants
//   ref(g) ref(h) = mulc(g,h) ref(gh)   and   ref(g)* = starc(g) ref(g^-1).
// References have unit norm; at unit germs they are the identity 1_x.
struct LineBundle {
  GermGroupoid groupoid;
  std::vector<FiberElement> refs;
  std::vector<cd> mulc;                         // [g * size + h] when composable
  std::vector<cd> starc;
  std::vector<std::array<int, 3>> composable;   // (g, h, gh)

  int size() const { return groupoid.size(); }
  cd mul_const(int g, int h) const { return mulc[static_cast<std::size_t>(g) * size() + h]; }
  json to_json(const FellBundle& b) const;
};

// Builds the line bundle over the germ groupoid of the canonical action.
// When verify_gauge is set the constants are recomputed with the other
// reference policy and compared through the expected coboundary. Throws
// Error NoReference or WellDefinednessViolation.
LineBundle build_line_bundle(const FellBundle& b, RefPolicy policy = RefPolicy::First, bool verify_gauge = true);
LineBundle build_line_bundle(const FellBundle& b, const GermGroupoid& g, RefPolicy policy = RefPolicy::First,
                             bool verify_gauge = true);

// λ with [a, t, x] = λ ref(germ), where the germ has source x and a lies in a
// fiber whose germ at x is `germ`.
cd coefficient(const FellBundle& b, const LineBundle& l, int germ, const FiberElement& a);

// Axioms of a line bundle on the stored constants: unimodularity,
// associativity, involutivity, (vw)* = w* v*, v* v = 1.
AxiomReport validate_line_bundle(const LineBundle& l);

struct LineElement {
  int germ = -1;
  cd lambda{0.0};
};
double line_norm(const FellBundle& b, const LineBundle& l, const LineElement& v);

// ------------------------------------------------------------------ sections

Section zero_section(const LineBundle& l);
Section convolve(const LineBundle& l, const Section& xi, const Section& eta);
Section involution(const LineBundle& l, const Section& xi);

// The coefficient function of â over O_s.
Section gelfand(const FellBundle& b, const LineBundle& l, const FiberElement& a);

// Linearity, isometry, multiplicativity, star and inclusion compatibility and
// fiberwise surjectivity of the Gelfand map.
AxiomReport verify_gelfand_iso(const FellBundle& b, const LineBundle& l, std::uint64_t seed = 0, int random_elements = 100);

// ------------------------------------------------------------------ twist

// Σ realized as T x G with (z,g)(w,h) = (z w mulc(g,h), gh).
struct TwistElement {
  cd z{1.0};
  int germ = -1;
};
TwistElement twist_mul(const LineBundle& l, const TwistElement& p, const TwistElement& q);
TwistElement twist_inverse(const LineBundle& l, const TwistElement& p);
TwistElement iota(const LineBundle& l, cd z, int cell);
int twist_projection(const TwistElement& p);
// The class of <a, s, x>: the unit-norm phase of [a, s, x].
TwistElement triple_class(const FellBundle& b, const LineBundle& l, const FiberElement& a, int x);

// Exactness, freeness, group structure and agreement with triple classes.
AxiomReport build_twist(const FellBundle& b, const LineBundle& l, std::uint64_t seed = 0);

// ------------------------------------------------------------------ round trip

// Rebuilds the twisted groupoid of the section bundle of a twisted groupoid
// and checks the explicit isomorphism back to the input. Throws Error
// NotWide when the family does not cover or interpolate.
json round_trip(const GroupoidLineBundle& input);

}  // namespace germlab
