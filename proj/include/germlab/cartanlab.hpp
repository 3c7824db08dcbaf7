#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "germlab/common.hpp"
#include "germlab/fellbundle.hpp"
#include "germlab/germgpd.hpp"
#include "germlab/spaces.hpp"

namespace germlab {

// The semigroup {e, 1, σ} acting on [-1, 1] by identities with U_e = [-1, 0),
// its exact germ groupoid and the grid-sampled Fell bundle of coordinatewise
// functions.
struct DoubledPointExample {
  IntervalTwistedAction presentation;
  GermGroupoid groupoid;
  SampledBundle sampled;
  FellBundle grid_bundle;
  int e = 0, one = 1, sigma = 2;
};

DoubledPointExample build_doubled_point_example(int grid = 101);
IntervalTwistedAction doubled_point_presentation();

// Exact complex rationals, used where identities must hold without rounding.
struct QComplex {
  Rational re{0}, im{0};
  QComplex() = default;
  QComplex(Rational r, Rational i = 0) : re(std::move(r)), im(std::move(i)) {}
  bool operator==(const QComplex& o) const = default;
};
QComplex operator+(const QComplex& a, const QComplex& b);
QComplex operator-(const QComplex& a, const QComplex& b);
QComplex operator*(const QComplex& a, const QComplex& b);
QComplex conj(const QComplex& a);

// X' sampled on two levels: the lower level holds the n points of [-1, 1],
// the upper level the points with x >= 0. n must be odd so that 0 is a
// sample.
struct GridModel {
  int n = 101;
  std::vector<Rational> lower_x;
  std::vector<Rational> upper_x;
  int zero_index() const { return (n - 1) / 2; }
  static GridModel make(int n);
};

template <class T>
struct GridFunction {
  std::vector<T> lower;
  std::vector<T> upper;
};

// A piecewise-affine weight on [0, 1] read from text such as "1-x/2" or
// "[0,0]:1;(0,1]:1/2".
class WeightFunction {
 public:
  static WeightFunction parse(const std::string& spec);
  Rational operator()(const Rational& x) const;
  const std::string& spec() const { return spec_; }

 private:
  struct Part {
    Piece dom;
    Rational slope, offset;
  };
  std::vector<Part> parts_;
  std::string spec_;
};

inline cd scalar_from(const Rational& q, cd*) { return cd(to_double(q), 0.0); }
inline QComplex scalar_from(const Rational& q, QComplex*) { return QComplex(q); }

// E(g)(x, ·) = g(x,0) for x < 0 and p(x) g(x,0) + (1-p(x)) g(x,1) for x >= 0,
// on both levels. Throws Error ShapeMismatch.
template <class T>
GridFunction<T> expectation_E(const GridModel& gm, const GridFunction<T>& g, const WeightFunction& p) {
  if (static_cast<int>(g.lower.size()) != gm.n || g.upper.size() != gm.upper_x.size()) {
    throw Error("ShapeMismatch", "grid function does not match the grid",
                json{{"n", gm.n}, {"lower", g.lower.size()}, {"upper", g.upper.size()}});
  }
  GridFunction<T> out = g;
  const int z = gm.zero_index();
  for (std::size_t k = 0; k < gm.upper_x.size(); ++k) {
    const Rational w = p(gm.upper_x[k]);
    const T v = scalar_from(w, static_cast<T*>(nullptr)) * g.lower[z + k] +
                scalar_from(Rational(1) - w, static_cast<T*>(nullptr)) * g.upper[k];
    out.lower[z + k] = v;
    out.upper[k] = v;
  }
  return out;
}

GridFunction<cd> embed_fiber(const DoubledPointExample& ex, const GridModel& gm, const FiberElement& a);

// *-compatibility, isometry, joint multiplicativity, inclusion compatibility
// and spanning of the embeddings; E is the identity on the copy of A_1.
AxiomReport verify_embeddings(const DoubledPointExample& ex, const GridModel& gm, std::uint64_t seed = 0);

// Idempotence (exact), contractivity, positivity, bimodularity and
// faithfulness of E.
AxiomReport verify_conditional_expectation(const GridModel& gm, const WeightFunction& p, std::uint64_t seed = 0,
                                           int random_elements = 100);

// Full cartan-example report.
json cartan_example_report(int n, const std::string& weight, std::uint64_t seed = 0);

}  // namespace germlab
