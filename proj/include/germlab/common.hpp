#pragma once

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>
#include <json.hpp>

namespace germlab {

using cd = std::complex<double>;
using Rational = boost::multiprecision::cpp_rational;
using json = nlohmann::json;

// Numerical tolerances shared by the algebraic checks.
inline constexpr double kCoordTol = 1e-12;
inline constexpr double kRankTol = 1e-10;

// A failure that names a concrete witness. `code` is a stable identifier such
// as "NotAssociative"; `witness` is a JSON object that can be re-checked
// against the input alone.
class Error : public std::runtime_error {
 public:
  Error(std::string code, const std::string& message, json witness = nullptr)
      : std::runtime_error(code + ": " + message),
        code_(std::move(code)),
        witness_(std::move(witness)) {}

  const std::string& code() const { return code_; }
  const json& witness() const { return witness_; }

 private:
  std::string code_;
  json witness_;
};

// Malformed input (bad JSON shape, unknown labels, unparsable numbers).
class InputError : public Error {
 public:
  explicit InputError(const std::string& message, json location = nullptr)
      : Error("InputError", message, std::move(location)) {}
};

Rational parse_rational(const std::string& text);
std::string format_rational(const Rational& q);
double to_double(const Rational& q);

// Circle values are written either as an angle fraction "k/n" (meaning
// exp(2 pi i k/n)) or as a complex pair [re, im].
cd parse_circle(const json& value);
cd parse_complex(const json& value);
json complex_to_json(cd z);

bool near(cd a, cd b, double tol = kCoordTol);

}  // namespace germlab
