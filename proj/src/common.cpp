#include "germlab/common.hpp"

#include <cmath>
#include <numbers>

namespace germlab {

namespace {

boost::multiprecision::cpp_int parse_integer(const std::string& text, const std::string& whole) {
  if (text.empty()) throw InputError("empty integer in rational \"" + whole + "\"");
  std::size_t i = 0;
  if (text[0] == '-' || text[0] == '+') i = 1;
  if (i == text.size()) throw InputError("malformed rational \"" + whole + "\"");
  for (std::size_t k = i; k < text.size(); ++k) {
    if (text[k] < '0' || text[k] > '9') throw InputError("malformed rational \"" + whole + "\"");
  }
  boost::multiprecision::cpp_int v(text[0] == '+' ? text.substr(1) : text);
  return v;
}

}  // namespace

Rational parse_rational(const std::string& raw) {
  std::string text;
  for (char c : raw) {
    if (c != ' ') text.push_back(c);
  }
  auto slash = text.find('/');
  if (slash == std::string::npos) return Rational(parse_integer(text, raw));
  auto num = parse_integer(text.substr(0, slash), raw);
  auto den = parse_integer(text.substr(slash + 1), raw);
  if (den == 0) throw InputError("zero denominator in rational \"" + raw + "\"");
  if (den < 0) {
    num = -num;
    den = -den;
  }
  return Rational(num, den);
}

std::string format_rational(const Rational& q) {
  auto num = boost::multiprecision::numerator(q);
  auto den = boost::multiprecision::denominator(q);
  if (den == 1) return num.str();
  return num.str() + "/" + den.str();
}

double to_double(const Rational& q) { return q.convert_to<double>(); }

cd parse_complex(const json& value) {
  if (value.is_number()) return cd(value.get<double>(), 0.0);
  if (value.is_array() && value.size() == 2 && value[0].is_number() && value[1].is_number()) {
    return cd(value[0].get<double>(), value[1].get<double>());
  }
  throw InputError("expected a complex number [re, im]", value);
}

cd parse_circle(const json& value) {
  if (value.is_string()) {
    Rational turns = parse_rational(value.get<std::string>());
    // Reduce modulo 1 exactly before converting, so "3/4" and "-1/4" agree.
    auto num = boost::multiprecision::numerator(turns);
    auto den = boost::multiprecision::denominator(turns);
    boost::multiprecision::cpp_int r = num % den;
    if (r < 0) r += den;
    if (r == 0) return cd(1.0, 0.0);
    if (2 * r == den) return cd(-1.0, 0.0);
    if (4 * r == den) return cd(0.0, 1.0);
    if (4 * r == 3 * den) return cd(0.0, -1.0);
    double angle = 2.0 * std::numbers::pi * to_double(Rational(r, den));
    return std::polar(1.0, angle);
  }
  return parse_complex(value);
}

json complex_to_json(cd z) { return json::array({z.real(), z.imag()}); }

bool near(cd a, cd b, double tol) { return std::abs(a - b) <= tol; }

}  // namespace germlab
