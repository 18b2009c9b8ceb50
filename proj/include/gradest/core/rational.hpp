#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cctype>
#include <cstdio>
#include <string>
#include <string_view>

#include "gradest/core/error.hpp"

namespace gradest {

/// Arbitrary precision rational used for all exponent bookkeeping.
using Rational = boost::multiprecision::cpp_rational;

inline double to_double(const Rational& r) { return r.convert_to<double>(); }

inline std::string to_string(const Rational& r) { return r.str(); }

/// Parses "7", "-5/2", "2.5" or "1e-3" exactly (decimal notation is read as a
/// terminating decimal, not via binary floating point).
inline Rational parse_rational(std::string_view text) {
  auto fail = [&] { throw ParameterError("not a rational number: '" + std::string(text) + "'"); };
  std::string s;
  for (char c : text)
    if (!std::isspace(static_cast<unsigned char>(c))) s.push_back(c);
  if (s.empty()) fail();

  if (auto slash = s.find('/'); slash != std::string::npos) {
    Rational num = parse_rational(s.substr(0, slash));
    Rational den = parse_rational(s.substr(slash + 1));
    if (den == 0) fail();
    return num / den;
  }

  std::size_t pos = 0;
  bool negative = false;
  if (s[pos] == '+' || s[pos] == '-') negative = s[pos++] == '-';
  boost::multiprecision::cpp_int digits = 0;
  long long scale = 0;
  bool seen_digit = false;
  bool after_point = false;
  for (; pos < s.size(); ++pos) {
    char c = s[pos];
    if (std::isdigit(static_cast<unsigned char>(c))) {
      digits = digits * 10 + (c - '0');
      if (after_point) --scale;
      seen_digit = true;
    } else if (c == '.' && !after_point) {
      after_point = true;
    } else {
      break;
    }
  }
  if (!seen_digit) fail();
  if (pos < s.size()) {
    if (s[pos] != 'e' && s[pos] != 'E') fail();
    ++pos;
    try {
      std::size_t used = 0;
      scale += std::stoll(s.substr(pos), &used);
      if (pos + used != s.size()) fail();
    } catch (const std::logic_error&) {
      fail();
    }
  }
  Rational value = digits;
  boost::multiprecision::cpp_int ten_pow = 1;
  for (long long i = 0; i < (scale < 0 ? -scale : scale); ++i) ten_pow *= 10;
  value = scale < 0 ? value / Rational(ten_pow) : value * Rational(ten_pow);
  return negative ? Rational(-value) : value;
}

/// Shortest decimal reading of a double (15 significant digits), so 0.1 maps to 1/10.
inline Rational rational_from_double(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.15g", x);
  return parse_rational(buf);
}

}  // namespace gradest
