#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cctype>
#include <optional>
#include <string>
#include <string_view>

namespace blowup {

/// Signed arbitrary-precision integer used for every weight and label.
using Integer = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

inline std::string to_string(const Integer& value) { return value.str(); }

/// Parses an optionally signed decimal integer. Rejects anything else
/// (no whitespace, no leading '+', no empty digit run).
inline std::optional<Integer> parse_integer(std::string_view text) {
  std::size_t pos = 0;
  if (pos < text.size() && text[pos] == '-') ++pos;
  if (pos == text.size()) return std::nullopt;
  for (std::size_t i = pos; i < text.size(); ++i) {
    if (!std::isdigit(static_cast<unsigned char>(text[i]))) return std::nullopt;
  }
  return Integer(std::string(text));
}

inline Integer abs(const Integer& value) { return value < 0 ? Integer(-value) : value; }

inline Integer gcd(Integer a, Integer b) {
  a = abs(a);
  b = abs(b);
  while (b != 0) {
    Integer r = a % b;
    a = std::move(b);
    b = std::move(r);
  }
  return a;
}

/// num / den. The two-argument cpp_rational constructor rejects negative
/// denominators in some Boost releases, so the sign is moved first.
inline Rational make_rational(const Integer& num, const Integer& den) {
  return den < 0 ? Rational(Integer(-num), Integer(-den)) : Rational(num, den);
}

inline bool is_integral(const Rational& value) {
  return boost::multiprecision::denominator(value) == 1;
}

inline Integer to_integer(const Rational& value) {
  return boost::multiprecision::numerator(value);
}

}  // namespace blowup
