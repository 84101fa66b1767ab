#pragma once

// Exact rational arithmetic (Boost.Multiprecision backend) plus the "n/d"
// text form used in JSON spec files and CLI coefficient tables.

#include <boost/multiprecision/cpp_int.hpp>

#include <cctype>
#include <stdexcept>
#include <string>
#include <string_view>

namespace multmean {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

namespace detail {

inline bool integer_token(std::string_view s) {
  if (!s.empty() && (s[0] == '+' || s[0] == '-')) s.remove_prefix(1);
  if (s.empty()) return false;
  for (char c : s)
    if (!std::isdigit(static_cast<unsigned char>(c))) return false;
  return true;
}

}  // namespace detail

// Accepts "n", "-n", or "n/d" with integer n, d and d != 0. No whitespace.
inline Rational parse_rational(std::string_view text) {
  auto bad = [&] {
    throw std::invalid_argument("parse_rational: malformed rational '" +
                                std::string(text) + "'");
  };
  size_t slash = text.find('/');
  if (slash == std::string_view::npos) {
    if (!detail::integer_token(text)) bad();
    return Rational(BigInt(std::string(text)));
  }
  std::string_view num = text.substr(0, slash);
  std::string_view den = text.substr(slash + 1);
  if (!detail::integer_token(num) || !detail::integer_token(den)) bad();
  BigInt d{std::string(den)};
  if (d == 0) throw std::invalid_argument("parse_rational: zero denominator");
  if (d < 0) bad();   // canonical form keeps the sign on the numerator
  return Rational(BigInt(std::string(num)), d);
}

// "n" when the (reduced) denominator is 1, otherwise "n/d".
inline std::string to_string(const Rational& r) {
  BigInt num = boost::multiprecision::numerator(r);
  BigInt den = boost::multiprecision::denominator(r);
  if (den == 1) return num.str();
  return num.str() + "/" + den.str();
}

inline double to_double(const Rational& r) {
  return r.template convert_to<double>();
}

}  // namespace multmean
