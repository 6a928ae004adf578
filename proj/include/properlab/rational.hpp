#pragma once

#include <boost/multiprecision/gmp.hpp>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace properlab {

using Int = boost::multiprecision::mpz_int;
using Rat = boost::multiprecision::mpq_rational;

// Raised when a rational literal (or a structured-text file built from them)
// cannot be read. Distinct from invariant violations, which are ValidationError.
struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline double to_double(const Rat& r) { return r.convert_to<double>(); }

// Canonical text form: "p" when the denominator is 1, "p/q" otherwise.
inline std::string format_rational(const Rat& r) { return r.str(); }

namespace detail {

inline Int parse_integer(std::string_view s, std::string_view whole) {
  if (s.empty()) throw ParseError("empty integer in rational literal '" + std::string(whole) + "'");
  std::size_t i = (s[0] == '-' || s[0] == '+') ? 1 : 0;
  if (i == s.size()) throw ParseError("bare sign in rational literal '" + std::string(whole) + "'");
  for (; i < s.size(); ++i)
    if (s[i] < '0' || s[i] > '9')
      throw ParseError("bad digit in rational literal '" + std::string(whole) + "'");
  return Int(std::string(s));
}

}  // namespace detail

// Accepts "p/q", plain integers, and finite decimal expansions ("0.25").
// Decimals are read exactly as p / 10^k; anything else is a ParseError.
inline Rat parse_rational(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  if (s.empty()) throw ParseError("empty rational literal");

  if (auto slash = s.find('/'); slash != std::string_view::npos) {
    Int num = detail::parse_integer(s.substr(0, slash), s);
    Int den = detail::parse_integer(s.substr(slash + 1), s);
    if (den == 0) throw ParseError("zero denominator in '" + std::string(s) + "'");
    return Rat(num, den);
  }
  if (auto dot = s.find('.'); dot != std::string_view::npos) {
    std::string_view frac = s.substr(dot + 1);
    if (frac.empty()) throw ParseError("trailing dot in '" + std::string(s) + "'");
    std::string digits = std::string(s.substr(0, dot)) + std::string(frac);
    Int num = detail::parse_integer(digits, s);
    Int den = 1;
    for (std::size_t i = 0; i < frac.size(); ++i) den *= 10;
    return Rat(num, den);
  }
  return Rat(detail::parse_integer(s, s));
}

inline Rat rat_pow(Rat base, unsigned long e) {
  Rat out = 1;
  while (e) {
    if (e & 1) out *= base;
    base *= base;
    e >>= 1;
  }
  return out;
}

// Exact conversion; every binary64 value is a dyadic rational.
inline Rat rat_from_double(double x) {
  Rat r;
  mpq_set_d(r.backend().data(), x);
  return r;
}

}  // namespace properlab
