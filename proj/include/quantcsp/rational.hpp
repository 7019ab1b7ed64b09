#pragma once

#include <cctype>
#include <cstdint>
#include <cstdlib>
#include <string>
#include <string_view>

#include <boost/multiprecision/cpp_int.hpp>

#include "quantcsp/errors.hpp"

namespace quantcsp {

using BigInt = boost::multiprecision::cpp_int;
/// Exact rational in lowest terms with positive denominator.
using Rational = boost::multiprecision::cpp_rational;

inline Rational make_rational(BigInt num, BigInt den) {
  if (den == 0)
    throw ContractViolation("rational with zero denominator");
  if (den < 0) {
    num = -num;
    den = -den;
  }
  return Rational(num, den);
}

inline BigInt numerator_of(const Rational &r) {
  return boost::multiprecision::numerator(r);
}
inline BigInt denominator_of(const Rational &r) {
  return boost::multiprecision::denominator(r);
}

namespace detail {

inline bool parse_integer(std::string_view s, BigInt &out) {
  if (s.empty())
    return false;
  std::size_t i = 0;
  bool neg = false;
  if (s[0] == '+' || s[0] == '-') {
    neg = s[0] == '-';
    i = 1;
  }
  if (i == s.size())
    return false;
  BigInt v = 0;
  for (; i < s.size(); ++i) {
    if (!std::isdigit(static_cast<unsigned char>(s[i])))
      return false;
    v = v * 10 + (s[i] - '0');
  }
  out = neg ? BigInt(-v) : v;
  return true;
}

} // namespace detail

/// Parses "p", "p/q" or a finite decimal such as "-1.25". Throws ParseError.
inline Rational parse_rational(std::string_view text) {
  auto fail = [&]() -> Rational {
    throw ParseError("malformed rational '" + std::string(text) + "'", 0, 0);
  };
  if (auto slash = text.find('/'); slash != std::string_view::npos) {
    BigInt n, d;
    if (!detail::parse_integer(text.substr(0, slash), n) ||
        !detail::parse_integer(text.substr(slash + 1), d) || d == 0)
      return fail();
    return make_rational(n, d);
  }
  if (auto dot = text.find('.'); dot != std::string_view::npos) {
    std::string digits(text.substr(0, dot));
    std::string_view frac = text.substr(dot + 1);
    if (frac.empty() || frac.find_first_not_of("0123456789") != std::string_view::npos)
      return fail();
    digits += frac;
    BigInt n;
    if (digits == "-" || digits == "+" || !detail::parse_integer(digits, n))
      return fail();
    BigInt den = boost::multiprecision::pow(BigInt(10), static_cast<unsigned>(frac.size()));
    return make_rational(n, den);
  }
  BigInt n;
  if (!detail::parse_integer(text, n))
    return fail();
  return Rational(n);
}

/// "p" for integers, "p/q" otherwise.
inline std::string to_string(const Rational &r) { return r.str(); }

/// Exact decimal rendering when the denominator has only factors 2 and 5;
/// returns false otherwise.
inline bool to_exact_decimal(const Rational &r, std::string &out) {
  BigInt den = denominator_of(r);
  unsigned twos = 0, fives = 0;
  while (den % 2 == 0) {
    den /= 2;
    ++twos;
  }
  while (den % 5 == 0) {
    den /= 5;
    ++fives;
  }
  if (den != 1)
    return false;
  unsigned places = std::max(twos, fives);
  BigInt scale = boost::multiprecision::pow(BigInt(10), places);
  BigInt scaled = numerator_of(r) * scale / denominator_of(r);
  bool neg = scaled < 0;
  if (neg)
    scaled = -scaled;
  std::string digits = scaled.str();
  if (places > 0) {
    if (digits.size() <= places)
      digits.insert(0, places - digits.size() + 1, '0');
    digits.insert(digits.size() - places, ".");
  }
  out = (neg ? "-" : "") + digits;
  return true;
}

/// Default guard for materialising hom sets. QUANTCSP_ENUM_LIMIT overrides.
inline std::uint64_t default_enum_limit() {
  if (const char *env = std::getenv("QUANTCSP_ENUM_LIMIT")) {
    char *end = nullptr;
    unsigned long long v = std::strtoull(env, &end, 10);
    if (end != env && *end == '\0' && v > 0)
      return v;
  }
  return 1'000'000;
}

/// Guard on inner iteration counts (graded polymorphism loops).
inline constexpr std::uint64_t kDefaultIterationLimit = 10'000'000;

} // namespace quantcsp
