#pragma once

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <limits>
#include <string>
#include <string_view>

#include <boost/rational.hpp>

#include "prunex/errors.hpp"

namespace prunex {

/// Exact value type for feature values and thresholds.
using Rational = boost::rational<std::int64_t>;

namespace detail {

inline std::int64_t parse_int64(std::string_view digits, std::string_view context) {
  if (digits.empty()) throw ParseError("empty number in '" + std::string(context) + "'");
  std::int64_t v = 0;
  for (char c : digits) {
    if (!std::isdigit(static_cast<unsigned char>(c)))
      throw ParseError("not a number: '" + std::string(context) + "'");
    if (v > (std::numeric_limits<std::int64_t>::max() - (c - '0')) / 10)
      throw ParseError("number out of range: '" + std::string(context) + "'");
    v = v * 10 + (c - '0');
  }
  return v;
}

inline std::int64_t pow10(int e, std::string_view context) {
  std::int64_t p = 1;
  for (int i = 0; i < e; ++i) {
    if (p > std::numeric_limits<std::int64_t>::max() / 10)
      throw ParseError("number out of range: '" + std::string(context) + "'");
    p *= 10;
  }
  return p;
}

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

}  // namespace detail

/// Parses "p/q", an integer, or a decimal with optional exponent ("-1.25e2")
/// into an exact rational. Throws ParseError on anything else.
inline Rational parse_rational(std::string_view text) {
  const std::string_view s = detail::trim(text);
  if (s.empty()) throw ParseError("empty number");
  if (auto slash = s.find('/'); slash != std::string_view::npos) {
    std::string_view num = detail::trim(s.substr(0, slash));
    std::string_view den = detail::trim(s.substr(slash + 1));
    bool neg = false;
    if (!num.empty() && (num.front() == '-' || num.front() == '+')) {
      neg = num.front() == '-';
      num.remove_prefix(1);
    }
    std::int64_t n = detail::parse_int64(num, s);
    std::int64_t d = detail::parse_int64(den, s);
    if (d == 0) throw ParseError("zero denominator in '" + std::string(s) + "'");
    return Rational(neg ? -n : n, d);
  }

  std::string_view rest = s;
  bool neg = false;
  if (rest.front() == '-' || rest.front() == '+') {
    neg = rest.front() == '-';
    rest.remove_prefix(1);
  }
  int exponent = 0;
  if (auto e = rest.find_first_of("eE"); e != std::string_view::npos) {
    std::string_view exp = rest.substr(e + 1);
    rest = rest.substr(0, e);
    bool exp_neg = false;
    if (!exp.empty() && (exp.front() == '-' || exp.front() == '+')) {
      exp_neg = exp.front() == '-';
      exp.remove_prefix(1);
    }
    std::int64_t ev = detail::parse_int64(exp, s);
    if (ev > 18) throw ParseError("exponent out of range: '" + std::string(s) + "'");
    exponent = static_cast<int>(exp_neg ? -ev : ev);
  }
  std::string digits;
  int frac_digits = 0;
  if (auto dot = rest.find('.'); dot != std::string_view::npos) {
    digits = std::string(rest.substr(0, dot));
    std::string_view frac = rest.substr(dot + 1);
    digits += frac;
    frac_digits = static_cast<int>(frac.size());
    if (digits.empty()) throw ParseError("not a number: '" + std::string(s) + "'");
  } else {
    digits = std::string(rest);
  }
  // Leading zeros would otherwise count against the overflow guard.
  std::size_t nz = digits.find_first_not_of('0');
  std::string_view significant =
      nz == std::string::npos ? std::string_view("0") : std::string_view(digits).substr(nz);
  std::int64_t mantissa = detail::parse_int64(significant, s);
  int scale = frac_digits - exponent;
  Rational r = scale >= 0 ? Rational(mantissa, detail::pow10(scale, s))
                          : Rational(mantissa) * detail::pow10(-scale, s);
  return neg ? -r : r;
}

/// Exact "p/q" rendering; integers render as "p/1".
inline std::string to_fraction_string(const Rational& r) {
  return std::to_string(r.numerator()) + "/" + std::to_string(r.denominator());
}

/// Short rendering: "p" for integers, terminating decimals as decimals,
/// everything else as "p/q". parse_rational() inverts it exactly.
inline std::string to_short_string(const Rational& r) {
  if (r.denominator() == 1) return std::to_string(r.numerator());
  std::int64_t den = r.denominator();
  int twos = 0;
  int fives = 0;
  while (den % 2 == 0) {
    den /= 2;
    ++twos;
  }
  while (den % 5 == 0) {
    den /= 5;
    ++fives;
  }
  int places = std::max(twos, fives);
  if (den != 1 || places > 15) return to_fraction_string(r);
  std::int64_t scale = 1;
  for (int i = 0; i < places; ++i) scale *= 10;
  // Fits: |num| * scale / den stays within the original magnitude budget for
  // the values produced by parse_rational.
  __int128 scaled = static_cast<__int128>(r.numerator()) * scale / r.denominator();
  bool neg = scaled < 0;
  if (neg) scaled = -scaled;
  std::string digits;
  while (scaled > 0) {
    digits.insert(digits.begin(), static_cast<char>('0' + static_cast<int>(scaled % 10)));
    scaled /= 10;
  }
  while (static_cast<int>(digits.size()) <= places) digits.insert(digits.begin(), '0');
  digits.insert(digits.end() - places, '.');
  return neg ? "-" + digits : digits;
}

inline Rational midpoint(const Rational& a, const Rational& b) { return (a + b) / 2; }

}  // namespace prunex
