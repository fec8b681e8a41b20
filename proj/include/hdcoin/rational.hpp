#pragma once

// Exact rational numbers for accuracy thresholds and split fractions.
// Consensus-relevant quantities are never carried as floats; a rational
// survives hashing, serialization and re-parsing bit-exactly.

#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>
#include <string_view>

namespace hdcoin {

struct Rational {
  std::int64_t num = 0;
  std::int64_t den = 1;

  constexpr Rational() = default;
  constexpr Rational(std::int64_t n, std::int64_t d) : num(n), den(d) {
    normalize();
  }

  constexpr void normalize() {
    if (den == 0) throw std::invalid_argument("Rational: zero denominator");
    if (den < 0) {
      num = -num;
      den = -den;
    }
    const std::int64_t g = std::gcd(num < 0 ? -num : num, den);
    if (g > 1) {
      num /= g;
      den /= g;
    }
    if (num == 0) den = 1;
  }

  [[nodiscard]] constexpr int compare(const Rational& other) const {
    const __int128 lhs = static_cast<__int128>(num) * other.den;
    const __int128 rhs = static_cast<__int128>(other.num) * den;
    if (lhs < rhs) return -1;
    if (lhs > rhs) return 1;
    return 0;
  }

  constexpr bool operator==(const Rational& o) const { return compare(o) == 0; }
  constexpr bool operator!=(const Rational& o) const { return compare(o) != 0; }
  constexpr bool operator<(const Rational& o) const { return compare(o) < 0; }
  constexpr bool operator<=(const Rational& o) const { return compare(o) <= 0; }
  constexpr bool operator>(const Rational& o) const { return compare(o) > 0; }
  constexpr bool operator>=(const Rational& o) const { return compare(o) >= 0; }

  [[nodiscard]] constexpr Rational operator-(const Rational& o) const {
    return Rational(num * o.den - o.num * den, den * o.den);
  }
  [[nodiscard]] constexpr Rational operator+(const Rational& o) const {
    return Rational(num * o.den + o.num * den, den * o.den);
  }

  [[nodiscard]] double to_double() const {
    return static_cast<double>(num) / static_cast<double>(den);
  }

  // Canonical text form "num/den", e.g. "17/20".
  [[nodiscard]] std::string to_string() const {
    return std::to_string(num) + "/" + std::to_string(den);
  }
};

inline Rational rational_max(const Rational& a, const Rational& b) {
  return a >= b ? a : b;
}

inline Rational rational_min(const Rational& a, const Rational& b) {
  return a <= b ? a : b;
}

// Parses "p/q", an integer "n", or a plain decimal like "0.85" (which becomes
// 85/100 before normalization). Scientific notation is rejected.
inline Rational parse_rational(std::string_view text) {
  if (text.empty()) throw std::invalid_argument("parse_rational: empty string");
  const auto bad = [&] {
    return std::invalid_argument("parse_rational: cannot parse '" + std::string(text) + "'");
  };
  const auto slash = text.find('/');
  if (slash != std::string_view::npos) {
    std::size_t pos_n = 0;
    std::size_t pos_d = 0;
    const std::string n_str(text.substr(0, slash));
    const std::string d_str(text.substr(slash + 1));
    std::int64_t n = 0;
    std::int64_t d = 0;
    try {
      n = std::stoll(n_str, &pos_n);
      d = std::stoll(d_str, &pos_d);
    } catch (const std::exception&) {
      throw bad();
    }
    if (pos_n != n_str.size() || pos_d != d_str.size()) throw bad();
    return Rational(n, d);
  }
  const auto dot = text.find('.');
  if (dot == std::string_view::npos) {
    const std::string n_str(text);
    std::size_t pos = 0;
    std::int64_t n = 0;
    try {
      n = std::stoll(n_str, &pos);
    } catch (const std::exception&) {
      throw bad();
    }
    if (pos != n_str.size()) throw bad();
    return Rational(n, 1);
  }
  const std::string_view int_part = text.substr(0, dot);
  const std::string_view frac_part = text.substr(dot + 1);
  if (frac_part.empty() || frac_part.size() > 18) throw bad();
  bool negative = false;
  std::string_view digits = int_part;
  if (!digits.empty() && (digits.front() == '-' || digits.front() == '+')) {
    negative = digits.front() == '-';
    digits.remove_prefix(1);
  }
  std::int64_t whole = 0;
  for (const char c : digits) {
    if (c < '0' || c > '9') throw bad();
    whole = whole * 10 + (c - '0');
  }
  std::int64_t frac = 0;
  std::int64_t scale = 1;
  for (const char c : frac_part) {
    if (c < '0' || c > '9') throw bad();
    frac = frac * 10 + (c - '0');
    scale *= 10;
  }
  const std::int64_t n = whole * scale + frac;
  return Rational(negative ? -n : n, scale);
}

}  // namespace hdcoin
