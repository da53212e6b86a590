#pragma once

// Exact rational arithmetic on top of GMP, plus the handful of helpers the
// rest of the library needs (parsing, formatting, powers, binomials).

#include <gmpxx.h>

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <string>
#include <string_view>

#include "pcover/error.hpp"

namespace pcover {

using Rational = mpq_class;
using Integer = mpz_class;

inline Rational make_rational(long num, unsigned long den = 1) {
  Rational r(num, den);
  r.canonicalize();
  return r;
}

/// Parses "a/b", "-7", "0.125", "1e-9", "2.5E+3" exactly (no binary rounding).
inline Rational parse_rational(std::string_view text) {
  auto trim = [](std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
  };
  text = trim(text);
  if (text.empty()) throw InputError("empty rational literal");

  if (auto slash = text.find('/'); slash != std::string_view::npos) {
    Integer num, den;
    if (num.set_str(std::string(trim(text.substr(0, slash))), 10) != 0 ||
        den.set_str(std::string(trim(text.substr(slash + 1))), 10) != 0) {
      throw InputError("malformed rational literal '" + std::string(text) + "'");
    }
    if (den == 0) throw InputError("zero denominator in '" + std::string(text) + "'");
    Rational r(num, den);
    r.canonicalize();
    return r;
  }

  // Decimal with optional exponent.
  std::string digits;
  bool negative = false;
  long exponent = 0;
  std::size_t i = 0;
  if (text[i] == '+' || text[i] == '-') {
    negative = text[i] == '-';
    ++i;
  }
  bool seen_digit = false;
  bool seen_point = false;
  for (; i < text.size(); ++i) {
    char c = text[i];
    if (std::isdigit(static_cast<unsigned char>(c))) {
      digits.push_back(c);
      seen_digit = true;
      if (seen_point) --exponent;
    } else if (c == '.' && !seen_point) {
      seen_point = true;
    } else {
      break;
    }
  }
  if (!seen_digit) throw InputError("malformed rational literal '" + std::string(text) + "'");
  if (i < text.size()) {
    if (text[i] != 'e' && text[i] != 'E') {
      throw InputError("malformed rational literal '" + std::string(text) + "'");
    }
    ++i;
    long e = 0;
    auto tail = text.substr(i);
    if (!tail.empty() && tail.front() == '+') tail.remove_prefix(1);
    auto [ptr, ec] = std::from_chars(tail.data(), tail.data() + tail.size(), e);
    if (ec != std::errc() || ptr != tail.data() + tail.size()) {
      throw InputError("malformed exponent in '" + std::string(text) + "'");
    }
    exponent += e;
  }
  Integer mantissa(digits, 10);
  if (negative) mantissa = -mantissa;
  Integer scale;
  mpz_ui_pow_ui(scale.get_mpz_t(), 10, static_cast<unsigned long>(exponent < 0 ? -exponent : exponent));
  Rational r = exponent < 0 ? Rational(mantissa, scale) : Rational(mantissa * scale, 1);
  r.canonicalize();
  return r;
}

/// Converts a double through its shortest round-trip decimal form, so 0.1
/// becomes 1/10 rather than the nearest binary fraction.
inline Rational rational_from_double(double value) {
  if (!std::isfinite(value)) throw InputError("non-finite number where a rational was expected");
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  if (ec != std::errc()) throw InputError("cannot format number");
  return parse_rational(std::string_view(buf, static_cast<std::size_t>(ptr - buf)));
}

/// "num/den", or just "num" for integers.
inline std::string to_string(const Rational& r) { return r.get_str(); }

inline double to_double(const Rational& r) { return r.get_d(); }

/// Long-double conversion that survives magnitudes below DBL_MIN.
inline long double to_long_double(const Rational& r) {
  if (r == 0) return 0.0L;
  long exp_num = 0, exp_den = 0;
  double mn = mpz_get_d_2exp(&exp_num, r.get_num_mpz_t());
  double md = mpz_get_d_2exp(&exp_den, r.get_den_mpz_t());
  return std::ldexp(static_cast<long double>(mn) / md, static_cast<int>(exp_num - exp_den));
}

inline Integer pow_integer(unsigned long base, unsigned long exponent) {
  Integer out;
  mpz_ui_pow_ui(out.get_mpz_t(), base, exponent);
  return out;
}

inline Rational pow(const Rational& base, long exponent) {
  Integer num, den;
  unsigned long e = static_cast<unsigned long>(exponent < 0 ? -exponent : exponent);
  mpz_pow_ui(num.get_mpz_t(), base.get_num_mpz_t(), e);
  mpz_pow_ui(den.get_mpz_t(), base.get_den_mpz_t(), e);
  if (exponent < 0) {
    if (num == 0) throw InputError("zero raised to a negative power");
    std::swap(num, den);
  }
  Rational r(num, den);
  r.canonicalize();
  return r;
}

inline Integer binomial(unsigned long n, unsigned long k) {
  Integer out;
  if (k > n) return Integer(0);
  mpz_bin_uiui(out.get_mpz_t(), n, k);
  return out;
}

inline Integer factorial(unsigned long n) {
  Integer out;
  mpz_fac_ui(out.get_mpz_t(), n);
  return out;
}

inline Integer floor(const Rational& r) {
  Integer out;
  mpz_fdiv_q(out.get_mpz_t(), r.get_num_mpz_t(), r.get_den_mpz_t());
  return out;
}

inline Integer ceil(const Rational& r) {
  Integer out;
  mpz_cdiv_q(out.get_mpz_t(), r.get_num_mpz_t(), r.get_den_mpz_t());
  return out;
}

inline std::uint64_t to_u64(const Integer& z) {
  if (z < 0 || mpz_sizeinbase(z.get_mpz_t(), 2) > 63) throw InputError("integer out of range");
  return static_cast<std::uint64_t>(z.get_ui());
}

inline void require_probability(const Rational& p, const char* what = "p") {
  if (p <= 0 || p >= 1) {
    throw InputError(std::string(what) + " must lie strictly between 0 and 1, got " + to_string(p));
  }
}

}  // namespace pcover
