#pragma once

// Exact values of the form sum_k r_k * e^k with rational r_k.
//
// Poissonized cover costs are products of (e N mu(x))^k / k!, i.e. a rational
// times a power of e. Sums of them are polynomials in e. Because e is
// transcendental, a nonzero polynomial never evaluates to zero, so comparisons
// terminate by refining rational enclosures of e.

#include <cmath>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "pcover/rational.hpp"

namespace pcover {

/// Rational bounds lo < e < hi from the truncated exponential series.
struct EBounds {
  Rational lo;
  Rational hi;
};

inline EBounds e_bounds(unsigned terms) {
  // sum_{k<=m} 1/k! < e < sum_{k<=m} 1/k! + 1/(m! m)
  Rational sum = 0;
  Integer fact = 1;
  for (unsigned k = 0; k <= terms; ++k) {
    if (k > 0) fact *= k;
    sum += Rational(1, fact);
  }
  Rational hi = sum + Rational(1, fact * terms);
  hi.canonicalize();
  return {sum, hi};
}

class EPoly {
 public:
  EPoly() = default;
  EPoly(const Rational& constant) {  // NOLINT: implicit by intent
    if (constant != 0) terms_[0] = constant;
  }

  /// coef * e^power
  static EPoly term(const Rational& coef, int power) {
    EPoly out;
    if (coef != 0) out.terms_[power] = coef;
    return out;
  }

  const std::map<int, Rational>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }

  EPoly& operator+=(const EPoly& other) {
    for (const auto& [k, c] : other.terms_) {
      auto& slot = terms_[k];
      slot += c;
      if (slot == 0) terms_.erase(k);
    }
    return *this;
  }
  EPoly& operator-=(const EPoly& other) {
    for (const auto& [k, c] : other.terms_) {
      auto& slot = terms_[k];
      slot -= c;
      if (slot == 0) terms_.erase(k);
    }
    return *this;
  }
  EPoly& operator*=(const Rational& s) {
    if (s == 0) {
      terms_.clear();
      return *this;
    }
    for (auto& [k, c] : terms_) c *= s;
    return *this;
  }
  friend EPoly operator+(EPoly a, const EPoly& b) { return a += b; }
  friend EPoly operator-(EPoly a, const EPoly& b) { return a -= b; }
  friend EPoly operator*(EPoly a, const Rational& s) { return a *= s; }
  friend EPoly operator*(const EPoly& a, const EPoly& b) {
    EPoly out;
    for (const auto& [ka, ca] : a.terms_) {
      for (const auto& [kb, cb] : b.terms_) out += term(ca * cb, ka + kb);
    }
    return out;
  }

  long double approx() const {
    long double v = 0;
    for (const auto& [k, c] : terms_) v += to_long_double(c) * std::exp(static_cast<long double>(k));
    return v;
  }

  /// Enclosure [lo, hi] of the value given rational bounds on e.
  std::pair<Rational, Rational> enclose(const EBounds& eb) const {
    Rational lo = 0, hi = 0;
    for (const auto& [k, c] : terms_) {
      Rational a = pow(eb.lo, k), b = pow(eb.hi, k);
      if (a > b) std::swap(a, b);
      if (c >= 0) {
        lo += c * a;
        hi += c * b;
      } else {
        lo += c * b;
        hi += c * a;
      }
    }
    return {lo, hi};
  }

  /// Sign of the exact value: -1, 0, +1.
  int sign() const {
    if (terms_.empty()) return 0;
    if (terms_.size() == 1 && terms_.begin()->first == 0) return sgn(terms_.begin()->second);
    if (terms_.size() == 1) return sgn(terms_.begin()->second);
    long double magnitude = 0, value = 0;
    for (const auto& [k, c] : terms_) {
      long double t = to_long_double(c) * std::exp(static_cast<long double>(k));
      value += t;
      magnitude += std::fabs(t);
    }
    if (std::isfinite(value) && std::fabs(value) > 1e-9L * magnitude) return value > 0 ? 1 : -1;
    for (unsigned m = 24;; m *= 2) {
      auto [lo, hi] = enclose(e_bounds(m));
      if (lo > 0) return 1;
      if (hi < 0) return -1;
    }
  }

  std::string to_string() const {
    if (terms_.empty()) return "0";
    std::string out;
    for (const auto& [k, c] : terms_) {
      if (!out.empty()) out += " + ";
      out += pcover::to_string(c);
      if (k != 0) out += "*e^" + std::to_string(k);
    }
    return out;
  }

  friend bool operator==(const EPoly& a, const EPoly& b) { return a.terms_ == b.terms_; }

 private:
  std::map<int, Rational> terms_;
};

inline int compare(const EPoly& a, const EPoly& b) { return (a - b).sign(); }
inline bool operator<(const EPoly& a, const EPoly& b) { return compare(a, b) < 0; }
inline bool operator<=(const EPoly& a, const EPoly& b) { return compare(a, b) <= 0; }

inline int compare(const Rational& a, const Rational& b) { return cmp(a, b) < 0 ? -1 : (cmp(a, b) > 0 ? 1 : 0); }
inline int compare(double a, double b) { return a < b ? -1 : (a > b ? 1 : 0); }
inline int compare(long double a, long double b) { return a < b ? -1 : (a > b ? 1 : 0); }

}  // namespace pcover
