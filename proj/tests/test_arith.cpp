#include <cmath>
#include <set>

#include <gtest/gtest.h>

#include "pcover/epoly.hpp"
#include "pcover/error.hpp"
#include "pcover/rational.hpp"
#include "pcover/rng.hpp"

using namespace pcover;

TEST(Rational, ParsesFractionsDecimalsAndExponents) {
  EXPECT_EQ(parse_rational("1/8"), Rational(1, 8));
  EXPECT_EQ(parse_rational(" -6/4 "), Rational(-3, 2));
  EXPECT_EQ(parse_rational("0.125"), Rational(1, 8));
  EXPECT_EQ(parse_rational("1e-9"), Rational(1, 1000000000));
  EXPECT_EQ(parse_rational("2.5E+3"), Rational(2500));
  EXPECT_EQ(rational_from_double(0.1), Rational(1, 10));
}

TEST(Rational, RejectsMalformedLiterals) {
  for (const char* bad : {"", "1/0", "abc", "1.2.3", "1e", "3/x"}) {
    EXPECT_THROW(parse_rational(bad), InputError) << bad;
  }
  EXPECT_THROW(require_probability(Rational(0)), InputError);
  EXPECT_THROW(require_probability(Rational(1)), InputError);
  EXPECT_NO_THROW(require_probability(Rational(1, 2)));
}

TEST(Rational, BinomialMatchesPascalTriangle) {
  std::vector<std::vector<Integer>> row(41);
  for (std::size_t n = 0; n <= 40; ++n) {
    row[n].assign(n + 1, 1);
    for (std::size_t k = 1; k < n; ++k) row[n][k] = row[n - 1][k - 1] + row[n - 1][k];
    for (std::size_t k = 0; k <= n; ++k) ASSERT_EQ(binomial(n, k), row[n][k]) << n << " " << k;
  }
}

TEST(Rational, PowerFloorCeil) {
  EXPECT_EQ(pow(Rational(2, 3), 3), Rational(8, 27));
  EXPECT_EQ(pow(Rational(2, 3), -2), Rational(9, 4));
  EXPECT_EQ(pow(Rational(5), 0), Rational(1));
  EXPECT_EQ(floor(Rational(-7, 2)), Integer(-4));
  EXPECT_EQ(ceil(Rational(-7, 2)), Integer(-3));
  EXPECT_EQ(floor(Rational(6, 3)), Integer(2));
  EXPECT_EQ(factorial(10), Integer(3628800));
}

TEST(EPoly, EnclosureContainsE) {
  // Double precision resolves the enclosure only for short series.
  for (unsigned m : {3U, 5U, 8U}) {
    const auto b = e_bounds(m);
    EXPECT_LT(b.lo.get_d(), std::exp(1.0));
    EXPECT_GT(b.hi.get_d(), std::exp(1.0));
  }
  // Longer series give nested enclosures.
  for (unsigned m = 3; m < 30; ++m) {
    const auto a = e_bounds(m), b = e_bounds(m + 1);
    EXPECT_LE(a.lo, b.lo);
    EXPECT_GE(a.hi, b.hi);
    EXPECT_LT(b.lo, b.hi);
  }
}

TEST(EPoly, KnownComparisons) {
  const EPoly e = EPoly::term(1, 1);
  EXPECT_GT(compare(e, EPoly(Rational(271, 100))), 0);
  EXPECT_LT(compare(e, EPoly(Rational(272, 100))), 0);
  EXPECT_EQ(compare(e * e, EPoly::term(1, 2)), 0);
  // e^2/4 <= e^2/2 and 1 <= e^2/4
  EXPECT_LT(compare(EPoly::term(Rational(1, 4), 2), EPoly::term(Rational(1, 2), 2)), 0);
  EXPECT_LT(compare(EPoly(Rational(1)), EPoly::term(Rational(1, 4), 2)), 0);
}

// Property: the exact sign agrees with long double evaluation whenever the
// floating value is far from zero.
TEST(EPoly, SignAgreesWithFloatingEvaluation) {
  CounterRng rng(11, 1);
  int checked = 0;
  for (int trial = 0; trial < 2000; ++trial) {
    EPoly a;
    long double value = 0;
    const int terms = 1 + static_cast<int>(rng.below(4));
    for (int k = 0; k < terms; ++k) {
      const long num = static_cast<long>(rng.below(41)) - 20;
      const unsigned long den = 1 + rng.below(12);
      const int power = static_cast<int>(rng.below(5)) - 1;
      a += EPoly::term(Rational(num, den), power);
      value += static_cast<long double>(num) / den * std::pow(std::exp(1.0L), power);
    }
    if (std::fabs(value) < 1e-9L) continue;
    ++checked;
    ASSERT_EQ(a.sign(), value > 0 ? 1 : -1) << a.to_string();
    ASSERT_NEAR(static_cast<double>(a.approx()), static_cast<double>(value), 1e-9 * (1 + std::fabs((double)value)));
  }
  EXPECT_GT(checked, 1500);
}

TEST(Rng, StreamsAreReproducibleAndDistinct) {
  CounterRng a(7, 3), b(7, 3), c(7, 4);
  std::set<std::uint64_t> seen;
  for (int i = 0; i < 100; ++i) {
    const auto x = a();
    EXPECT_EQ(x, b());
    seen.insert(x);
    seen.insert(c());
  }
  EXPECT_EQ(seen.size(), 200U);
}

TEST(Rng, BelowIsUniformEnough) {
  CounterRng rng(5, 9);
  std::vector<int> hist(6, 0);
  const int draws = 60000;
  for (int i = 0; i < draws; ++i) ++hist[rng.below(6)];
  // Each cell ~ Bin(60000, 1/6): sd ~ 91; allow 5 sd.
  for (int h : hist) EXPECT_NEAR(h, draws / 6, 460);
}
