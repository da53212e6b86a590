#include <cmath>

#include <gtest/gtest.h>

#include "pcover/generators.hpp"
#include "pcover/selector.hpp"

using namespace pcover;

namespace {

Rational sup_over(const LambdaCollection& lam, unsigned mask) {
  Rational best = 0;
  bool first = true;
  for (const auto& s : lam.seqs) {
    Rational v = 0;
    for (std::size_t i = 0; i < lam.n; ++i) {
      if (mask >> i & 1U) v += s[i];
    }
    if (first || v > best) best = v;
    first = false;
  }
  return best;
}

// E sup over X_p summed mask by mask.
Rational brute_Xp(const LambdaCollection& lam, const Rational& p) {
  Rational total = 0;
  for (unsigned mask = 0; mask < (1U << lam.n); ++mask) {
    Rational pr = 1;
    for (std::size_t i = 0; i < lam.n; ++i) pr *= (mask >> i & 1U) ? p : 1 - p;
    total += pr * sup_over(lam, mask);
  }
  return total;
}

Rational brute_w(const LambdaCollection& lam, std::size_t w) {
  Rational total = 0;
  unsigned count = 0;
  for (unsigned mask = 0; mask < (1U << lam.n); ++mask) {
    if (static_cast<std::size_t>(__builtin_popcount(mask)) != w) continue;
    total += sup_over(lam, mask);
    ++count;
  }
  return total / count;
}

}  // namespace

TEST(Selector, ExactExpectationMatchesMaskEnumeration) {
  for (std::uint64_t seed = 1; seed <= 40; ++seed) {
    const std::size_t n = 1 + seed % 7;
    const auto lam = gen::random_lambda(n, 1 + seed % 4, seed);
    const Rational p = make_rational(static_cast<long>(1 + seed % 9), 10);
    ASSERT_EQ(expected_sup_exact(lam, p), brute_Xp(lam, p)) << seed;
    const auto sums = size_sums(sup_table_exact(lam), n);
    for (std::size_t w = 0; w <= n; ++w) ASSERT_EQ(expected_over_w(sums, w), brute_w(lam, w));
    ASSERT_NEAR(static_cast<double>(expected_sup_float(lam, to_long_double(p))), brute_Xp(lam, p).get_d(), 1e-12);
  }
}

TEST(Selector, MonteCarloAgreesWithExactWithinFourSigma) {
  const auto lam = gen::random_lambda(8, 3, 5);
  const Rational p(3, 10);
  const auto est = expected_sup_mc(lam, 0.3L, 200000, 17);
  const long double exact = to_long_double(expected_sup_exact(lam, p));
  EXPECT_LE(std::fabs(est.mean - exact), 4 * est.std_error);
  EXPECT_EQ(est.trials, 200000U);
  ASSERT_FALSE(est.trace.empty());
  EXPECT_EQ(est.trace.back(), est.mean);
}

TEST(Selector, MonteCarloIsDeterministicPerSeed) {
  const auto lam = gen::random_lambda(6, 2, 8);
  const auto a = expected_sup_mc(lam, 0.4L, 150000, 3);
  const auto b = expected_sup_mc(lam, 0.4L, 150000, 3);
  const auto c = expected_sup_mc(lam, 0.4L, 150000, 4);
  EXPECT_EQ(a.mean, b.mean);
  EXPECT_EQ(a.trace, b.trace);
  EXPECT_NE(a.mean, c.mean);
}

TEST(Selector, UniformSubsetSamplerHasTheRightSize) {
  CounterRng rng(1, 1);
  for (int k = 0; k < 200; ++k) {
    const std::size_t n = 1 + rng.below(10), w = rng.below(n + 1);
    EXPECT_EQ(sample_uniform_w_subset(n, w, rng).count(), w);
  }
}

TEST(Reduction, BinomialTailAtLeastHalf) {
  for (std::size_t n = 1; n <= 50; ++n) {
    for (unsigned long k = 1; k <= 19; ++k) {
      const Rational p = make_rational(static_cast<long>(k), 20);
      const auto fnp = floor(Rational(static_cast<unsigned long>(n)) * p).get_ui();
      // Independent evaluation: one minus the lower tail, built term by term.
      Rational lower = 0, term = pow(1 - p, static_cast<long>(n));
      for (std::size_t j = 0; j < fnp; ++j) {
        lower += term;
        term *= make_rational(static_cast<long>(n - j), j + 1) * p / (1 - p);
      }
      const Rational tail = binomial_tail_at_least(n, p, fnp);
      ASSERT_EQ(tail, 1 - lower) << n << " " << p;
      ASSERT_GE(tail, Rational(1, 2)) << n << " " << p;
    }
  }
}

TEST(Reduction, EFact) {
  EXPECT_TRUE(e_half_fact_holds());
  EXPECT_GT(1 - std::exp(-0.5), 0.25);
}

TEST(Reduction, ChainHoldsOnSmallFamilies) {
  for (std::uint64_t k = 0; k < 12; ++k) {
    gen::RandomFamilyParams params;
    params.n = 4 + k % 3;
    params.p = Rational(1, 2);
    const auto f = gen::random_family(params, 606, k);
    const auto r = verify_subsampling_chain(f, f.p(), 2, 20000, k);
    EXPECT_TRUE(r.ok()) << k;
    EXPECT_EQ(r.regime, "np>=1");
    EXPECT_EQ(r.w, floor(Rational(2) * r.np).get_ui());
  }
}

TEST(Reduction, RegimesAndGuards) {
  const auto small = gen::disjoint_singletons(3, Rational(1, 8));  // np = 3/8
  EXPECT_EQ(verify_subsampling_chain(small, small.p(), 2, 100, 1).regime, "p-small");
  const auto tiny = gen::disjoint_singletons(4, Rational(1, 8));
  const auto mid = gen::disjoint_singletons(4, Rational(3, 16));  // np = 3/4
  const auto r = verify_subsampling_chain(mid, mid.p(), 4, 20000, 1);
  EXPECT_EQ(r.regime, "1/2<=np<1");
  EXPECT_EQ(r.factor, Rational(1, 4));
  EXPECT_TRUE(r.ok());
  try {
    verify_subsampling_chain(tiny, Rational(1, 2), 3, 100, 1);
    FAIL();
  } catch (const GuardError& e) {
    EXPECT_EQ(e.guard(), "w-range");
  }
}

TEST(Selector, ExactEnumerationGuard) {
  LambdaCollection lam{25, {std::vector<Rational>(25, Rational(1))}};
  try {
    sup_table_exact(lam);
    FAIL();
  } catch (const GuardError& e) {
    EXPECT_EQ(e.guard(), "exact-enumeration");
  }
}

TEST(Selector, ThresholdFamilyMembersReachTheTarget) {
  const auto lam = gen::random_lambda(5, 2, 12);
  const Rational L(1), M(3, 2);
  const auto f = threshold_family(lam, L, M, Rational(1, 4));
  std::size_t expected = 0;
  for (unsigned mask = 0; mask < 32; ++mask) expected += sup_over(lam, mask) >= L * M;
  EXPECT_EQ(f.size(), expected);
  for (const auto& m : f.members()) EXPECT_GE(m.total_weight(), L * M);
}
