#include <cmath>

#include <gtest/gtest.h>

#include "pcover/generators.hpp"
#include "pcover/ledger.hpp"

using namespace pcover;

namespace {

FragmentConfig stress() {
  FragmentConfig c;
  c.good_threshold = c.capture;
  return c;
}

DyadicFamily family(int k) {
  gen::RandomFamilyParams params;
  params.n = 3 + static_cast<std::size_t>(k % 4);
  params.members = 2 + static_cast<std::size_t>(k % 3);
  params.max_size = 3;
  params.p = Rational(1, 2 + k % 5);
  return preprocess(gen::random_family(params, 303, static_cast<std::uint64_t>(k))).family;
}

Rational bad_weight_sum(const FragmentEngine& e, std::size_t w, const Rational& p, std::uint64_t& bad) {
  const std::size_t n = e.family().n;
  Rational lhs = 0;
  bad = 0;
  for (unsigned mask = 0; mask < (1U << n); ++mask) {
    if (static_cast<std::size_t>(__builtin_popcount(mask)) != w) continue;
    Counts W(n, 0);
    for (std::size_t i = 0; i < n; ++i) W[i] = mask >> i & 1U;
    Rational captured = 0;
    for (const auto& mem : e.family().members) {
      Rational c = 0;
      for (std::size_t i = 0; i < n; ++i) {
        if (mem.counts[i] > 0 && W[i] > 0) c += pow(Rational(100), -mem.bucket[i]);
      }
      if (c > captured) captured = c;
    }
    if (captured >= e.config().good_threshold) continue;
    ++bad;
    for (const auto& T : e.build_cover(W)) {
      long size = 0;
      for (auto c : T) size += c;
      lhs += pow(p, size);
    }
  }
  return lhs;
}

}  // namespace

TEST(Ledger, LhsMatchesDirectSumAndStaysUnderBound) {
  std::uint64_t with_bad = 0;
  for (int k = 0; k < 30; ++k) {
    const auto fam = family(k);
    FragmentEngine e(fam, stress());
    const Rational p(1, 2 + k % 5);
    for (const Rational J : {Rational(2), Rational(3), Rational(4)}) {
      const Integer w = floor(J * Rational(static_cast<unsigned long>(fam.n)) * p);
      if (w < 1 || w > static_cast<long>(fam.n)) {
        EXPECT_THROW(aggregate_bad_cost(e, p, J), GuardError);
        continue;
      }
      const auto l = aggregate_bad_cost(e, p, J);
      std::uint64_t bad = 0;
      ASSERT_EQ(l.lhs, bad_weight_sum(e, l.w, p, bad));
      ASSERT_EQ(l.bad_W, bad);
      ASSERT_EQ(l.total_W, binomial(fam.n, l.w).get_ui());
      ASSERT_EQ(l.J_eff, Rational(static_cast<unsigned long>(l.w)) / (Rational(static_cast<unsigned long>(fam.n)) * p));
      with_bad += bad > 0;
      ASSERT_TRUE(l.ok()) << "family " << k << " J " << J;
      Rational summed = 0;
      for (const auto& b : l.buckets) {
        std::uint64_t nb = 0;
        for (auto s : b.s_b) nb += s;
        const Rational expected = Rational(l.binom_nw) * pow(l.J_eff, -static_cast<long>(b.t)) * pow(Rational(2), static_cast<long>(nb));
        ASSERT_EQ(b.bound, expected);
        ASSERT_LE(b.cost, b.bound);
        summed += b.cost;
      }
      ASSERT_EQ(summed, l.bucket_total);
    }
  }
  EXPECT_GT(with_bad, 0U);
}

TEST(Ledger, CountingInequalityOnGrid) {
  for (std::size_t n = 1; n <= 30; ++n) {
    for (std::size_t w = 1; w <= n; ++w) {
      for (std::size_t t = 0; t + w <= n; ++t) {
        ASSERT_TRUE(counting_inequality_holds(n, w, t)) << n << " " << w << " " << t;
        // Independent floating check of the same inequality in log space.
        const double lhs = std::lgamma(n + 1.0) - std::lgamma(w + t + 1.0) - std::lgamma(n - w - t + 1.0);
        const double rhs = std::lgamma(n + 1.0) - std::lgamma(w + 1.0) - std::lgamma(n - w + 1.0) +
                           static_cast<double>(t) * std::log(static_cast<double>(n) / w);
        ASSERT_LE(lhs, rhs + 1e-9);
      }
    }
  }
  EXPECT_THROW(counting_inequality_holds(5, 0, 1), InputError);
}

TEST(Ledger, GuardNamesTheLimit) {
  FragmentEngine e(family(0));
  try {
    aggregate_bad_cost(e, Rational(1, 100), Rational(1, 100));
    FAIL();
  } catch (const GuardError& err) {
    EXPECT_EQ(err.guard(), "ledger-w");
  }
}

TEST(MultiLedger, ExhaustiveAndWithinBound) {
  for (int k = 0; k < 8; ++k) {
    gen::RandomMultisetParams params;
    params.n = 2 + static_cast<std::size_t>(k % 2);
    const auto inst = gen::random_multiset_family(params, 404, static_cast<std::uint64_t>(k));
    const auto fam = preprocess(inst.family).family;
    FragmentEngine e(fam, stress());
    const auto l = aggregate_bad_cost_multi(e, inst.distribution, 400, 0.5L);
    EXPECT_EQ(l.M, inst.distribution.K * inst.distribution.N);
    EXPECT_EQ(l.total_W, multiset_space_size(fam.n, l.M).get_ui());
    EXPECT_TRUE(l.ok());
    EXPECT_LE(compare(l.lhs, l.bound_total), 0);
    EXPECT_GE(l.p_bad, 0);
    EXPECT_LE(l.p_bad, 1);
  }
}
