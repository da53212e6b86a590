#include <gtest/gtest.h>

#include "pcover/family.hpp"
#include "pcover/generators.hpp"
#include "pcover/rng.hpp"

using namespace pcover;

namespace {

SubsetBits from_mask(std::size_t n, unsigned mask) {
  SubsetBits s(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (mask >> i & 1U) s.set(static_cast<Element>(i));
  }
  return s;
}

// Definition-level oracle: minimum over every collection G of subsets of X
// (2^(2^n) collections) of sum p^|T| subject to G covering F.
Rational brute_min_cost(std::size_t n, const std::vector<unsigned>& family, const Rational& p) {
  const unsigned subsets = 1U << n;
  Rational best = -1;
  for (std::uint64_t g = 0; g < (std::uint64_t{1} << subsets); ++g) {
    bool ok = true;
    for (unsigned s : family) {
      bool hit = false;
      for (unsigned t = 0; t < subsets && !hit; ++t) hit = (g >> t & 1U) && (t & ~s) == 0;
      ok = ok && hit;
    }
    if (!ok) continue;
    Rational cost = 0;
    for (unsigned t = 0; t < subsets; ++t) {
      if (g >> t & 1U) cost += pow(p, __builtin_popcount(t));
    }
    if (best < 0 || cost < best) best = cost;
  }
  return best;
}

WeightedFamily family_of(std::size_t n, const std::vector<unsigned>& masks, const Rational& p) {
  std::vector<SubsetBits> sets;
  for (unsigned m : masks) sets.push_back(from_mask(n, m));
  return WeightedFamily::unweighted(GroundSet(n), sets, p);
}

}  // namespace

TEST(Family, DisjointSingletonsCostFourPCappedAtOne) {
  for (const Rational& p : {Rational(1, 8), Rational(1, 5), Rational(1, 4), Rational(1, 3), Rational(3, 4)}) {
    const auto f = gen::disjoint_singletons(4, p);
    Rational expected = 4 * p;
    if (expected > 1) expected = 1;
    EXPECT_EQ(min_cover_cost_exact(f, p).cost, expected) << p;
  }
}

TEST(Family, FamilyOfEmptySetCostsOne) {
  const auto f = WeightedFamily::unweighted(GroundSet(3), {SubsetBits(3)}, Rational(1, 3));
  const auto best = min_cover_cost_exact(f, f.p());
  EXPECT_EQ(best.cost, 1);
  ASSERT_EQ(best.cover.size(), 1U);
  EXPECT_TRUE(best.cover[0].empty());
  EXPECT_EQ(is_p_small(f, f.p()).verdict, Verdict::NotPSmall);
}

TEST(Family, EmptyFamilyIsFree) {
  const WeightedFamily f(GroundSet(3), {}, Rational(1, 2));
  EXPECT_EQ(min_cover_cost_exact(f, f.p()).cost, 0);
  EXPECT_EQ(is_p_small(f, f.p()).verdict, Verdict::PSmall);
}

TEST(Family, TinyFixtureIsPSmallAtOneEighth) {
  const auto f = gen::disjoint_singletons(4);
  const auto cert = is_p_small(f, f.p());
  EXPECT_EQ(cert.verdict, Verdict::PSmall);
  EXPECT_EQ(cert.min_cost, Rational(1, 2));
  EXPECT_TRUE(cert.exhaustive);
}

// Property: the exact solver equals the brute-force definition on every
// random family over at most 3 elements, and its cover is valid.
TEST(Family, ExactSolverMatchesBruteForce) {
  CounterRng rng(21, 1);
  const Rational ps[] = {Rational(1, 10), Rational(1, 4), Rational(1, 2), Rational(9, 10)};
  for (int trial = 0; trial < 150; ++trial) {
    const std::size_t n = 1 + rng.below(3);
    std::vector<unsigned> masks;
    const std::size_t m = rng.below(5);
    for (std::size_t k = 0; k < m; ++k) masks.push_back(static_cast<unsigned>(rng.below(1U << n)));
    const Rational& p = ps[rng.below(4)];
    const auto f = family_of(n, masks, p);
    const auto best = min_cover_cost_exact(f, p);
    ASSERT_EQ(best.cost, brute_min_cost(n, masks, p)) << "trial " << trial;
    ASSERT_TRUE(covers(best.cover, f.sets()));
    ASSERT_EQ(cover_cost(best.cover, p), best.cost);
    const auto fl = min_cover_cost_float(f, to_long_double(p));
    ASSERT_NEAR(static_cast<double>(fl.cost), best.cost.get_d(), 1e-12);
    ASSERT_GE(greedy_cover(f, p).cost, best.cost);
  }
}

// Property: growing a member never lowers the minimum cost, and adding a
// member never lowers it either.
TEST(Family, CostIsMonotone) {
  CounterRng rng(22, 1);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 2 + rng.below(4);
    std::vector<unsigned> masks, shrunk;
    const std::size_t m = 1 + rng.below(4);
    for (std::size_t k = 0; k < m; ++k) {
      const unsigned s = static_cast<unsigned>(rng.below(1U << n));
      masks.push_back(s);
      shrunk.push_back(s & static_cast<unsigned>(rng.below(1U << n)));
    }
    const Rational p = make_rational(1 + static_cast<long>(rng.below(9)), 10);
    const auto f = family_of(n, masks, p);
    const auto g = family_of(n, shrunk, p);
    ASSERT_LE(min_cover_cost_exact(f, p).cost, min_cover_cost_exact(g, p).cost);
    ASSERT_TRUE(shrink_monotone_check(f, g, p));
    auto more = masks;
    more.push_back(static_cast<unsigned>(rng.below(1U << n)));
    ASSERT_GE(min_cover_cost_exact(family_of(n, more, p), p).cost, min_cover_cost_exact(f, p).cost);
  }
}

TEST(Family, GivenCoverCertificate) {
  const auto f = gen::disjoint_singletons(4);
  Cover good{f.sets(), CostMode::PlainP};
  EXPECT_EQ(is_p_small(f, f.p(), good).verdict, Verdict::PSmall);
  Cover partial{{f.sets()[0]}, CostMode::PlainP};
  const auto cert = is_p_small(f, f.p(), partial);
  EXPECT_EQ(cert.verdict, Verdict::NotPSmall);
  EXPECT_FALSE(cert.exhaustive);
}

TEST(Family, ValidationRejectsBadInput) {
  EXPECT_THROW(WeightedFamily(GroundSet(2), {}, Rational(0)), InputError);
  Member m{SubsetBits(2, {0}), {{1, Rational(1)}}};
  EXPECT_THROW(WeightedFamily(GroundSet(2), {m}, Rational(1, 2)), InputError);
  Member neg{SubsetBits(2, {0}), {{0, Rational(-1)}}};
  EXPECT_THROW(WeightedFamily(GroundSet(2), {neg}, Rational(1, 2)), InputError);
}

TEST(Family, CandidateGuardFailsClosed) {
  gen::RandomFamilyParams params;
  params.n = 12;
  params.min_size = params.max_size = 12;
  params.members = 1;
  const auto f = gen::random_family(params, 3);
  ExactCoverLimits limits;
  limits.max_candidates = 100;
  try {
    min_cover_cost_exact(f, f.p(), limits);
    FAIL() << "expected a guard error";
  } catch (const GuardError& e) {
    EXPECT_FALSE(e.guard().empty());
  }
}

TEST(Generators, RandomFamilyIsDeterministicAndHeavy) {
  gen::RandomFamilyParams params;
  const auto a = gen::random_family(params, 9, 2);
  const auto b = gen::random_family(params, 9, 2);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a.members()[i].set, b.members()[i].set);
    EXPECT_EQ(a.members()[i].weights, b.members()[i].weights);
    EXPECT_GE(a.members()[i].total_weight(), 1);
  }
}
