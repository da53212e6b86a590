#include <cmath>
#include <map>

#include <gtest/gtest.h>

#include "pcover/generators.hpp"
#include "pcover/multiset.hpp"

using namespace pcover;

namespace {

std::vector<Rational> random_mu(std::size_t n, CounterRng& rng) {
  std::vector<unsigned long> raw(n);
  unsigned long sum = 0;
  for (auto& r : raw) sum += (r = rng.below(5));
  if (sum == 0) {
    raw[0] = 1;
    sum = 1;
  }
  std::vector<Rational> mu;
  for (auto r : raw) {
    Rational x(r, sum);
    x.canonicalize();
    mu.push_back(x);
  }
  return mu;
}

// Law of the multiset of N ordered i.i.d. draws, by enumerating all n^N tuples.
std::map<std::vector<Multiset::Count>, Rational> tuple_law(const std::vector<Rational>& mu, std::size_t N) {
  std::map<std::vector<Multiset::Count>, Rational> law;
  const std::size_t n = mu.size();
  std::size_t total = 1;
  for (std::size_t k = 0; k < N; ++k) total *= n;
  for (std::size_t code = 0; code < total; ++code) {
    std::vector<Multiset::Count> c(n, 0);
    Rational pr = 1;
    std::size_t x = code;
    for (std::size_t k = 0; k < N; ++k) {
      ++c[x % n];
      pr *= mu[x % n];
      x /= n;
    }
    law[c] += pr;
  }
  return law;
}

}  // namespace

TEST(MultisetLaw, SumsToOneExactly) {
  CounterRng rng(31, 1);
  for (std::size_t n = 1; n <= 4; ++n) {
    for (std::size_t N = 1; N <= 6; ++N) {
      const auto mu = random_mu(n, rng);
      Rational total = 0;
      std::size_t count = 0;
      for_each_multiset_of_size(n, N, [&](const Multiset& w) {
        total += multiset_prob(w, mu, N);
        ++count;
      });
      EXPECT_EQ(total, 1) << n << " " << N;
      EXPECT_EQ(Integer(static_cast<unsigned long>(count)), multiset_space_size(n, N));
    }
  }
}

TEST(MultisetLaw, MatchesOrderedTupleEnumeration) {
  CounterRng rng(32, 1);
  for (std::size_t n = 1; n <= 3; ++n) {
    for (std::size_t N = 1; N <= 5; ++N) {
      const auto mu = random_mu(n, rng);
      const auto law = tuple_law(mu, N);
      for_each_multiset_of_size(n, N, [&](const Multiset& w) {
        auto it = law.find(w.dense());
        const Rational expected = it == law.end() ? Rational(0) : it->second;
        ASSERT_EQ(multiset_prob(w, mu, N), expected) << w.to_string();
      });
    }
  }
}

TEST(MultisetLaw, SamplerFrequenciesWithinFourSigma) {
  const std::vector<Rational> mu{Rational(1, 6), Rational(1, 3), Rational(1, 2)};
  const MultisetDistribution d{mu, 3, 1};
  CounterRng rng(33, 1);
  std::map<std::vector<Multiset::Count>, std::uint64_t> hits;
  const std::uint64_t draws = 200000;
  for (std::uint64_t k = 0; k < draws; ++k) ++hits[sample_multiset(d, rng).dense()];
  for_each_multiset_of_size(3, 3, [&](const Multiset& w) {
    const double p = multiset_prob(w, d).get_d();
    const double sd = std::sqrt(p * (1 - p) / static_cast<double>(draws));
    const double freq = static_cast<double>(hits[w.dense()]) / static_cast<double>(draws);
    EXPECT_LE(std::fabs(freq - p), 4 * sd + 1e-12) << w.to_string();
  });
}

TEST(Multiset, LatticeOperations) {
  CounterRng rng(34, 1);
  for (int trial = 0; trial < 300; ++trial) {
    std::vector<Multiset::Count> a(4), b(4);
    for (auto& x : a) x = static_cast<Multiset::Count>(rng.below(4));
    for (auto& x : b) x = static_cast<Multiset::Count>(rng.below(4));
    const auto A = Multiset::from_counts(a), B = Multiset::from_counts(b);
    ASSERT_TRUE(wedge(A, B).is_subset_of(A));
    ASSERT_TRUE(wedge(A, B).is_subset_of(B));
    ASSERT_TRUE(A.is_subset_of(vee(A, B)));
    ASSERT_EQ(plus(A, B).size(), A.size() + B.size());
    ASSERT_EQ(minus(plus(A, B), B), A);
    ASSERT_EQ(wedge_size(A, B), wedge(A, B).size());
    ASSERT_EQ(vee(A, B).size() + wedge(A, B).size(), A.size() + B.size());
  }
}

TEST(Poissonized, WorkedExampleCost) {
  // G = {a:2}, mu(a) = 1/2, N = 2: (e * 2 * 1/2)^2 / 2! = e^2 / 2.
  const Multiset G(2, {{0, 2}});
  const std::vector<Rational> mu{Rational(1, 2), Rational(1, 2)};
  EXPECT_EQ(compare(poissonized_cost(G, mu, 2), EPoly::term(Rational(1, 2), 2)), 0);
  EXPECT_TRUE(is_pruned(G, mu, 2));
  EXPECT_FALSE(is_pruned(Multiset(2, {{0, 1}}), {Rational(9, 10), Rational(1, 10)}, 2));
}

TEST(Poissonized, PruningNeverRaisesCost) {
  CounterRng rng(35, 1);
  for (int trial = 0; trial < 500; ++trial) {
    const auto mu = random_mu(3, rng);
    const std::size_t N = 1 + rng.below(4);
    std::vector<Multiset::Count> c(3);
    for (auto& x : c) x = static_cast<Multiset::Count>(rng.below(4));
    const auto G = Multiset::from_counts(c);
    const auto P = prune_cover(G, mu, N);
    ASSERT_TRUE(P.is_subset_of(G));
    ASSERT_TRUE(is_pruned(P, mu, N));
    ASSERT_LE(compare(poissonized_cost(P, mu, N), poissonized_cost(G, mu, N)), 0);
  }
}

// Property: the exact multiset cover solver equals brute force over all
// collections of candidate sub-multisets.
TEST(MultisetCover, MatchesBruteForce) {
  CounterRng rng(36, 1);
  for (int trial = 0; trial < 60; ++trial) {
    const std::size_t n = 2;
    const auto mu = random_mu(n, rng);
    const std::size_t N = 1 + rng.below(3);
    std::vector<Multiset> fam;
    const std::size_t m = 1 + rng.below(3);
    for (std::size_t k = 0; k < m; ++k) {
      fam.push_back(Multiset::from_counts({static_cast<Multiset::Count>(rng.below(3)), static_cast<Multiset::Count>(rng.below(3))}));
    }
    // All multisets with counts <= 2 over two elements: 9 candidates, 512 collections.
    std::vector<Multiset> cand;
    for (Multiset::Count a = 0; a <= 2; ++a) {
      for (Multiset::Count b = 0; b <= 2; ++b) cand.push_back(Multiset::from_counts({a, b}));
    }
    std::optional<EPoly> best;
    for (unsigned g = 0; g < (1U << cand.size()); ++g) {
      std::vector<Multiset> cover;
      for (std::size_t c = 0; c < cand.size(); ++c) {
        if (g >> c & 1U) cover.push_back(cand[c]);
      }
      if (!covers(cover, fam)) continue;
      const auto cost = poissonized_cost(cover, mu, N);
      if (!best || compare(cost, *best) < 0) best = cost;
    }
    const auto sol = min_multiset_cover_cost_exact(fam, mu, N);
    ASSERT_TRUE(best.has_value());
    ASSERT_EQ(compare(sol.cost, *best), 0) << "trial " << trial;
    ASSERT_TRUE(covers(sol.cover, fam));
  }
}

TEST(MultisetDistribution, ValidationRejectsBadLaws) {
  EXPECT_THROW((MultisetDistribution{{Rational(1, 2)}, 1, 1}.validate()), InputError);
  EXPECT_THROW((MultisetDistribution{{Rational(1)}, 0, 1}.validate()), InputError);
  EXPECT_THROW((MultisetDistribution{{Rational(3, 2), Rational(-1, 2)}, 1, 1}.validate()), InputError);
  EXPECT_NO_THROW((MultisetDistribution{{Rational(1)}, 1, 1}.validate()));
}
