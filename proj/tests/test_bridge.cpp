#include <gtest/gtest.h>

#include "pcover/bridge.hpp"
#include "pcover/generators.hpp"

using namespace pcover;

namespace {

std::vector<FiniteEmpiricalInstance> instances(int count) {
  std::vector<FiniteEmpiricalInstance> out;
  for (int k = 0; k < count; ++k) {
    gen::RandomEmpiricalParams params;
    params.points = 2 + static_cast<std::size_t>(k % 2);
    params.N = 2 + static_cast<std::size_t>(k % 3);
    params.functions = 1 + static_cast<std::size_t>(k % 3);
    out.push_back(gen::random_empirical(params, 808, static_cast<std::uint64_t>(k)));
  }
  return out;
}

// E sup Z over ordered tuples, independent of the multiset law.
Rational tuple_expectation(const FiniteEmpiricalInstance& inst) {
  Rational total = 0;
  for_each_tuple(inst.size(), inst.N, 1'000'000, [&](const std::vector<std::size_t>& t) {
    Rational pr = 1;
    for (auto y : t) pr *= inst.nu[y];
    Rational best = -1;
    for (const auto& f : inst.functions) {
      Rational v = 0;
      for (auto y : t) v += f[y];
      v /= static_cast<unsigned long>(t.size());
      if (v > best) best = v;
    }
    total += pr * best;
  });
  return total;
}

}  // namespace

TEST(Bridge, MarkovWorkedExample) {
  const Multiset G(2, {{0, 2}});
  const std::vector<Rational> mu{Rational(1, 2), Rational(1, 2)};
  const auto r = markov_chain_check(G, mu, 2);
  EXPECT_EQ(r.prob, Rational(1, 4));
  EXPECT_EQ(r.markov, Rational(1));
  EXPECT_EQ(compare(r.exponential, EPoly::term(Rational(1, 4), 2)), 0);
  EXPECT_EQ(compare(r.poissonized, EPoly::term(Rational(1, 2), 2)), 0);
  EXPECT_TRUE(r.ok());
}

// Property: every link of the bound chain holds on random pruned elements,
// and P[H] agrees with a count over ordered tuples.
TEST(Bridge, MarkovChainOnRandomPrunedElements) {
  CounterRng rng(41, 1);
  for (int trial = 0; trial < 400; ++trial) {
    const std::size_t n = 1 + rng.below(3), N = 1 + rng.below(4);
    std::vector<unsigned long> raw(n);
    unsigned long sum = 0;
    for (auto& r : raw) sum += (r = 1 + rng.below(5));
    std::vector<Rational> mu;
    for (auto r : raw) mu.push_back(Rational(r, sum));
    for (auto& m : mu) m.canonicalize();
    std::vector<Multiset::Count> c(n);
    for (auto& x : c) x = static_cast<Multiset::Count>(rng.below(N + 1));
    const auto G = prune_cover(Multiset::from_counts(c), mu, N);
    const auto r = markov_chain_check(G, mu, N);
    ASSERT_TRUE(r.ok()) << G.to_string();
    const auto ev = witness_from_cover_element(G, mu, N);
    Rational prob = 0;
    for_each_tuple(n, N, 1'000'000, [&](const std::vector<std::size_t>& t) {
      Rational prod = 1, pr = 1;
      for (auto x : t) {
        prod *= ev.ratio[x];
        pr *= mu[x];
      }
      if (prod <= ev.threshold) prob += pr;
    });
    ASSERT_EQ(prob, r.prob);
    ASSERT_EQ(containment_failures(ev, n), 0U);
  }
}

TEST(Bridge, UnprunedElementIsRejected) {
  const std::vector<Rational> mu{Rational(9, 10), Rational(1, 10)};
  EXPECT_THROW(witness_from_cover_element(Multiset(2, {{0, 1}}), mu, 2), InputError);
}

TEST(Bridge, NormalizationAndExpectation) {
  for (auto inst : instances(12)) {
    ASSERT_EQ(expected_sup_Z(inst), tuple_expectation(inst));
    const Rational before = expected_sup_Z(inst);
    const Rational factor = normalize(inst);
    ASSERT_EQ(factor * before, 1);
    ASSERT_EQ(expected_sup_Z(inst), 1);
  }
}

TEST(Bridge, DiscretizationWithinEps) {
  for (auto inst : instances(12)) {
    normalize(inst);
    for (const Rational eps : {Rational(1, 100), Rational(1, 10), Rational(1, 3)}) {
      const auto cells = discretize(inst, eps);
      Rational mass = 0;
      for (const auto& m : cells.mu) {
        ASSERT_GT(m, 0);
        mass += m;
      }
      ASSERT_EQ(mass, 1);
      for (std::size_t c = 1; c < cells.cells(); ++c) ASSERT_LT(cells.keys[c - 1], cells.keys[c]);
      for (std::size_t y = 0; y < inst.size(); ++y) {
        for (std::size_t i = 0; i < inst.functions.size(); ++i) {
          ASSERT_EQ(cells.keys[cells.cell_of[y]][i], floor(inst.functions[i][y] / eps));
        }
      }
      const auto check = check_discretization(inst, cells);
      ASSERT_EQ(check.violations, 0U);
      ASSERT_LE(check.max_error, eps);
      ASSERT_EQ(check.tuples, static_cast<std::uint64_t>(std::pow(inst.size(), inst.N) + 0.5));
    }
  }
}

TEST(Bridge, TailCoverageHasNoEscapes) {
  std::size_t certified = 0;
  for (const auto& inst : instances(12)) {
    auto normalized = inst;
    normalize(normalized);
    for (const Rational L : {Rational(1), Rational(3, 2), Rational(2)}) {
      const auto r = tail_coverage_check(inst, std::nullopt, L);
      ASSERT_TRUE(r.escapes.empty());
      ASSERT_TRUE(r.ok());
      certified += r.certified;
      const auto mu = discretize(normalized, r.eps).mu;
      for (const auto& g : r.cover) ASSERT_TRUE(is_pruned(g, mu, inst.N));
      for (const auto& level : symmetric_witness_sets(r.cover, mu, inst.N)) {
        ASSERT_TRUE(level.symmetric);
        if (r.certified) ASSERT_TRUE(level.within);
      }
    }
  }
  EXPECT_GT(certified, 0U);
}

TEST(Bridge, TupleGuardFailsClosed) {
  FiniteEmpiricalInstance inst{{}, {Rational(1, 2), Rational(1, 2)}, {{Rational(1), Rational(0)}}, 30};
  try {
    check_discretization(inst, discretize(inst, Rational(1, 10)));
    FAIL();
  } catch (const GuardError& e) {
    EXPECT_EQ(e.guard(), "tuple-enumeration");
  }
}
