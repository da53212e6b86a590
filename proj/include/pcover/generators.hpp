#pragma once

// Seeded instance generators. Every generator is a pure function of its
// arguments; stream ids separate the generators so a shared seed never couples
// two kinds of instance.

#include <iterator>
#include <numeric>
#include <set>
#include <string>
#include <vector>

#include "pcover/bridge.hpp"
#include "pcover/family.hpp"
#include "pcover/multiset.hpp"
#include "pcover/rng.hpp"
#include "pcover/selector.hpp"

namespace pcover::gen {

enum Stream : std::uint64_t {
  kFamilyStream = 101,
  kLambdaStream = 102,
  kMultisetStream = 103,
  kEmpiricalStream = 104,
};

/// Weights spread over several bucket levels, so that preprocessing and
/// regularization both have work to do.
inline Rational random_weight(CounterRng& rng) {
  static const Rational pool[] = {Rational(1),       Rational(1, 2),     Rational(1, 10),   Rational(1, 100),
                                  Rational(3, 100),  Rational(1, 1000),  Rational(1, 10000), Rational(7, 10000)};
  return pool[rng.below(std::size(pool))];
}

struct RandomFamilyParams {
  std::size_t n = 5;
  std::size_t members = 4;
  std::size_t min_size = 1;
  std::size_t max_size = 3;
  Rational p{1, 4};
};

/// Distinct random members with min_size <= |S| <= max_size and sum_{i in S} lambda^S(i) >= 1.
inline WeightedFamily random_family(const RandomFamilyParams& params, std::uint64_t seed, std::uint64_t index = 0) {
  if (params.n == 0 || params.min_size > params.max_size || params.max_size > params.n) {
    throw InputError("random family needs 1 <= min_size <= max_size <= n");
  }
  CounterRng rng(seed, kFamilyStream + (index << 8));
  std::vector<Member> members;
  std::set<SubsetBits> seen;
  const std::size_t attempts = 50 * params.members + 50;
  for (std::size_t a = 0; a < attempts && members.size() < params.members; ++a) {
    const std::size_t size = params.min_size + rng.below(params.max_size - params.min_size + 1);
    std::vector<Element> elems(params.n);
    std::iota(elems.begin(), elems.end(), 0);
    for (std::size_t i = 0; i < size; ++i) std::swap(elems[i], elems[i + rng.below(params.n - i)]);
    SubsetBits s(params.n);
    for (std::size_t i = 0; i < size; ++i) s.set(elems[i]);
    if (!seen.insert(s).second) continue;
    Member m{s, {}};
    Rational total = 0;
    s.for_each([&](Element e) {
      m.weights[e] = random_weight(rng);
      total += m.weights[e];
    });
    if (total < 1 && size > 0) m.weights[elems[rng.below(size)]] = 1;
    members.push_back(std::move(m));
  }
  return WeightedFamily(GroundSet(params.n), std::move(members), params.p);
}

/// {0}, {1}, ..., {n-1} with unit weights.
inline WeightedFamily disjoint_singletons(std::size_t n, const Rational& p = Rational(1, 8)) {
  std::vector<Member> members;
  for (Element i = 0; i < n; ++i) members.push_back(Member{SubsetBits(n, {i}), {{i, Rational(1)}}});
  return WeightedFamily(GroundSet(n), std::move(members), p);
}

/// Sequences with entries k/denominator, 0 <= k <= max_numerator.
inline LambdaCollection random_lambda(std::size_t n, std::size_t sequences, std::uint64_t seed,
                                      unsigned long max_numerator = 10, unsigned long denominator = 10) {
  CounterRng rng(seed, kLambdaStream);
  LambdaCollection lam{n, {}};
  for (std::size_t k = 0; k < sequences; ++k) {
    std::vector<Rational> v;
    for (std::size_t i = 0; i < n; ++i) {
      Rational x(static_cast<unsigned long>(rng.below(max_numerator + 1)), denominator);
      x.canonicalize();
      v.push_back(x);
    }
    lam.seqs.push_back(std::move(v));
  }
  return lam;
}

/// Threshold family of a random collection, with L M set to half the largest total weight.
inline WeightedFamily threshold_from_lambda(std::size_t n, std::size_t sequences, std::uint64_t seed, const Rational& p) {
  auto lam = random_lambda(n, sequences, seed);
  Rational top = 0;
  for (const auto& s : lam.seqs) {
    Rational t = 0;
    for (const auto& v : s) t += v;
    if (t > top) top = t;
  }
  Rational M = top > 0 ? top / 2 : Rational(1);
  M.canonicalize();
  return threshold_family(lam, 1, M, p);
}

struct RandomMultisetParams {
  std::size_t n = 3;
  std::size_t members = 3;
  std::size_t max_count = 2;
  std::size_t max_support = 2;
  std::size_t N = 2;
  std::size_t K = 2;
};

struct MultisetInstance {
  MultisetFamily family;
  MultisetDistribution distribution;
};

/// mu has entries with small denominators; weights come from random_weight.
inline MultisetInstance random_multiset_family(const RandomMultisetParams& params, std::uint64_t seed,
                                               std::uint64_t index = 0) {
  if (params.n == 0 || params.max_count == 0 || params.max_support == 0) {
    throw InputError("random multiset family needs n, max_count, max_support >= 1");
  }
  CounterRng rng(seed, kMultisetStream + (index << 8));
  MultisetInstance out;
  out.family.n = params.n;
  std::set<Multiset> seen;
  for (std::size_t a = 0; a < 50 * params.members + 50 && out.family.members.size() < params.members; ++a) {
    Multiset s(params.n);
    const std::size_t support = 1 + rng.below(std::min(params.max_support, params.n));
    for (std::size_t k = 0; k < support; ++k) {
      s.set_count(static_cast<Element>(rng.below(params.n)), static_cast<Multiset::Count>(1 + rng.below(params.max_count)));
    }
    if (!seen.insert(s).second) continue;
    MultisetMember m{s, {}};
    Rational total = 0;
    for (const auto& [e, c] : s.counts()) {
      m.weights[e] = random_weight(rng);
      total += Rational(c) * m.weights[e];
    }
    if (total < 1) m.weights[s.counts().begin()->first] = 1;
    out.family.members.push_back(std::move(m));
  }
  std::vector<unsigned long> raw(params.n);
  unsigned long sum = 0;
  for (auto& r : raw) sum += (r = 1 + rng.below(4));
  for (auto r : raw) {
    Rational x(r, sum);
    x.canonicalize();
    out.distribution.mu.push_back(x);
  }
  out.distribution.N = params.N;
  out.distribution.K = params.K;
  return out;
}

struct RandomEmpiricalParams {
  std::size_t points = 3;
  std::size_t N = 3;
  std::size_t functions = 2;
};

/// nu with denominators up to 12 and function values k/4 for 0 <= k <= 8.
inline FiniteEmpiricalInstance random_empirical(const RandomEmpiricalParams& params, std::uint64_t seed,
                                                std::uint64_t index = 0) {
  if (params.points == 0 || params.functions == 0 || params.N == 0) {
    throw InputError("random empirical instance needs points, functions and N >= 1");
  }
  CounterRng rng(seed, kEmpiricalStream + (index << 8));
  FiniteEmpiricalInstance inst;
  inst.N = params.N;
  std::vector<unsigned long> raw(params.points);
  unsigned long sum = 0;
  for (auto& r : raw) sum += (r = 1 + rng.below(4));
  for (std::size_t y = 0; y < params.points; ++y) {
    inst.points.push_back("y" + std::to_string(y));
    Rational x(raw[y], sum);
    x.canonicalize();
    inst.nu.push_back(x);
  }
  for (std::size_t i = 0; i < params.functions; ++i) {
    std::vector<Rational> f;
    for (std::size_t y = 0; y < params.points; ++y) {
      Rational x(static_cast<unsigned long>(rng.below(9)), 4);
      x.canonicalize();
      f.push_back(x);
    }
    inst.functions.push_back(std::move(f));
  }
  // E sup must be positive for normalization.
  bool positive = false;
  for (const auto& f : inst.functions) {
    for (std::size_t y = 0; y < params.points; ++y) positive = positive || (f[y] > 0 && inst.nu[y] > 0);
  }
  if (!positive) inst.functions[0][0] = 1;
  return inst;
}

}  // namespace pcover::gen
