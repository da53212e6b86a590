#pragma once

// Selector processes: sup_{lambda in Lambda} sum_{i in A} lambda_i over random
// A, either X_p (independent inclusion) or a uniform w-subset.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "pcover/epoly.hpp"
#include "pcover/error.hpp"
#include "pcover/family.hpp"
#include "pcover/parallel.hpp"
#include "pcover/rational.hpp"
#include "pcover/rng.hpp"
#include "pcover/subset.hpp"

namespace pcover {

struct SelectorLimits {
  std::size_t max_exact_n = 20;                 // 2^n enumeration
  std::uint64_t max_exact_work = 1ULL << 26;    // 2^n * |Lambda| rational additions
  std::uint64_t max_w_subsets = 1'000'000;      // C(n, w) enumeration
};

/// Nonnegative weight vectors over X = {0..n-1}.
struct LambdaCollection {
  std::size_t n = 1;
  std::vector<std::vector<Rational>> seqs;

  void validate() const {
    if (n == 0) throw InputError("ground set must contain at least one element");
    for (std::size_t k = 0; k < seqs.size(); ++k) {
      if (seqs[k].size() != n) throw InputError("sequence " + std::to_string(k) + " has the wrong length");
      for (const auto& v : seqs[k]) {
        if (v < 0) throw InputError("sequence " + std::to_string(k) + " has a negative entry");
      }
    }
  }

  /// lambda^S extended by zero outside S, one vector per member.
  static LambdaCollection from_family(const WeightedFamily& f) {
    LambdaCollection out{f.n(), {}};
    for (const auto& m : f.members()) {
      std::vector<Rational> v(f.n(), Rational(0));
      for (const auto& [e, w] : m.weights) v[e] = w;
      out.seqs.push_back(std::move(v));
    }
    return out;
  }
};

/// max over sequences of sum_{i in A} lambda_i.
inline Rational sup_weighted(const LambdaCollection& lam, const SubsetBits& a) {
  if (lam.seqs.empty()) throw InputError("empty collection of sequences");
  if (a.universe() != lam.n) throw InputError("subset not over the ground set");
  Rational best;
  bool first = true;
  for (const auto& s : lam.seqs) {
    Rational v = 0;
    a.for_each([&](Element e) { v += s[e]; });
    if (first || v > best) best = v;
    first = false;
  }
  return best;
}

/// max over S of sum_{i in S ∩ A} lambda^S(i); 0 for the empty family.
inline Rational sup_weighted(const WeightedFamily& f, const SubsetBits& a) {
  if (a.universe() != f.n()) throw InputError("subset not over the ground set");
  Rational best = 0;
  for (const auto& m : f.members()) {
    Rational v = 0;
    for (const auto& [e, w] : m.weights) {
      if (a.test(e)) v += w;
    }
    if (v > best) best = v;
  }
  return best;
}

inline std::uint64_t mask_of(const SubsetBits& a) {
  std::uint64_t m = 0;
  a.for_each([&](Element e) { m |= std::uint64_t{1} << e; });
  return m;
}

inline SubsetBits subset_of_mask(std::size_t n, std::uint64_t mask) {
  SubsetBits s(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (mask >> i & 1U) s.set(static_cast<Element>(i));
  }
  return s;
}

/// sup over every subset, indexed by membership mask. An empty collection gives zeros.
inline std::vector<Rational> sup_table_exact(const LambdaCollection& lam, const SelectorLimits& limits = {}) {
  lam.validate();
  if (lam.n > limits.max_exact_n) {
    throw GuardError("exact-enumeration", "n = " + std::to_string(lam.n) + " > " + std::to_string(limits.max_exact_n));
  }
  const std::uint64_t size = std::uint64_t{1} << lam.n;
  if (size * std::max<std::uint64_t>(1, lam.seqs.size()) > limits.max_exact_work) {
    throw GuardError("exact-enumeration", "2^n * |Lambda| exceeds " + std::to_string(limits.max_exact_work));
  }
  std::vector<Rational> best(size, Rational(0));
  std::vector<Rational> sums(size);
  for (const auto& s : lam.seqs) {
    sums[0] = 0;
    for (std::uint64_t m = 1; m < size; ++m) {
      const auto low = static_cast<std::size_t>(__builtin_ctzll(m));
      sums[m] = sums[m & (m - 1)] + s[low];
      if (sums[m] > best[m]) best[m] = sums[m];
    }
  }
  return best;
}

inline std::vector<long double> sup_table_float(const LambdaCollection& lam, const SelectorLimits& limits = {}) {
  lam.validate();
  if (lam.n > limits.max_exact_n) {
    throw GuardError("exact-enumeration", "n = " + std::to_string(lam.n) + " > " + std::to_string(limits.max_exact_n));
  }
  const std::uint64_t size = std::uint64_t{1} << lam.n;
  std::vector<long double> best(size, 0.0L), sums(size, 0.0L);
  for (const auto& s : lam.seqs) {
    std::vector<long double> v(lam.n);
    for (std::size_t i = 0; i < lam.n; ++i) v[i] = to_long_double(s[i]);
    for (std::uint64_t m = 1; m < size; ++m) {
      sums[m] = sums[m & (m - 1)] + v[static_cast<std::size_t>(__builtin_ctzll(m))];
      best[m] = std::max(best[m], sums[m]);
    }
  }
  return best;
}

/// S_k = sum of sup over all k-subsets, k = 0..n.
inline std::vector<Rational> size_sums(const std::vector<Rational>& table, std::size_t n) {
  std::vector<Rational> out(n + 1, Rational(0));
  for (std::uint64_t m = 0; m < table.size(); ++m) out[static_cast<std::size_t>(__builtin_popcountll(m))] += table[m];
  return out;
}

/// E sup over X_p from per-size sums.
inline Rational expected_over_Xp(const std::vector<Rational>& sums, const Rational& p) {
  require_probability(p);
  const std::size_t n = sums.size() - 1;
  Rational total = 0;
  for (std::size_t k = 0; k <= n; ++k) total += sums[k] * pow(p, static_cast<long>(k)) * pow(1 - p, static_cast<long>(n - k));
  return total;
}

/// E sup over a uniform w-subset from per-size sums.
inline Rational expected_over_w(const std::vector<Rational>& sums, std::size_t w) {
  const std::size_t n = sums.size() - 1;
  if (w > n) throw InputError("w exceeds n");
  Rational r = sums[w] / Rational(binomial(n, w));
  r.canonicalize();
  return r;
}

inline Rational expected_sup_exact(const LambdaCollection& lam, const Rational& p, const SelectorLimits& limits = {}) {
  return expected_over_Xp(size_sums(sup_table_exact(lam, limits), lam.n), p);
}

inline long double expected_sup_float(const LambdaCollection& lam, long double p, const SelectorLimits& limits = {}) {
  auto table = sup_table_float(lam, limits);
  long double total = 0;
  for (std::uint64_t m = 0; m < table.size(); ++m) {
    const auto k = static_cast<long double>(__builtin_popcountll(m));
    total += table[m] * std::pow(p, k) * std::pow(1 - p, static_cast<long double>(lam.n) - k);
  }
  return total;
}

inline SubsetBits sample_Xp(std::size_t n, double p, CounterRng& rng) {
  SubsetBits s(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (rng.bernoulli(p)) s.set(static_cast<Element>(i));
  }
  return s;
}

/// Uniform over C(X, w) by a partial Fisher-Yates shuffle.
inline SubsetBits sample_uniform_w_subset(std::size_t n, std::size_t w, CounterRng& rng) {
  if (w > n) throw InputError("w exceeds n");
  std::vector<Element> ids(n);
  std::iota(ids.begin(), ids.end(), Element{0});
  SubsetBits s(n);
  for (std::size_t i = 0; i < w; ++i) {
    std::size_t j = i + static_cast<std::size_t>(rng.below(n - i));
    std::swap(ids[i], ids[j]);
    s.set(ids[i]);
  }
  return s;
}

/// Monte Carlo mean with a normal-approximation interval.
struct Estimate {
  long double mean = 0;
  long double sd = 0;          // sample standard deviation of one trial
  long double std_error = 0;   // sd / sqrt(trials)
  long double half_width = 0;  // 1.96 * std_error
  std::uint64_t trials = 0;
  std::vector<long double> trace;  // running mean after each chunk
};

constexpr std::uint64_t kTrialChunk = 1 << 16;

/// Runs `trial(rng)` in fixed-size chunks, chunk c on stream c + 1 of `seed`,
/// and reduces the chunk moments in chunk order.
template <class Trial>
Estimate monte_carlo(std::uint64_t trials, std::uint64_t seed, Trial&& trial) {
  if (trials < 2) throw InputError("need at least two trials");
  const std::uint64_t chunks = (trials + kTrialChunk - 1) / kTrialChunk;
  std::vector<long double> sum(chunks, 0), sumsq(chunks, 0);
  parallel_for(chunks, [&](std::size_t c) {
    CounterRng rng(seed, c + 1);
    const std::uint64_t begin = c * kTrialChunk, end = std::min(trials, begin + kTrialChunk);
    long double s = 0, q = 0;
    for (std::uint64_t i = begin; i < end; ++i) {
      long double v = trial(rng);
      s += v;
      q += v * v;
    }
    sum[c] = s;
    sumsq[c] = q;
  });
  Estimate e;
  long double s = 0, q = 0;
  for (std::uint64_t c = 0; c < chunks; ++c) {
    s += sum[c];
    q += sumsq[c];
    e.trace.push_back(s / static_cast<long double>(std::min(trials, (c + 1) * kTrialChunk)));
  }
  e.trials = trials;
  const auto t = static_cast<long double>(trials);
  e.mean = s / t;
  e.sd = std::sqrt(std::max(0.0L, (q - t * e.mean * e.mean) / (t - 1)));
  e.std_error = e.sd / std::sqrt(t);
  e.half_width = 1.96L * e.std_error;
  return e;
}

/// Samples masks of X_p from the cumulative law over all 2^n masks.
class MaskSampler {
 public:
  MaskSampler(std::size_t n, long double p) {
    if (n > 20) throw GuardError("exact-enumeration", "mask sampler needs n <= 20");
    const std::uint64_t size = std::uint64_t{1} << n;
    cumulative_.resize(size);
    long double acc = 0;
    for (std::uint64_t m = 0; m < size; ++m) {
      const auto k = static_cast<long double>(__builtin_popcountll(m));
      acc += std::pow(p, k) * std::pow(1 - p, static_cast<long double>(n) - k);
      cumulative_[m] = static_cast<double>(acc);
    }
    cumulative_.back() = 1.0;
  }
  std::uint64_t draw(CounterRng& rng) const {
    double u = rng.uniform01();
    return static_cast<std::uint64_t>(std::upper_bound(cumulative_.begin(), cumulative_.end(), u) - cumulative_.begin());
  }

 private:
  std::vector<double> cumulative_;
};

inline Estimate expected_sup_mc(const std::vector<long double>& table, std::size_t n, long double p, std::uint64_t trials,
                                std::uint64_t seed) {
  MaskSampler sampler(n, p);
  return monte_carlo(trials, seed, [&](CounterRng& rng) { return table[sampler.draw(rng)]; });
}

inline Estimate expected_sup_mc(const LambdaCollection& lam, long double p, std::uint64_t trials, std::uint64_t seed,
                                const SelectorLimits& limits = {}) {
  return expected_sup_mc(sup_table_float(lam, limits), lam.n, p, trials, seed);
}

/// F = {S : sup_lambda sum_{i in S} lambda_i >= L M}, with lambda^S the first
/// maximizing sequence restricted to S. Members in ascending mask order.
inline WeightedFamily threshold_family(const LambdaCollection& lam, const Rational& L, const Rational& M,
                                       const Rational& p, const SelectorLimits& limits = {}) {
  lam.validate();
  if (lam.seqs.empty()) throw InputError("empty collection of sequences");
  if (lam.n > limits.max_exact_n) {
    throw GuardError("exact-enumeration", "n = " + std::to_string(lam.n) + " > " + std::to_string(limits.max_exact_n));
  }
  const Rational target = L * M;
  const std::uint64_t size = std::uint64_t{1} << lam.n;
  if (size * lam.seqs.size() > limits.max_exact_work) {
    throw GuardError("exact-enumeration", "2^n * |Lambda| exceeds " + std::to_string(limits.max_exact_work));
  }
  std::vector<Rational> best(size);
  std::vector<std::size_t> arg(size, 0);
  std::vector<Rational> sums(size);
  for (std::size_t k = 0; k < lam.seqs.size(); ++k) {
    sums[0] = 0;
    for (std::uint64_t m = 0; m < size; ++m) {
      if (m > 0) sums[m] = sums[m & (m - 1)] + lam.seqs[k][static_cast<std::size_t>(__builtin_ctzll(m))];
      if (k == 0 || sums[m] > best[m]) {
        best[m] = sums[m];
        arg[m] = k;
      }
    }
  }
  std::vector<Member> members;
  for (std::uint64_t m = 0; m < size; ++m) {
    if (best[m] < target) continue;
    Member mem{subset_of_mask(lam.n, m), {}};
    mem.set.for_each([&](Element e) { mem.weights[e] = lam.seqs[arg[m]][e]; });
    members.push_back(std::move(mem));
  }
  return WeightedFamily(GroundSet(lam.n), std::move(members), p);
}

/// P(Bin(n, p) >= k), exact.
inline Rational binomial_tail_at_least(std::size_t n, const Rational& p, std::size_t k) {
  Rational total = 0;
  for (std::size_t j = k; j <= n; ++j) {
    total += Rational(binomial(n, j)) * pow(p, static_cast<long>(j)) * pow(1 - p, static_cast<long>(n - j));
  }
  total.canonicalize();
  return total;
}

/// 1 - e^{-1/2} > 1/4, i.e. e > 16/9, from a rational lower bound on e.
inline bool e_half_fact_holds() { return e_bounds(12).lo > Rational(16, 9); }

/// E sup over a uniform w-subset, exactly when 2^n is enumerable.
struct WSubsetExpectation {
  bool exact = false;
  Rational value;      // exact value when exact
  Estimate estimate;   // Monte Carlo otherwise
  long double approx() const { return exact ? to_long_double(value) : estimate.mean; }
};

struct ConclusionReport {
  bool vacuous = false;       // F is p-small, so the premise fails
  SmallnessCertificate certificate;
  std::size_t w = 0;
  WSubsetExpectation expectation;
  long double threshold = 1e-11L;
  bool meets_threshold = false;  // informational
};

/// E sup over uniform W in C(X, w), w = floor(K n p), for a family that is not p-small.
inline ConclusionReport verify_selector_conclusion(const WeightedFamily& f, const Rational& p, std::uint64_t K,
                                                   std::uint64_t trials, std::uint64_t seed,
                                                   const SelectorLimits& limits = {},
                                                   const ExactCoverLimits& cover_limits = {}) {
  require_probability(p);
  ConclusionReport out;
  out.certificate = is_p_small(f, p, cover_limits);
  out.vacuous = out.certificate.verdict == Verdict::PSmall;
  const Integer w = floor(Rational(static_cast<unsigned long>(K)) * Rational(static_cast<unsigned long>(f.n())) * p);
  if (w > static_cast<unsigned long>(f.n())) {
    throw GuardError("w-range", "w = floor(K n p) = " + w.get_str() + " exceeds n = " + std::to_string(f.n()));
  }
  out.w = w.get_ui();
  const auto lam = LambdaCollection::from_family(f);
  if (f.n() <= limits.max_exact_n &&
      (std::uint64_t{1} << f.n()) * std::max<std::uint64_t>(1, f.size()) <= limits.max_exact_work) {
    out.expectation.exact = true;
    out.expectation.value = expected_over_w(size_sums(sup_table_exact(lam, limits), f.n()), out.w);
  } else {
    out.expectation.estimate = monte_carlo(trials, seed, [&](CounterRng& rng) {
      return to_long_double(sup_weighted(f, sample_uniform_w_subset(f.n(), out.w, rng)));
    });
  }
  out.meets_threshold = out.expectation.approx() >= out.threshold;
  return out;
}

struct ReductionReport {
  std::size_t n = 0;
  Rational p;
  std::uint64_t K = 0;
  Rational np;
  std::size_t N = 0;       // max{floor(np), 1}
  std::size_t w = 0;       // floor(K n p)
  Rational zeta;           // N / w
  Integer L_prime;         // 4 * 10^11 * K
  std::string regime;      // "np>=1", "1/2<=np<1", or "p-small"
  Rational tail;           // P(|X_p| >= floor(np)) or P(|X_p| >= 1)
  bool tail_ok = true;
  bool e_fact = true;      // 1 - e^{-1/2} > 1/4
  bool zeta_floor_ok = true;
  Rational E_Xp, E_Wprime, E_W;
  Rational factor;         // 1/2 or 1/4
  bool step_b = true;      // E_Xp >= factor * E_W'
  bool step_c = true;      // E_W' >= zeta * E_W
  bool chain = true;       // E_Xp >= factor * zeta * E_W
  Estimate coupled;        // sup(W') - zeta sup(W) under the nested coupling
  bool coupled_ok = true;  // mean + 4 sigma >= 0
  bool ok() const { return tail_ok && e_fact && zeta_floor_ok && step_b && step_c && chain && coupled_ok; }
};

/// Evaluates each inequality of the reduction from uniform w-subsets to X_p.
inline ReductionReport verify_subsampling_chain(const WeightedFamily& f, const Rational& p, std::uint64_t K,
                                                std::uint64_t trials, std::uint64_t seed,
                                                const SelectorLimits& limits = {}) {
  require_probability(p);
  if (K == 0) throw InputError("K must be at least 1");
  ReductionReport out;
  out.n = f.n();
  out.p = p;
  out.K = K;
  out.np = Rational(static_cast<unsigned long>(f.n())) * p;
  out.L_prime = Integer(400000000000UL) * Integer(static_cast<unsigned long>(K));
  out.e_fact = e_half_fact_holds();
  const bool has_empty = std::any_of(f.members().begin(), f.members().end(), [](const Member& m) { return m.set.empty(); });
  if (out.np < Rational(1, 2)) {
    if (has_empty) throw InputError("np < 1/2 yet the family is not p-small (it contains the empty set)");
    out.regime = "p-small";  // the singletons cover F at cost np <= 1/2
    return out;
  }
  const Integer fnp = floor(out.np);
  out.N = std::max<std::size_t>(fnp.get_ui(), 1);
  const Integer w = floor(Rational(static_cast<unsigned long>(K)) * out.np);
  if (w > static_cast<unsigned long>(f.n())) {
    throw GuardError("w-range", "w = floor(K n p) = " + w.get_str() + " exceeds n = " + std::to_string(f.n()));
  }
  out.w = w.get_ui();
  if (out.w < out.N) {
    throw GuardError("w-range", "w = floor(K n p) = " + w.get_str() + " is below N = " + std::to_string(out.N));
  }
  out.zeta = Rational(static_cast<unsigned long>(out.N), static_cast<unsigned long>(out.w));
  out.zeta.canonicalize();

  const auto lam = LambdaCollection::from_family(f);
  const auto sums = size_sums(sup_table_exact(lam, limits), f.n());
  out.E_Xp = expected_over_Xp(sums, p);
  out.E_Wprime = expected_over_w(sums, out.N);
  out.E_W = expected_over_w(sums, out.w);

  if (out.np >= 1) {
    out.regime = "np>=1";
    out.factor = Rational(1, 2);
    out.tail = binomial_tail_at_least(f.n(), p, fnp.get_ui());
    out.zeta_floor_ok = out.zeta >= Rational(1, 2 * K);
  } else {
    out.regime = "1/2<=np<1";
    out.factor = Rational(1, 4);
    out.tail = binomial_tail_at_least(f.n(), p, 1);
    out.zeta_floor_ok = out.zeta >= Rational(1, K);
  }
  out.tail_ok = out.tail >= out.factor;
  out.step_b = out.E_Xp >= out.factor * out.E_Wprime;
  out.step_c = out.E_Wprime >= out.zeta * out.E_W;
  out.chain = out.E_Xp >= out.factor * out.zeta * out.E_W;

  // W uniform of size w, then W' a uniform N-subset of W.
  const auto table = sup_table_float(lam, limits);
  const long double zeta = to_long_double(out.zeta);
  out.coupled = monte_carlo(trials, seed, [&](CounterRng& rng) {
    SubsetBits W = sample_uniform_w_subset(f.n(), out.w, rng);
    auto elems = W.elements();
    std::uint64_t wp = 0;
    for (std::size_t i = 0; i < out.N; ++i) {
      std::size_t j = i + static_cast<std::size_t>(rng.below(elems.size() - i));
      std::swap(elems[i], elems[j]);
      wp |= std::uint64_t{1} << elems[i];
    }
    return table[wp] - zeta * table[mask_of(W)];
  });
  // Slack of 1e-12 absorbs rounding when every trial difference is exactly 0.
  out.coupled_ok = out.coupled.mean + 4 * out.coupled.std_error >= -1e-12L;
  return out;
}

}  // namespace pcover
