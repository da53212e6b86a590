#pragma once

// Cost accounting over bad W: the exhaustive left-hand side, its bucketwise
// upper bounds, the profile series a_j, and the multiset analogs.

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <set>
#include <tuple>
#include <vector>

#include "pcover/epoly.hpp"
#include "pcover/error.hpp"
#include "pcover/fragment.hpp"
#include "pcover/multiset.hpp"
#include "pcover/parallel.hpp"
#include "pcover/rational.hpp"
#include "pcover/subset.hpp"

namespace pcover {

struct LedgerLimits {
  std::uint64_t max_w_subsets = 1'000'000;  // bound on C(n, w) or |M_M(X)|
};

/// C(n, w+t) <= C(n, w) (Jp)^{-t} with Jp = w/n, checked exactly.
inline bool counting_inequality_holds(std::size_t n, std::size_t w, std::size_t t) {
  if (w == 0 || w > n) throw InputError("need 1 <= w <= n");
  return binomial(n, w + t) * pow_integer(w, t) <= binomial(n, w) * pow_integer(n, t);
}

using BucketKey = std::tuple<int, Profile, std::uint64_t>;  // (b, s_b, t)

struct LedgerBucket {
  int b = 0;
  Profile s_b;
  std::uint64_t t = 0;
  std::uint64_t fragments = 0;  // sum over bad W of |U_W(s_b, t)|
  Rational cost;                // sum over bad W of sum_{U in U_W(s_b, t)} p^{|U|}
  Rational bound;               // C(n, w) J^{-t} 2^{n_b}
  bool within = true;
};

/// One line per (b, s_b): the bound summed over .9 n_b <= t <= n_b against C(n,w) (J/4)^{-.9 n_b}.
struct ProfileStep {
  int b = 0;
  Profile s_b;
  long double bound_sum = 0;
  long double step_bound = 0;
  bool holds = true;
};

struct CostLedger {
  std::size_t n = 0;
  Rational p;
  Rational J;
  std::size_t w = 0;
  Rational J_eff;  // w / (n p), the value of J realized by the integer w
  Integer binom_nw;
  std::uint64_t total_W = 0;
  std::uint64_t bad_W = 0;
  Rational lhs;
  Rational bucket_total;
  Rational bound_total;
  std::vector<LedgerBucket> buckets;
  std::vector<ProfileStep> steps;
  std::uint64_t range_violations = 0;  // fragments of bad W with b < 0, t < .9 n_b, or s_b = 0 at b
  bool profiles_legal = true;
  std::optional<long double> empirical_c;  // c with lhs = J^{-c} C(n, w)

  bool lhs_within_buckets() const { return lhs <= bucket_total; }
  bool buckets_within_bounds() const {
    return std::all_of(buckets.begin(), buckets.end(), [](const LedgerBucket& b) { return b.within; });
  }
  bool ok() const { return lhs_within_buckets() && buckets_within_bounds() && lhs <= bound_total && range_violations == 0; }
};

namespace detail {

struct BucketAccumulator {
  std::uint64_t fragments = 0;
  Rational cost;  // set case: p^t sum; multiset case: coefficient of e^t
};

inline bool in_claimed_range(const FragmentEngine& e, std::size_t s, const FragmentResult& r) {
  if (r.b < 0) return false;
  const auto nb = e.n_b(s, r.b);
  const auto& mr = e.config().mass_ratio;
  if (mr.get_den() * Integer(static_cast<unsigned long>(r.t)) < mr.get_num() * Integer(static_cast<unsigned long>(nb))) {
    return false;
  }
  return e.partial_profile(s, r.b).back() > 0;
}

}  // namespace detail

/// Exhaustive ledger over W in C(X, w), w = floor(J n p).
inline CostLedger aggregate_bad_cost(const FragmentEngine& e, const Rational& p, const Rational& J,
                                     const LedgerLimits& limits = {}) {
  require_probability(p);
  const auto& f = e.family();
  if (f.multiset) throw InputError("set ledger needs a set family");
  if (J <= 0) throw InputError("J must be positive");
  CostLedger out;
  out.n = f.n;
  out.p = p;
  out.J = J;
  const Integer w_int = floor(J * Rational(static_cast<unsigned long>(f.n)) * p);
  if (w_int < 1 || w_int > static_cast<long>(f.n)) {
    throw GuardError("ledger-w", "w = floor(J n p) = " + w_int.get_str() + " must lie in 1.." + std::to_string(f.n));
  }
  out.w = static_cast<std::size_t>(w_int.get_ui());
  out.J_eff = Rational(static_cast<unsigned long>(out.w)) / (Rational(static_cast<unsigned long>(f.n)) * p);
  out.J_eff.canonicalize();
  out.binom_nw = binomial(f.n, out.w);
  if (out.binom_nw > Integer(static_cast<unsigned long>(limits.max_w_subsets))) {
    throw GuardError("w-subsets", "C(" + std::to_string(f.n) + "," + std::to_string(out.w) + ") = " +
                                      out.binom_nw.get_str() + " exceeds " + std::to_string(limits.max_w_subsets));
  }

  std::vector<Counts> all_W;
  SubsetBits ground(f.n);
  for (std::size_t i = 0; i < f.n; ++i) ground.set(static_cast<Element>(i));
  for_each_k_subset(ground, out.w, [&](const SubsetBits& W) {
    all_W.push_back(to_counts(W));
    return false;
  });
  out.total_W = all_W.size();

  std::vector<Rational> powers(f.n + 1);
  powers[0] = 1;
  for (std::size_t k = 1; k <= f.n; ++k) powers[k] = powers[k - 1] * p;

  struct PerW {
    bool bad = false;
    Rational lhs;
    std::set<std::pair<BucketKey, Counts>> entries;
    std::uint64_t range_violations = 0;
  };
  std::vector<PerW> results(all_W.size());
  parallel_for(all_W.size(), [&](std::size_t idx) {
    const Counts& W = all_W[idx];
    auto& r = results[idx];
    if (e.is_good(W)) return;
    r.bad = true;
    std::set<Counts> cover;
    for (std::size_t s = 0; s < e.size(); ++s) {
      auto frag = e.minimum_fragment(s, W);
      cover.insert(frag.T);
      if (!detail::in_claimed_range(e, s, frag)) ++r.range_violations;
      r.entries.insert({BucketKey{frag.b, e.partial_profile(s, frag.b), frag.t}, frag.T});
    }
    for (const auto& T : cover) {
      std::size_t t = 0;
      for (auto c : T) t += c;
      r.lhs += powers[t];
    }
  });

  std::map<BucketKey, detail::BucketAccumulator> acc;
  for (const auto& r : results) {
    if (!r.bad) continue;
    ++out.bad_W;
    out.lhs += r.lhs;
    out.range_violations += r.range_violations;
    for (const auto& [key, T] : r.entries) {
      auto& slot = acc[key];
      ++slot.fragments;
      slot.cost += powers[std::get<2>(key)];
    }
  }

  std::map<std::pair<int, Profile>, ProfileStep> steps;
  const long double j_quarter = to_long_double(out.J_eff) / 4.0L;
  const long double binom_ld = to_long_double(Rational(out.binom_nw));
  for (const auto& [key, a] : acc) {
    const auto& [b, s_b, t] = key;
    LedgerBucket bucket;
    bucket.b = b;
    bucket.s_b = s_b;
    bucket.t = t;
    bucket.fragments = a.fragments;
    bucket.cost = a.cost;
    std::uint64_t nb = 0;
    for (auto v : s_b) nb += v;
    bucket.bound = Rational(out.binom_nw) * pow(out.J_eff, -static_cast<long>(t)) * Rational(pow_integer(2, nb));
    bucket.bound.canonicalize();
    bucket.within = bucket.cost <= bucket.bound;
    if (!is_legal(s_b, f.base)) out.profiles_legal = false;
    out.bucket_total += bucket.cost;
    out.bound_total += bucket.bound;
    if (b >= 0) {
      auto& step = steps[{b, s_b}];
      step.b = b;
      step.s_b = s_b;
      step.bound_sum = 0;
      const Rational lo = e.config().mass_ratio * Rational(static_cast<unsigned long>(nb));
      for (Integer tt = ceil(lo); tt <= static_cast<unsigned long>(nb); ++tt) {
        step.bound_sum += binom_ld * std::pow(to_long_double(out.J_eff), -static_cast<long double>(tt.get_ui())) *
                          std::pow(2.0L, static_cast<long double>(nb));
      }
      step.step_bound = binom_ld * std::pow(j_quarter, -0.9L * static_cast<long double>(nb));
    }
    out.buckets.push_back(std::move(bucket));
  }
  for (auto& [key, step] : steps) {
    step.holds = step.bound_sum <= step.step_bound * (1.0L + 1e-12L);
    out.steps.push_back(step);
  }
  if (out.lhs > 0 && out.J_eff > 1) {
    const long double ratio = to_long_double(out.lhs / Rational(out.binom_nw));
    out.empirical_c = -std::log(ratio) / std::log(to_long_double(out.J_eff));
  }
  return out;
}

/// a_j = log_base(2 base^4 (j+1)^2) * ratio^{-.9 max{1, base^j/(base^4 (j+1)^2)}}
/// and the chain  sum_b sum_{s_b} ratio^{-.9 n_b} <= prod(1 + a_j) - 1 <= exp(sum a_j) - 1.
struct AjSeries {
  long double ratio = 0;
  int tau = 0;
  std::vector<long double> a;
  long double sum_a = 0;
  long double product_bound = 0;  // prod (1 + a_j) - 1
  long double exp_bound = 0;      // exp(sum a_j) - 1
  std::optional<long double> exact_sum;
  bool chain_holds = true;
};

inline long double bucket_floor_value(int j, std::uint32_t base) {
  long double v = std::pow(static_cast<long double>(base), static_cast<long double>(j)) /
                  (std::pow(static_cast<long double>(base), 4.0L) * (j + 1) * (j + 1));
  return std::max(1.0L, v);
}

/// Series at a given ratio (J/4 for sets, e^{-4} J_0 for multisets).
/// The exact profile sum is enumerated when tau <= max_exact_tau.
inline AjSeries aj_series_at_ratio(long double ratio, int tau, std::uint32_t base = 100, int max_exact_tau = 3) {
  if (!(ratio > 1)) throw InputError("the series needs ratio > 1");
  if (tau < 0) throw InputError("tau must be nonnegative");
  AjSeries out;
  out.ratio = ratio;
  out.tau = tau;
  long double product = 1;
  for (int j = 0; j <= tau; ++j) {
    long double aj = profile_count_bound(j, base) * std::pow(ratio, -0.9L * bucket_floor_value(j, base));
    out.a.push_back(aj);
    out.sum_a += aj;
    product *= 1 + aj;
  }
  out.product_bound = product - 1;
  out.exp_bound = std::expm1(out.sum_a);
  const long double tol = 1e-12L;
  out.chain_holds = out.product_bound <= out.exp_bound * (1 + tol);
  if (tau <= max_exact_tau) {
    long double total = 0;
    for (int b = 0; b <= tau; ++b) {
      for (const auto& s : enumerate_legal_partial_profiles(b, base)) {
        if (s.back() == 0) continue;
        long double nb = 0;
        for (auto v : s) nb += static_cast<long double>(v);
        total += std::pow(ratio, -0.9L * nb);
      }
    }
    out.exact_sum = total;
    out.chain_holds = out.chain_holds && total <= out.product_bound * (1 + tol);
  }
  return out;
}

inline AjSeries aj_series(long double J, int tau, std::uint32_t base = 100, int max_exact_tau = 3) {
  if (!(J > 4)) throw InputError("the series needs J > 4");
  return aj_series_at_ratio(J / 4.0L, tau, base, max_exact_tau);
}

// ---------------------------------------------------------------------------
// Multiset ledger

struct MultiLedgerBucket {
  int b = 0;
  Profile s_b;
  std::uint64_t t = 0;
  std::uint64_t fragments = 0;
  Rational coefficient;        // bucket cost = coefficient * e^t
  Rational bound_coefficient;  // (e/K)^t 2^{3 n_b} = bound_coefficient * e^t
  bool within = true;
};

struct MultiCostLedger {
  std::size_t M = 0;
  std::size_t N = 0;
  std::size_t K = 0;
  std::uint64_t total_W = 0;
  std::uint64_t bad_W = 0;
  Rational p_bad;
  EPoly lhs;
  EPoly bucket_total;
  EPoly bound_total;
  std::vector<MultiLedgerBucket> buckets;
  std::uint64_t range_violations = 0;
  long double J0 = 0;
  long double c = 0;
  std::optional<AjSeries> series;  // at ratio e^{-4} J0, j >= 0
  bool tail_condition = false;     // exp(sum a_j) - 1 <= J0^{-c}

  bool lhs_within_buckets() const { return lhs <= bucket_total; }
  bool buckets_within_bounds() const {
    return std::all_of(buckets.begin(), buckets.end(), [](const MultiLedgerBucket& b) { return b.within; });
  }
  bool ok() const { return lhs_within_buckets() && buckets_within_bounds() && lhs <= bound_total && range_violations == 0; }
};

/// Rational part of prod_x (e N mu(x))^{T(x)} / T(x)!.
inline Rational poissonized_coefficient(const Counts& T, const std::vector<Rational>& mu, std::size_t N) {
  Rational r = 1;
  for (std::size_t x = 0; x < T.size(); ++x) {
    if (T[x] > 0) r *= pow(Rational(static_cast<unsigned long>(N)) * mu[x], T[x]) / Rational(factorial(T[x]));
  }
  r.canonicalize();
  return r;
}

/// Every W in M_M(X), M = K N, in colex order of counts.
inline std::vector<Counts> all_multisets(std::size_t n, std::size_t size, const LedgerLimits& limits) {
  const Integer space = multiset_space_size(n, size);
  if (space > Integer(static_cast<unsigned long>(limits.max_w_subsets))) {
    throw GuardError("multiset-space", "|M_" + std::to_string(size) + "(X)| = " + space.get_str() + " exceeds " +
                                           std::to_string(limits.max_w_subsets));
  }
  std::vector<Counts> out;
  for_each_multiset_of_size(n, size, [&](const Multiset& m) { out.push_back(m.dense()); });
  return out;
}

inline MultiCostLedger aggregate_bad_cost_multi(const FragmentEngine& e, const MultisetDistribution& d, long double J0,
                                                long double c, const LedgerLimits& limits = {}) {
  d.validate();
  const auto& f = e.family();
  if (d.n() != f.n) throw InputError("distribution and family over different ground sets");
  MultiCostLedger out;
  out.N = d.N;
  out.K = d.K;
  out.M = d.K * d.N;
  out.J0 = J0;
  out.c = c;

  const auto all_W = all_multisets(f.n, out.M, limits);
  out.total_W = all_W.size();

  struct PerW {
    bool bad = false;
    Rational prob;
    EPoly lhs;
    std::set<std::pair<BucketKey, Counts>> entries;
    std::uint64_t range_violations = 0;
  };
  std::vector<PerW> results(all_W.size());
  parallel_for(all_W.size(), [&](std::size_t idx) {
    const Counts& W = all_W[idx];
    auto& r = results[idx];
    if (e.is_good(W)) return;
    r.bad = true;
    r.prob = multiset_prob(Multiset::from_counts(W), d.mu, out.M);
    std::set<Counts> cover;
    for (std::size_t s = 0; s < e.size(); ++s) {
      auto frag = e.minimum_fragment(s, W);
      cover.insert(frag.T);
      if (!detail::in_claimed_range(e, s, frag)) ++r.range_violations;
      r.entries.insert({BucketKey{frag.b, e.partial_profile(s, frag.b), frag.t}, frag.T});
    }
    for (const auto& T : cover) {
      std::size_t t = 0;
      for (auto v : T) t += v;
      r.lhs += EPoly::term(r.prob * poissonized_coefficient(T, d.mu, d.N), static_cast<int>(t));
    }
  });

  std::map<BucketKey, detail::BucketAccumulator> acc;
  for (const auto& r : results) {
    if (!r.bad) continue;
    ++out.bad_W;
    out.p_bad += r.prob;
    out.lhs += r.lhs;
    out.range_violations += r.range_violations;
    for (const auto& [key, T] : r.entries) {
      auto& slot = acc[key];
      ++slot.fragments;
      slot.cost += r.prob * poissonized_coefficient(T, d.mu, d.N);
    }
  }
  for (const auto& [key, a] : acc) {
    const auto& [b, s_b, t] = key;
    MultiLedgerBucket bucket;
    bucket.b = b;
    bucket.s_b = s_b;
    bucket.t = t;
    bucket.fragments = a.fragments;
    bucket.coefficient = a.cost;
    std::uint64_t nb = 0;
    for (auto v : s_b) nb += v;
    bucket.bound_coefficient =
        pow(Rational(static_cast<unsigned long>(d.K)), -static_cast<long>(t)) * Rational(pow_integer(2, 3 * nb));
    bucket.within = bucket.coefficient <= bucket.bound_coefficient;
    out.bucket_total += EPoly::term(bucket.coefficient, static_cast<int>(t));
    out.bound_total += EPoly::term(bucket.bound_coefficient, static_cast<int>(t));
    out.buckets.push_back(std::move(bucket));
  }

  const long double ratio = std::exp(-4.0L) * J0;
  if (ratio > 1) {
    // The a_j vanish superexponentially once base^j exceeds base^4 (j+1)^2;
    // twelve terms exhaust long double range.
    out.series = aj_series_at_ratio(ratio, std::max(f.tau, 12), f.base, -1);
    out.tail_condition = out.series->exp_bound <= std::pow(J0, -c);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Conclusion of the multiset argument at desk scale

struct MultisetConclusionReport {
  bool premise = false;     // exact minimum Poissonized cover cost > 1/2
  EPoly min_cover_cost;
  bool normalized = true;   // every member has sum_i S(i) lambda^S(i) >= 1
  Rational expected_sup_M;  // under the size-KN law
  Rational expected_sup_N;  // under the size-N law
  Rational p_bad;           // P[W bad] under the size-KN law
  Rational good_floor;      // (1 - P[bad]) * threshold
  bool sup_above_good_floor = true;  // E sup >= (1 - P[bad]) * threshold
  bool scaling_holds = true;         // E_N sup >= E_M sup / K
  long double bad_bound = 0;         // 2 J0^{-c}
  long double chain_value = 0;       // (1 - 2 J0^{-c}) * threshold
  bool meets_target = false;         // E_M sup >= 10^{-11} (informational)
};

inline Rational multiset_sup(const MultisetFamily& f, const Counts& W) {
  Rational best = 0;
  for (const auto& m : f.members) {
    Rational v = 0;
    for (const auto& [e, w] : m.weights) v += Rational(W[e]) * w;
    if (v > best) best = v;
  }
  return best;
}

inline MultisetConclusionReport verify_multiset_conclusion(const MultisetFamily& f, const MultisetDistribution& d,
                                                           long double J0, long double c,
                                                           const Rational& threshold = Rational(1, 10000000000UL),
                                                           const LedgerLimits& limits = {},
                                                           const MultisetCoverLimits& cover_limits = {}) {
  f.validate();
  d.validate();
  if (d.n() != f.n) throw InputError("distribution and family over different ground sets");
  MultisetConclusionReport out;
  auto best = min_multiset_cover_cost_exact(f.sets(), d.mu, d.N, cover_limits);
  out.min_cover_cost = best.cost;
  out.premise = !f.members.empty() && compare(best.cost, EPoly(Rational(1, 2))) > 0;
  for (const auto& m : f.members) {
    Rational total = 0;
    for (const auto& [e, cnt] : m.set.counts()) total += Rational(cnt) * m.weight_of(e);
    if (total < 1) out.normalized = false;
  }
  const std::size_t M = d.K * d.N;
  for (const auto& W : all_multisets(f.n, M, limits)) {
    Rational prob = multiset_prob(Multiset::from_counts(W), d.mu, M);
    Rational sup = multiset_sup(f, W);
    out.expected_sup_M += prob * sup;
    if (sup < threshold) out.p_bad += prob;
  }
  for (const auto& W : all_multisets(f.n, d.N, limits)) {
    out.expected_sup_N += multiset_prob(Multiset::from_counts(W), d.mu, d.N) * multiset_sup(f, W);
  }
  out.good_floor = (1 - out.p_bad) * threshold;
  out.sup_above_good_floor = out.expected_sup_M >= out.good_floor;
  out.scaling_holds = Rational(static_cast<unsigned long>(d.K)) * out.expected_sup_N >= out.expected_sup_M;
  out.bad_bound = 2.0L * std::pow(J0, -c);
  out.chain_value = (1.0L - out.bad_bound) * to_long_double(threshold);
  out.meets_target = out.expected_sup_M >= Rational(1, 100000000000UL);
  return out;
}

}  // namespace pcover
