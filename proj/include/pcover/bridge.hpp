#pragma once

// From a finite positive empirical process to a multiset selector instance:
// discretization into cells, witness events built from cover elements, and
// exhaustive checks of tail coverage and the Markov chain of bounds.
//
// Z_f = (1/N) sum_{i<=N} f(Y_i), Y_i i.i.d. from nu on a finite point set.

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "pcover/epoly.hpp"
#include "pcover/error.hpp"
#include "pcover/multiset.hpp"
#include "pcover/rational.hpp"

namespace pcover {

struct BridgeLimits {
  std::uint64_t max_tuples = 1'000'000;  // |points|^N enumeration
  MultisetCoverLimits cover{};
};

struct FiniteEmpiricalInstance {
  std::vector<std::string> points;
  std::vector<Rational> nu;
  std::vector<std::vector<Rational>> functions;  // functions[i][y] = f_i(y)
  std::size_t N = 1;

  std::size_t size() const { return nu.size(); }

  void validate() const {
    if (nu.empty()) throw InputError("instance has no points");
    if (!points.empty() && points.size() != nu.size()) throw InputError("points and nu differ in length");
    if (functions.empty()) throw InputError("instance has no functions");
    if (N == 0) throw InputError("N must be at least 1");
    Rational total = 0;
    for (const auto& v : nu) {
      if (v < 0) throw InputError("negative probability in nu");
      total += v;
    }
    if (total != 1) throw InputError("nu sums to " + to_string(total) + ", not 1");
    for (std::size_t i = 0; i < functions.size(); ++i) {
      if (functions[i].size() != nu.size()) throw InputError("function " + std::to_string(i) + " has the wrong length");
      for (const auto& v : functions[i]) {
        if (v < 0) throw InputError("function " + std::to_string(i) + " takes a negative value");
      }
    }
  }
};

/// Visits every N-tuple over {0..m-1} in lexicographic order.
template <class F>
void for_each_tuple(std::size_t m, std::size_t N, std::uint64_t max_tuples, F&& f) {
  Integer total = pow_integer(m, N);
  if (total > Integer(static_cast<unsigned long>(max_tuples))) {
    throw GuardError("tuple-enumeration", std::to_string(m) + "^" + std::to_string(N) + " tuples exceed " +
                                              std::to_string(max_tuples));
  }
  std::vector<std::size_t> tuple(N, 0);
  while (true) {
    f(static_cast<const std::vector<std::size_t>&>(tuple));
    std::size_t i = N;
    while (i > 0 && tuple[i - 1] + 1 == m) {
      tuple[i - 1] = 0;
      --i;
    }
    if (i == 0) return;
    ++tuple[i - 1];
  }
}

/// sup_i (1/N) sum_k f_i(y_k) for one tuple of point indices.
inline Rational sup_Z(const FiniteEmpiricalInstance& inst, const std::vector<std::size_t>& tuple) {
  Rational best;
  for (std::size_t i = 0; i < inst.functions.size(); ++i) {
    Rational v = 0;
    for (auto y : tuple) v += inst.functions[i][y];
    if (i == 0 || v > best) best = v;
  }
  best /= static_cast<unsigned long>(tuple.size());
  return best;
}

/// E sup_f Z_f, exact, through the multinomial law on point counts.
inline Rational expected_sup_Z(const FiniteEmpiricalInstance& inst) {
  inst.validate();
  Rational total = 0;
  for_each_multiset_of_size(inst.size(), inst.N, [&](const Multiset& w) {
    Rational best;
    for (std::size_t i = 0; i < inst.functions.size(); ++i) {
      Rational v = 0;
      for (const auto& [y, c] : w.counts()) v += Rational(c) * inst.functions[i][y];
      if (i == 0 || v > best) best = v;
    }
    total += multiset_prob(w, inst.nu, inst.N) * best / static_cast<unsigned long>(inst.N);
  });
  total.canonicalize();
  return total;
}

/// Rescales every function so that E sup_f Z_f = 1; returns the factor applied.
inline Rational normalize(FiniteEmpiricalInstance& inst) {
  Rational e = expected_sup_Z(inst);
  if (e <= 0) throw InputError("E sup Z_f must be positive to normalize");
  for (auto& f : inst.functions) {
    for (auto& v : f) v /= e;
  }
  Rational factor = 1 / e;
  factor.canonicalize();
  return factor;
}

/// Nonempty cells I(k_1..k_M) with k_i = floor(f_i(y)/eps), in lexicographic
/// order of k; mu is the pushforward of nu and lambda^i(cell) = k_i eps.
struct CellPartition {
  Rational eps;
  std::vector<std::vector<Integer>> keys;  // per cell
  std::vector<std::size_t> cell_of;        // per point
  std::vector<Rational> mu;                // per cell
  std::vector<std::vector<Rational>> lambda;  // lambda[i][cell]

  std::size_t cells() const { return keys.size(); }

  /// Multiset of cells hit by a tuple of points.
  Multiset cell_multiset(const std::vector<std::size_t>& tuple) const {
    Multiset w(cells());
    for (auto y : tuple) w.add(static_cast<Element>(cell_of[y]));
    return w;
  }

  /// sup_i sum_x W(x) lambda^i(x)
  Rational sup_lambda(const Multiset& w) const {
    Rational best;
    for (std::size_t i = 0; i < lambda.size(); ++i) {
      Rational v = 0;
      for (const auto& [x, c] : w.counts()) v += Rational(c) * lambda[i][x];
      if (i == 0 || v > best) best = v;
    }
    return best;
  }
};

inline CellPartition discretize(const FiniteEmpiricalInstance& inst, const Rational& eps) {
  inst.validate();
  if (eps <= 0) throw InputError("eps must be positive");
  const std::size_t M = inst.functions.size();
  std::vector<std::vector<Integer>> point_keys(inst.size(), std::vector<Integer>(M));
  for (std::size_t y = 0; y < inst.size(); ++y) {
    for (std::size_t i = 0; i < M; ++i) point_keys[y][i] = floor(inst.functions[i][y] / eps);
  }
  CellPartition out;
  out.eps = eps;
  std::map<std::vector<Integer>, std::size_t> index;
  auto sorted = point_keys;
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
  for (const auto& k : sorted) {
    index.emplace(k, out.keys.size());
    out.keys.push_back(k);
  }
  out.mu.assign(out.keys.size(), Rational(0));
  out.cell_of.resize(inst.size());
  for (std::size_t y = 0; y < inst.size(); ++y) {
    out.cell_of[y] = index.at(point_keys[y]);
    out.mu[out.cell_of[y]] += inst.nu[y];
  }
  out.lambda.assign(M, std::vector<Rational>(out.keys.size()));
  for (std::size_t c = 0; c < out.keys.size(); ++c) {
    for (std::size_t i = 0; i < M; ++i) out.lambda[i][c] = Rational(out.keys[c][i]) * eps;
  }
  return out;
}

/// Largest |sup Z_f - (1/N) sup_i sum_x W(x) lambda^i(x)| over all tuples, and
/// how many tuples exceed eps.
struct DiscretizationCheck {
  Rational max_error;
  std::uint64_t tuples = 0;
  std::uint64_t violations = 0;
  bool measure_preserved = true;  // sum of mu over cells is 1
};

inline DiscretizationCheck check_discretization(const FiniteEmpiricalInstance& inst, const CellPartition& cells,
                                                const BridgeLimits& limits = {}) {
  DiscretizationCheck out;
  Rational mass = 0;
  for (const auto& m : cells.mu) mass += m;
  out.measure_preserved = mass == 1;
  for_each_tuple(inst.size(), inst.N, limits.max_tuples, [&](const std::vector<std::size_t>& tuple) {
    ++out.tuples;
    Rational a = sup_Z(inst, tuple);
    Rational b = cells.sup_lambda(cells.cell_multiset(tuple)) / static_cast<unsigned long>(inst.N);
    Rational err = abs(a - b);
    if (err > out.max_error) out.max_error = err;
    if (err > cells.eps) ++out.violations;
  });
  return out;
}

/// H = {sum_k g~(X_k) <= t~} for g~(x) = log(N mu(x)/G(x)) on G, 0 elsewhere,
/// t~ = sum_x G(x) g~(x). Membership is decided exactly: a multiset W of cells
/// lies in H iff prod_x r_x^{W(x)} <= prod_x r_x^{G(x)} with r_x = N mu(x)/G(x).
struct WitnessEvent {
  Multiset G;
  std::size_t N = 1;
  std::vector<Rational> ratio;    // r_x (1 off G)
  std::vector<long double> g;     // g~(x) = log r_x
  long double t = 0;              // t~
  Rational threshold;             // prod_x r_x^{G(x)} = e^{t~}

  bool contains(const Multiset& w) const {
    Rational lhs = 1;
    for (const auto& [x, c] : w.counts()) lhs *= pow(ratio[x], c);
    return lhs <= threshold;
  }

  /// Exported as the event {Z_h >= s} with h = -N g~ o pi >= 0 and s = -t~.
  std::vector<long double> exported_h(const CellPartition& cells) const {
    std::vector<long double> h(cells.cell_of.size());
    for (std::size_t y = 0; y < h.size(); ++y) h[y] = -static_cast<long double>(N) * g[cells.cell_of[y]];
    return h;
  }
  long double exported_s() const { return -t; }
};

inline WitnessEvent witness_from_cover_element(const Multiset& G, const std::vector<Rational>& mu, std::size_t N) {
  if (G.universe() != mu.size()) throw InputError("cover element and distribution over different ground sets");
  if (!is_pruned(G, mu, N)) throw InputError("cover element is not pruned: some x has N mu(x) / G(x) > 1");
  WitnessEvent ev;
  ev.G = G;
  ev.N = N;
  ev.ratio.assign(mu.size(), Rational(1));
  ev.g.assign(mu.size(), 0.0L);
  ev.threshold = 1;
  for (const auto& [x, c] : G.counts()) {
    ev.ratio[x] = Rational(static_cast<unsigned long>(N)) * mu[x] / Rational(c);
    ev.ratio[x].canonicalize();
    ev.g[x] = ev.ratio[x] == 0 ? -std::numeric_limits<long double>::infinity() : std::log(to_long_double(ev.ratio[x]));
    ev.threshold *= pow(ev.ratio[x], c);
    ev.t += static_cast<long double>(c) * ev.g[x];
  }
  return ev;
}

/// Tuples of cells whose multiset contains G but which fall outside H.
inline std::uint64_t containment_failures(const WitnessEvent& ev, std::size_t cells, const BridgeLimits& limits = {}) {
  std::uint64_t failures = 0;
  for_each_tuple(cells, ev.N, limits.max_tuples, [&](const std::vector<std::size_t>& tuple) {
    Multiset w(cells);
    for (auto x : tuple) w.add(static_cast<Element>(x));
    if (ev.G.is_subset_of(w) && !ev.contains(w)) ++failures;
  });
  return failures;
}

/// P[H] <= (1+|G|/N)^N prod (N mu/G)^G <= e^{|G|} prod (N mu/G)^G <= prod (e N mu)^G / G!
struct MarkovChainReport {
  Rational prob;      // exact P[H]
  Rational markov;    // (1 + |G|/N)^N e^{t~}
  EPoly exponential;  // e^{|G|} e^{t~}
  EPoly poissonized;  // prod (e N mu)^G / G!
  bool step1 = true, step2 = true, step3 = true;
  bool ok() const { return step1 && step2 && step3; }
};

inline MarkovChainReport markov_chain_check(const Multiset& G, const std::vector<Rational>& mu, std::size_t N) {
  auto ev = witness_from_cover_element(G, mu, N);
  MarkovChainReport out;
  for_each_multiset_of_size(mu.size(), N, [&](const Multiset& w) {
    if (ev.contains(w)) out.prob += multiset_prob(w, mu, N);
  });
  const auto k = static_cast<unsigned long>(G.size());
  out.markov = pow(1 + Rational(k, static_cast<unsigned long>(N)), static_cast<long>(N)) * ev.threshold;
  out.markov.canonicalize();
  out.exponential = EPoly::term(ev.threshold, static_cast<int>(k));
  out.poissonized = poissonized_cost(G, mu, N);
  out.step1 = out.prob <= out.markov;
  out.step2 = compare(EPoly(out.markov), out.exponential) <= 0;
  out.step3 = compare(out.exponential, out.poissonized) <= 0;
  return out;
}

/// Exhaustive check that the tail {sup Z_f >= tail_factor * L * E sup Z_f} lies
/// inside the union of the witness events of an exact minimum cover of
/// F_N = {S in M_N(cells) : sup_i sum S lambda^i >= L * E sup_i sum W lambda^i}.
struct TailEscape {
  std::vector<std::size_t> tuple;
  Rational sup;
};

struct TailCoverageReport {
  Rational normalization;      // factor applied so that E sup Z_f = 1
  Rational eps;
  Rational L;
  Rational tail_factor;
  std::size_t cells = 0;
  Rational expected_discrete;  // E sup_i sum_x W(x) lambda^i(x), size-N law on cells
  std::vector<Multiset> family;  // F_N
  std::vector<Multiset> cover;   // pruned exact minimum cover
  EPoly cover_cost;
  bool certified = false;        // cover cost <= 1/2
  std::vector<Rational> event_probs;
  Rational budget;               // sum of P[H_G]
  bool budget_ok = true;         // budget <= 1/2 whenever certified
  std::uint64_t tuples = 0;
  std::uint64_t tail_tuples = 0;
  std::vector<TailEscape> escapes;
  bool ok() const { return escapes.empty() && budget_ok; }
};

inline TailCoverageReport tail_coverage_check(FiniteEmpiricalInstance inst, const std::optional<Rational>& eps_opt,
                                              const Rational& L, const Rational& tail_factor = 2,
                                              const BridgeLimits& limits = {}) {
  inst.validate();
  if (L <= 0) throw InputError("L must be positive");
  TailCoverageReport out;
  out.normalization = normalize(inst);
  out.eps = eps_opt ? *eps_opt : Rational(1, 100);
  out.L = L;
  out.tail_factor = tail_factor;
  const auto cells = discretize(inst, out.eps);
  out.cells = cells.cells();

  for_each_multiset_of_size(cells.cells(), inst.N, [&](const Multiset& w) {
    out.expected_discrete += multiset_prob(w, cells.mu, inst.N) * cells.sup_lambda(w);
  });
  const Rational target = L * out.expected_discrete;
  for_each_multiset_of_size(cells.cells(), inst.N, [&](const Multiset& s) {
    if (cells.sup_lambda(s) >= target) out.family.push_back(s);
  });

  auto best = min_multiset_cover_cost_exact(out.family, cells.mu, inst.N, limits.cover);
  out.cover_cost = best.cost;
  out.certified = compare(best.cost, EPoly(Rational(1, 2))) <= 0;
  std::vector<WitnessEvent> events;
  for (const auto& g : best.cover) {
    out.cover.push_back(prune_cover(g, cells.mu, inst.N));
    events.push_back(witness_from_cover_element(out.cover.back(), cells.mu, inst.N));
    Rational prob = 0;
    for_each_multiset_of_size(cells.cells(), inst.N, [&](const Multiset& w) {
      if (events.back().contains(w)) prob += multiset_prob(w, cells.mu, inst.N);
    });
    out.event_probs.push_back(prob);
    out.budget += prob;
  }
  out.budget_ok = !out.certified || out.budget <= Rational(1, 2);

  const Rational tail = tail_factor * L;  // E sup Z_f = 1 after normalization
  for_each_tuple(inst.size(), inst.N, limits.max_tuples, [&](const std::vector<std::size_t>& tuple) {
    ++out.tuples;
    Rational s = sup_Z(inst, tuple);
    if (s < tail) return;
    ++out.tail_tuples;
    const Multiset w = cells.cell_multiset(tuple);
    bool inside = std::any_of(events.begin(), events.end(), [&](const WitnessEvent& ev) { return ev.contains(w); });
    if (!inside) out.escapes.push_back({tuple, s});
  });
  return out;
}

/// V_k: k-tuples of cells whose multiset equals some G in the cover with |G| = k.
struct SymmetricWitnessLevel {
  std::size_t k = 0;
  std::uint64_t tuples = 0;
  Rational prob;          // P((Y_1..Y_k) in V_k)
  long double bound = 0;  // (1/2) (c k / N)^k
  bool within = true;
  bool symmetric = true;
};

inline std::vector<SymmetricWitnessLevel> symmetric_witness_sets(const std::vector<Multiset>& cover,
                                                                 const std::vector<Rational>& mu, std::size_t N,
                                                                 long double c = 1.0L, const BridgeLimits& limits = {}) {
  std::map<std::size_t, std::vector<Multiset>> by_size;
  for (const auto& g : cover) {
    if (g.universe() != mu.size()) throw InputError("cover element and distribution over different ground sets");
    if (g.size() > 0) by_size[g.size()].push_back(g);
  }
  std::vector<SymmetricWitnessLevel> out;
  for (auto& [k, gs] : by_size) {
    std::sort(gs.begin(), gs.end());
    gs.erase(std::unique(gs.begin(), gs.end()), gs.end());
    SymmetricWitnessLevel level;
    level.k = k;
    for (const auto& g : gs) level.prob += multiset_prob(g, mu, k);
    auto in_v = [&](const std::vector<std::size_t>& tuple) {
      Multiset w(mu.size());
      for (auto x : tuple) w.add(static_cast<Element>(x));
      return std::binary_search(gs.begin(), gs.end(), w);
    };
    for_each_tuple(mu.size(), k, limits.max_tuples, [&](const std::vector<std::size_t>& tuple) {
      if (!in_v(tuple)) return;
      ++level.tuples;
      if (k <= 4) {
        auto perm = tuple;
        std::sort(perm.begin(), perm.end());
        do {
          if (!in_v(perm)) level.symmetric = false;
        } while (std::next_permutation(perm.begin(), perm.end()));
      }
    });
    level.bound = 0.5L * std::pow(c * static_cast<long double>(k) / static_cast<long double>(N), static_cast<long double>(k));
    level.within = to_long_double(level.prob) <= level.bound * (1 + 1e-15L);
    out.push_back(level);
  }
  return out;
}

}  // namespace pcover
