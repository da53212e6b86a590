#pragma once

// Multisets over a finite ground set, the multinomial multiset law, and
// Poissonized cover costs prod_x (e N mu(x))^{G(x)} / G(x)!.

#include <algorithm>
#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "pcover/epoly.hpp"
#include "pcover/error.hpp"
#include "pcover/rational.hpp"
#include "pcover/rng.hpp"
#include "pcover/set_cover.hpp"
#include "pcover/subset.hpp"

namespace pcover {

class Multiset {
 public:
  using Count = std::uint32_t;

  Multiset() = default;
  explicit Multiset(std::size_t universe) : n_(universe) {}
  Multiset(std::size_t universe, std::initializer_list<std::pair<const Element, Count>> init) : n_(universe) {
    for (const auto& [e, c] : init) set_count(e, c);
  }
  static Multiset from_counts(const std::vector<Count>& dense) {
    Multiset m(dense.size());
    for (std::size_t i = 0; i < dense.size(); ++i) m.set_count(static_cast<Element>(i), dense[i]);
    return m;
  }

  std::size_t universe() const { return n_; }
  const std::map<Element, Count>& counts() const { return counts_; }
  Count count(Element e) const {
    auto it = counts_.find(e);
    return it == counts_.end() ? 0 : it->second;
  }
  bool contains(Element e) const { return count(e) > 0; }
  bool empty() const { return counts_.empty(); }

  std::size_t size() const {
    std::size_t s = 0;
    for (const auto& [e, c] : counts_) s += c;
    return s;
  }

  Multiset& set_count(Element e, Count c) {
    if (e >= n_) throw InputError("element " + std::to_string(e) + " outside ground set of size " + std::to_string(n_));
    if (c == 0) {
      counts_.erase(e);
    } else {
      counts_[e] = c;
    }
    return *this;
  }
  Multiset& add(Element e, Count c = 1) { return set_count(e, count(e) + c); }
  Multiset& remove_one(Element e) {
    auto c = count(e);
    return c == 0 ? *this : set_count(e, c - 1);
  }

  std::vector<Element> support() const {
    std::vector<Element> out;
    for (const auto& [e, c] : counts_) out.push_back(e);
    return out;
  }

  std::vector<Count> dense() const {
    std::vector<Count> out(n_, 0);
    for (const auto& [e, c] : counts_) out[e] = c;
    return out;
  }

  /// S ⊆ T: S(x) <= T(x) for all x.
  bool is_subset_of(const Multiset& other) const {
    check(other);
    return std::all_of(counts_.begin(), counts_.end(), [&](const auto& kv) { return kv.second <= other.count(kv.first); });
  }

  /// "{0:2,3:1}"
  std::string to_string() const {
    std::string out = "{";
    bool first = true;
    for (const auto& [e, c] : counts_) {
      if (!first) out += ",";
      out += std::to_string(e) + ":" + std::to_string(c);
      first = false;
    }
    return out + "}";
  }

  friend bool operator==(const Multiset& a, const Multiset& b) { return a.n_ == b.n_ && a.counts_ == b.counts_; }
  /// Deterministic total order: lexicographic over (element, count) pairs.
  friend bool operator<(const Multiset& a, const Multiset& b) { return a.counts_ < b.counts_; }

  void check(const Multiset& other) const {
    if (other.n_ != n_) throw InputError("multisets over different ground sets");
  }

 private:
  std::size_t n_ = 0;
  std::map<Element, Count> counts_;
};

/// (S ∨ T)(x) = max
inline Multiset vee(const Multiset& a, const Multiset& b) {
  a.check(b);
  Multiset out = a;
  for (const auto& [e, c] : b.counts()) out.set_count(e, std::max(c, a.count(e)));
  return out;
}
/// (S ∧ T)(x) = min
inline Multiset wedge(const Multiset& a, const Multiset& b) {
  a.check(b);
  Multiset out(a.universe());
  for (const auto& [e, c] : a.counts()) out.set_count(e, std::min(c, b.count(e)));
  return out;
}
/// (S + T)(x) = sum
inline Multiset plus(const Multiset& a, const Multiset& b) {
  a.check(b);
  Multiset out = a;
  for (const auto& [e, c] : b.counts()) out.add(e, c);
  return out;
}
/// (S \ T)(x) = max(S(x) - T(x), 0)
inline Multiset minus(const Multiset& a, const Multiset& b) {
  a.check(b);
  Multiset out(a.universe());
  for (const auto& [e, c] : a.counts()) {
    auto d = b.count(e);
    out.set_count(e, c > d ? c - d : 0);
  }
  return out;
}
inline std::size_t wedge_size(const Multiset& a, const Multiset& b) {
  std::size_t s = 0;
  for (const auto& [e, c] : a.counts()) s += std::min(c, b.count(e));
  return s;
}

/// Sub-multisets of `pool` of total size k, in lexicographic order of their
/// sorted element lists ({0,0,1} before {0,1,1}). Stops when f returns true.
template <class F>
bool for_each_submultiset_of_size(const Multiset& pool, std::size_t k, F&& f) {
  std::vector<std::pair<Element, Multiset::Count>> items(pool.counts().begin(), pool.counts().end());
  std::vector<Multiset::Count> suffix(items.size() + 1, 0);
  for (std::size_t i = items.size(); i-- > 0;) suffix[i] = suffix[i + 1] + items[i].second;
  Multiset current(pool.universe());
  bool stopped = false;
  auto rec = [&](auto&& self, std::size_t i, std::size_t left) -> void {
    if (stopped) return;
    if (left == 0) {
      stopped = f(static_cast<const Multiset&>(current));
      return;
    }
    if (i == items.size() || suffix[i] < left) return;
    const auto cap = static_cast<Multiset::Count>(std::min<std::size_t>(items[i].second, left));
    for (Multiset::Count c = cap + 1; c-- > 0;) {
      current.set_count(items[i].first, c);
      self(self, i + 1, left - c);
      if (stopped) break;
    }
    current.set_count(items[i].first, 0);
  };
  rec(rec, 0, k);
  return stopped;
}

/// Every sub-multiset of `m`, including ∅ and m.
template <class F>
void for_each_submultiset(const Multiset& m, F&& f) {
  std::vector<std::pair<Element, Multiset::Count>> items(m.counts().begin(), m.counts().end());
  Multiset current(m.universe());
  auto rec = [&](auto&& self, std::size_t i) -> void {
    if (i == items.size()) {
      f(static_cast<const Multiset&>(current));
      return;
    }
    for (Multiset::Count c = 0; c <= items[i].second; ++c) {
      current.set_count(items[i].first, c);
      self(self, i + 1);
    }
    current.set_count(items[i].first, 0);
  };
  rec(rec, 0);
}

inline Integer multiset_space_size(std::size_t n, std::size_t size) { return binomial(size + n - 1, n - 1); }

/// Every multiset of the given size over {0..n-1} (stars and bars), in
/// colexicographic order of the count vector.
template <class F>
void for_each_multiset_of_size(std::size_t n, std::size_t size, F&& f) {
  if (n == 0) throw InputError("empty ground set");
  std::vector<Multiset::Count> c(n, 0);
  c[0] = static_cast<Multiset::Count>(size);
  while (true) {
    f(Multiset::from_counts(c));
    // colex successor: find first i < n-1 with c[i] > 0, move one unit to i+1
    // and gather the remainder of c[0..i] back into c[0].
    std::size_t i = 0;
    while (i + 1 < n && c[i] == 0) ++i;
    if (i + 1 >= n) return;
    Multiset::Count carry = c[i] - 1;
    c[i] = 0;
    ++c[i + 1];
    c[0] += carry;
  }
}

/// Probability vector mu over X with sample count N (and multiplier K for M = KN).
struct MultisetDistribution {
  std::vector<Rational> mu;
  std::size_t N = 1;
  std::size_t K = 1;

  std::size_t n() const { return mu.size(); }

  void validate() const {
    if (mu.empty()) throw InputError("distribution over an empty ground set");
    if (N == 0) throw InputError("N must be at least 1");
    if (K == 0) throw InputError("K must be at least 1");
    Rational total = 0;
    for (const auto& m : mu) {
      if (m < 0) throw InputError("negative probability in mu");
      total += m;
    }
    if (total != 1) throw InputError("mu sums to " + to_string(total) + ", not 1");
  }
};

/// N! prod_x mu(x)^{W(x)} / W(x)!
inline Rational multiset_prob(const Multiset& w, const std::vector<Rational>& mu, std::size_t size) {
  if (w.universe() != mu.size()) throw InputError("multiset and distribution over different ground sets");
  if (w.size() != size) {
    throw InputError("multiset has size " + std::to_string(w.size()) + ", law is over size " + std::to_string(size));
  }
  Rational p = Rational(factorial(size));
  for (const auto& [e, c] : w.counts()) p *= pow(mu[e], c) / Rational(factorial(c));
  p.canonicalize();
  return p;
}

inline Rational multiset_prob(const Multiset& w, const MultisetDistribution& d) { return multiset_prob(w, d.mu, d.N); }

/// Categorical sampler with precomputed cumulative weights.
class MultisetSampler {
 public:
  explicit MultisetSampler(const std::vector<Rational>& mu) {
    long double acc = 0;
    for (const auto& m : mu) {
      acc += to_long_double(m);
      cumulative_.push_back(static_cast<double>(acc));
    }
    cumulative_.back() = 1.0;
    for (std::size_t i = mu.size(); i-- > 0;) {
      if (mu[i] > 0) {
        last_positive_ = i;
        break;
      }
    }
  }

  Element draw(CounterRng& rng) const {
    double u = rng.uniform01();
    auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
    auto idx = static_cast<std::size_t>(it - cumulative_.begin());
    return static_cast<Element>(std::min(idx, last_positive_));
  }

  /// Dense counts of `size` i.i.d. draws.
  std::vector<Multiset::Count> draw_counts(std::size_t size, CounterRng& rng) const {
    std::vector<Multiset::Count> c(cumulative_.size(), 0);
    for (std::size_t i = 0; i < size; ++i) ++c[draw(rng)];
    return c;
  }

 private:
  std::vector<double> cumulative_;
  std::size_t last_positive_ = 0;
};

inline Multiset sample_multiset(const MultisetDistribution& d, CounterRng& rng) {
  MultisetSampler s(d.mu);
  return Multiset::from_counts(s.draw_counts(d.N, rng));
}

/// prod_x (e N mu(x))^{G(x)} / G(x)!  =  e^{|G|} * prod_x (N mu(x))^{G(x)} / G(x)!
inline EPoly poissonized_cost(const Multiset& g, const std::vector<Rational>& mu, std::size_t N) {
  if (g.universe() != mu.size()) throw InputError("multiset and distribution over different ground sets");
  Rational r = 1;
  for (const auto& [e, c] : g.counts()) {
    r *= pow(Rational(static_cast<long>(N)) * mu[e], c) / Rational(factorial(c));
  }
  r.canonicalize();
  return EPoly::term(r, static_cast<int>(g.size()));
}

inline EPoly poissonized_cost(const std::vector<Multiset>& cover, const std::vector<Rational>& mu, std::size_t N) {
  EPoly total;
  for (const auto& g : cover) total += poissonized_cost(g, mu, N);
  return total;
}

/// True when N mu(x) / G(x) <= 1 for every x in G.
inline bool is_pruned(const Multiset& g, const std::vector<Rational>& mu, std::size_t N) {
  for (const auto& [e, c] : g.counts()) {
    if (Rational(static_cast<long>(N)) * mu[e] > Rational(static_cast<long>(c))) return false;
  }
  return true;
}

/// Drops every x with N mu(x) / G(x) > 1. In that regime
/// (e N mu)^k / k! >= (e N mu / k)^k >= 1, so removal never raises the cost,
/// and the result is a sub-multiset, so coverage is preserved.
inline Multiset prune_cover(const Multiset& g, const std::vector<Rational>& mu, std::size_t N) {
  Multiset out = g;
  for (const auto& [e, c] : g.counts()) {
    if (Rational(static_cast<long>(N)) * mu[e] > Rational(static_cast<long>(c))) out.set_count(e, 0);
  }
  return out;
}

struct MultisetMember {
  Multiset set;
  std::map<Element, Rational> weights;  // keys in supp(set)

  Rational weight_of(Element e) const {
    auto it = weights.find(e);
    return it == weights.end() ? Rational(0) : it->second;
  }
};

struct MultisetFamily {
  std::size_t n = 1;
  std::vector<MultisetMember> members;

  std::vector<Multiset> sets() const {
    std::vector<Multiset> out;
    for (const auto& m : members) out.push_back(m.set);
    return out;
  }

  void validate() const {
    if (n == 0) throw InputError("ground set must contain at least one element");
    for (std::size_t i = 0; i < members.size(); ++i) {
      const auto& m = members[i];
      if (m.set.universe() != n) throw InputError("member " + std::to_string(i) + " is not over the ground set");
      for (const auto& [e, w] : m.weights) {
        if (!m.set.contains(e)) throw InputError("member " + std::to_string(i) + " weighs an element outside it");
        if (w < 0) throw InputError("member " + std::to_string(i) + " has a negative weight");
      }
    }
  }
};

inline bool covers(const std::vector<Multiset>& cover, const std::vector<Multiset>& family) {
  return std::all_of(family.begin(), family.end(), [&](const Multiset& s) {
    return std::any_of(cover.begin(), cover.end(), [&](const Multiset& t) { return t.is_subset_of(s); });
  });
}

struct MultisetCoverLimits {
  std::uint64_t max_candidates = 1 << 18;
  CoverSearchLimits search{};
};

struct MinMultisetCover {
  EPoly cost;
  std::vector<Multiset> cover;
};

/// Minimum Poissonized cost over covers; candidates are sub-multisets of members.
inline MinMultisetCover min_multiset_cover_cost_exact(const std::vector<Multiset>& family, const std::vector<Rational>& mu,
                                                      std::size_t N, const MultisetCoverLimits& limits = {}) {
  MinMultisetCover out;
  std::vector<Multiset> members = family;
  std::sort(members.begin(), members.end());
  members.erase(std::unique(members.begin(), members.end()), members.end());
  if (members.empty()) return out;

  std::uint64_t budget = 0;
  for (const auto& m : members) {
    std::uint64_t sub = 1;
    for (const auto& [e, c] : m.counts()) {
      sub *= (c + 1);
      if (sub > limits.max_candidates) break;
    }
    budget += sub;
    if (budget > limits.max_candidates) {
      throw GuardError("instance-too-large", "more than " + std::to_string(limits.max_candidates) + " candidate sub-multisets");
    }
  }
  std::set<Multiset> unique;
  for (const auto& m : members) for_each_submultiset(m, [&](const Multiset& t) { unique.insert(t); });
  std::vector<Multiset> candidates(unique.begin(), unique.end());

  std::vector<std::uint64_t> coverage(candidates.size(), 0);
  std::vector<EPoly> costs;
  for (std::size_t c = 0; c < candidates.size(); ++c) {
    for (std::size_t i = 0; i < members.size(); ++i) {
      if (candidates[c].is_subset_of(members[i])) coverage[c] |= std::uint64_t{1} << i;
    }
    costs.push_back(poissonized_cost(candidates[c], mu, N));
  }
  ExactCoverSolver<EPoly> solver(members.size(), coverage, costs, limits.search);
  auto sol = solver.solve();
  out.cost = sol.cost;
  for (auto c : sol.chosen) out.cover.push_back(candidates[c]);
  return out;
}

}  // namespace pcover
