#pragma once

// Weighted set families, covers, and p-smallness.
//
// A cover G of F is a family with every S in F containing some T in G; F is
// p-small when some cover has sum_{T in G} p^{|T|} <= 1/2.

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <vector>

#include "pcover/error.hpp"
#include "pcover/rational.hpp"
#include "pcover/set_cover.hpp"
#include "pcover/subset.hpp"

namespace pcover {

struct Member {
  SubsetBits set;
  std::map<Element, Rational> weights;  // keys inside `set`; missing keys weigh 0

  Rational weight_of(Element e) const {
    auto it = weights.find(e);
    return it == weights.end() ? Rational(0) : it->second;
  }
  Rational total_weight() const {
    Rational s = 0;
    for (const auto& [e, w] : weights) s += w;
    return s;
  }
};

class WeightedFamily {
 public:
  WeightedFamily() = default;
  WeightedFamily(GroundSet ground, std::vector<Member> members, Rational p)
      : ground_(ground), members_(std::move(members)), p_(std::move(p)) {
    validate();
  }

  const GroundSet& ground() const { return ground_; }
  std::size_t n() const { return ground_.n; }
  const std::vector<Member>& members() const { return members_; }
  const Rational& p() const { return p_; }
  std::size_t size() const { return members_.size(); }
  bool empty() const { return members_.empty(); }

  std::vector<SubsetBits> sets() const {
    std::vector<SubsetBits> out;
    out.reserve(members_.size());
    for (const auto& m : members_) out.push_back(m.set);
    return out;
  }

  /// Unit weight on every element of every set.
  static WeightedFamily unweighted(GroundSet ground, const std::vector<SubsetBits>& sets, Rational p) {
    std::vector<Member> members;
    for (const auto& s : sets) {
      Member m{s, {}};
      s.for_each([&](Element e) { m.weights[e] = 1; });
      members.push_back(std::move(m));
    }
    return WeightedFamily(ground, std::move(members), std::move(p));
  }

 private:
  void validate() const {
    require_probability(p_);
    for (std::size_t i = 0; i < members_.size(); ++i) {
      const auto& m = members_[i];
      if (m.set.universe() != ground_.n) {
        throw InputError("member " + std::to_string(i) + " is not over the family's ground set");
      }
      for (const auto& [e, w] : m.weights) {
        if (!m.set.test(e)) {
          throw InputError("member " + std::to_string(i) + " has a weight on element " + std::to_string(e) +
                           " outside the set");
        }
        if (w < 0) throw InputError("member " + std::to_string(i) + " has a negative weight");
      }
    }
  }

  GroundSet ground_{};
  std::vector<Member> members_;
  Rational p_{1, 2};
};

enum class CostMode { PlainP, Poissonized };

struct Cover {
  std::vector<SubsetBits> elements;
  CostMode mode = CostMode::PlainP;
};

inline bool covers(const std::vector<SubsetBits>& cover, const std::vector<SubsetBits>& family) {
  return std::all_of(family.begin(), family.end(), [&](const SubsetBits& s) {
    return std::any_of(cover.begin(), cover.end(), [&](const SubsetBits& t) { return t.is_subset_of(s); });
  });
}

inline bool covers(const Cover& g, const WeightedFamily& f) {
  for (const auto& t : g.elements) {
    if (t.universe() != f.n()) throw InputError("cover element is not over the family's ground set");
  }
  return covers(g.elements, f.sets());
}

/// sum_{T in G} p^{|T|}, exact.
inline Rational cover_cost(const std::vector<SubsetBits>& g, const Rational& p) {
  require_probability(p);
  Rational total = 0;
  for (const auto& t : g) total += pow(p, static_cast<long>(t.count()));
  return total;
}
inline Rational cover_cost(const Cover& g, const Rational& p) { return cover_cost(g.elements, p); }

/// log(sum_{T in G} p^{|T|}) by log-sum-exp; -inf for the empty cover.
inline double cover_log_cost(const std::vector<SubsetBits>& g, double p) {
  if (!(p > 0 && p < 1)) throw InputError("p must lie strictly between 0 and 1");
  if (g.empty()) return -std::numeric_limits<double>::infinity();
  const double lp = std::log(p);
  double top = -std::numeric_limits<double>::infinity();
  for (const auto& t : g) top = std::max(top, static_cast<double>(t.count()) * lp);
  double acc = 0;
  for (const auto& t : g) acc += std::exp(static_cast<double>(t.count()) * lp - top);
  return top + std::log(acc);
}

struct ExactCoverLimits {
  std::uint64_t max_candidates = std::uint64_t{1} << 20;  // bound on sum_S 2^{|S|}
  CoverSearchLimits search{};
};

template <class Cost>
struct MinCover {
  Cost cost{};
  std::vector<SubsetBits> cover;  // sorted in bitmask order
};

namespace detail {

inline std::vector<SubsetBits> candidate_subsets(const std::vector<SubsetBits>& sets, const ExactCoverLimits& limits) {
  // Restricting candidates to subsets of members loses nothing. A cover
  // element T that covers some S satisfies T = T ∩ S ⊆ S, and an element that
  // covers no member can be dropped, which only lowers the cost. Hence some
  // optimal cover consists of subsets of members only.
  std::uint64_t budget = 0;
  for (const auto& s : sets) {
    if (s.count() >= 63) throw GuardError("instance-too-large", "member with " + std::to_string(s.count()) + " elements");
    budget += std::uint64_t{1} << s.count();
    if (budget > limits.max_candidates) {
      throw GuardError("instance-too-large", "sum of 2^|S| exceeds " + std::to_string(limits.max_candidates));
    }
  }
  std::set<SubsetBits> unique;
  for (const auto& s : sets) for_each_subset(s, [&](const SubsetBits& t) { unique.insert(t); });
  return {unique.begin(), unique.end()};
}

}  // namespace detail

/// Minimum of sum_{T in G} p^{|T|} over covers G of the sets. `to_cost` maps
/// |T| to the cost type (exact Rational or floating point).
template <class Cost, class CostOf>
MinCover<Cost> min_cover_cost(const std::vector<SubsetBits>& sets, CostOf&& cost_of, const ExactCoverLimits& limits = {}) {
  MinCover<Cost> out;
  // Duplicate members need covering only once.
  std::vector<SubsetBits> members = sets;
  std::sort(members.begin(), members.end());
  members.erase(std::unique(members.begin(), members.end()), members.end());
  if (members.empty()) return out;

  auto candidates = detail::candidate_subsets(members, limits);
  std::vector<std::uint64_t> coverage(candidates.size(), 0);
  std::vector<Cost> costs;
  costs.reserve(candidates.size());
  for (std::size_t c = 0; c < candidates.size(); ++c) {
    for (std::size_t i = 0; i < members.size(); ++i) {
      if (candidates[c].is_subset_of(members[i])) coverage[c] |= std::uint64_t{1} << i;
    }
    costs.push_back(cost_of(candidates[c].count()));
  }
  ExactCoverSolver<Cost> solver(members.size(), coverage, costs, limits.search);
  auto sol = solver.solve();
  out.cost = sol.cost;
  for (auto c : sol.chosen) out.cover.push_back(candidates[c]);
  return out;
}

/// Exact minimum cover cost with an optimal, deterministically tie-broken cover.
inline MinCover<Rational> min_cover_cost_exact(const WeightedFamily& f, const Rational& p,
                                               const ExactCoverLimits& limits = {}) {
  require_probability(p);
  std::vector<Rational> powers(f.n() + 1);
  powers[0] = 1;
  for (std::size_t k = 1; k <= f.n(); ++k) powers[k] = powers[k - 1] * p;
  return min_cover_cost<Rational>(f.sets(), [&](std::size_t k) { return powers[k]; }, limits);
}

/// Same search in long double; for larger quick looks where exactness is not needed.
inline MinCover<long double> min_cover_cost_float(const WeightedFamily& f, long double p,
                                                  const ExactCoverLimits& limits = {}) {
  return min_cover_cost<long double>(
      f.sets(), [&](std::size_t k) { return std::pow(p, static_cast<long double>(k)); }, limits);
}

/// Greedy cover (cheapest cost per newly covered member). Upper bound only.
inline MinCover<Rational> greedy_cover(const WeightedFamily& f, const Rational& p, const ExactCoverLimits& limits = {}) {
  MinCover<Rational> out;
  auto members = f.sets();
  if (members.empty()) return out;
  auto candidates = detail::candidate_subsets(members, limits);
  std::vector<bool> done(members.size(), false);
  std::size_t remaining = members.size();
  while (remaining > 0) {
    std::optional<std::size_t> pick;
    Rational best_ratio;
    for (std::size_t c = 0; c < candidates.size(); ++c) {
      std::size_t gain = 0;
      for (std::size_t i = 0; i < members.size(); ++i) {
        if (!done[i] && candidates[c].is_subset_of(members[i])) ++gain;
      }
      if (gain == 0) continue;
      Rational ratio = pow(p, static_cast<long>(candidates[c].count())) / Rational(static_cast<long>(gain));
      if (!pick || ratio < best_ratio) {
        pick = c;
        best_ratio = ratio;
      }
    }
    for (std::size_t i = 0; i < members.size(); ++i) {
      if (!done[i] && candidates[*pick].is_subset_of(members[i])) {
        done[i] = true;
        --remaining;
      }
    }
    out.cover.push_back(candidates[*pick]);
  }
  std::sort(out.cover.begin(), out.cover.end());
  out.cost = cover_cost(out.cover, p);
  return out;
}

enum class Verdict { PSmall, NotPSmall };

inline const char* to_string(Verdict v) { return v == Verdict::PSmall ? "p-small" : "not-p-small"; }

struct SmallnessCertificate {
  Verdict verdict = Verdict::NotPSmall;
  std::optional<Cover> witness_cover;
  Rational min_cost;  // exact minimum when exhaustive, else the given cover's cost
  bool exhaustive = false;
};

inline const Rational& smallness_threshold() {
  static const Rational half(1, 2);
  return half;
}

/// Exhaustive certificate: verdict from the exact minimum cost.
inline SmallnessCertificate is_p_small(const WeightedFamily& f, const Rational& p, const ExactCoverLimits& limits = {}) {
  auto best = min_cover_cost_exact(f, p, limits);
  SmallnessCertificate cert;
  cert.exhaustive = true;
  cert.min_cost = best.cost;
  cert.verdict = best.cost <= smallness_threshold() ? Verdict::PSmall : Verdict::NotPSmall;
  cert.witness_cover = Cover{best.cover, CostMode::PlainP};
  if (cert.verdict == Verdict::PSmall && !(covers(*cert.witness_cover, f) && cover_cost(*cert.witness_cover, p) <= smallness_threshold())) {
    throw PropertyViolation("exact oracle produced an invalid p-smallness witness");
  }
  return cert;
}

/// Certificate from a user-supplied cover: p-small iff the cover is valid and cheap.
/// A failing cover proves nothing about the family, so the result is non-exhaustive.
inline SmallnessCertificate is_p_small(const WeightedFamily& f, const Rational& p, const Cover& given) {
  require_probability(p);
  SmallnessCertificate cert;
  cert.exhaustive = false;
  cert.min_cost = cover_cost(given, p);
  bool ok = covers(given, f) && cert.min_cost <= smallness_threshold();
  cert.verdict = ok ? Verdict::PSmall : Verdict::NotPSmall;
  cert.witness_cover = given;
  return cert;
}

/// If the shrunken family F' (S'_i ⊆ S_i) is p-small, so is F. Returns whether
/// the implication held under the exact oracle.
inline bool shrink_monotone_check(const WeightedFamily& f, const WeightedFamily& shrunk, const Rational& p,
                                  const ExactCoverLimits& limits = {}) {
  if (f.size() != shrunk.size() || f.n() != shrunk.n()) throw InputError("families are not in bijection");
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (!shrunk.members()[i].set.is_subset_of(f.members()[i].set)) {
      throw InputError("member " + std::to_string(i) + " of the shrunken family is not inside its partner");
    }
  }
  auto small_shrunk = is_p_small(shrunk, p, limits).verdict == Verdict::PSmall;
  if (!small_shrunk) return true;
  return is_p_small(f, p, limits).verdict == Verdict::PSmall;
}

}  // namespace pcover
