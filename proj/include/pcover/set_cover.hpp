#pragma once

// Exact minimum-cost set cover over a small induced instance.
//
// Members to cover are indexed 0..m-1 (m <= 64). Each candidate carries a cost
// and the mask of members it covers. The search always branches on the lowest
// uncovered member and tries every candidate covering it; subproblems keyed by
// the uncovered mask are memoized. Among optimal covers the one whose sorted
// candidate-index sequence is lexicographically smallest is returned; since
// equal-cost covers are never proper subsets of each other (costs are
// positive), taking the lexicographic minimum at every node yields the global
// one.

#include <algorithm>
#include <cstdint>
#include <span>
#include <unordered_map>
#include <vector>

#include "pcover/epoly.hpp"
#include "pcover/error.hpp"

namespace pcover {

struct CoverSearchLimits {
  std::size_t max_states = 4'000'000;
};

template <class Cost>
struct ExactCoverSolution {
  Cost cost{};
  std::vector<std::size_t> chosen;  // sorted candidate indices
};

template <class Cost>
class ExactCoverSolver {
 public:
  ExactCoverSolver(std::size_t members, std::span<const std::uint64_t> coverage, std::span<const Cost> costs,
                   CoverSearchLimits limits = {})
      : members_(members), coverage_(coverage.begin(), coverage.end()), costs_(costs.begin(), costs.end()),
        limits_(limits) {
    if (members > 64) throw GuardError("member-count", std::to_string(members) + " members > 64");
    coverers_.resize(members);
    for (std::size_t c = 0; c < coverage_.size(); ++c) {
      for (std::size_t i = 0; i < members; ++i) {
        if (coverage_[c] >> i & 1U) coverers_[i].push_back(c);
      }
    }
  }

  ExactCoverSolution<Cost> solve() {
    const std::uint64_t all = members_ == 64 ? ~std::uint64_t{0} : ((std::uint64_t{1} << members_) - 1);
    return best(all);
  }

 private:
  const ExactCoverSolution<Cost>& best(std::uint64_t mask) {
    if (auto it = memo_.find(mask); it != memo_.end()) return it->second;
    if (memo_.size() >= limits_.max_states) {
      throw GuardError("cover-search-states", "more than " + std::to_string(limits_.max_states) + " subproblems");
    }
    ExactCoverSolution<Cost> result;
    if (mask != 0) {
      const auto lowest = static_cast<std::size_t>(__builtin_ctzll(mask));
      if (coverers_[lowest].empty()) {
        throw InputError("member " + std::to_string(lowest) + " has no covering candidate");
      }
      bool have = false;
      for (std::size_t c : coverers_[lowest]) {
        // Copy: the memo may rehash during the recursive call.
        ExactCoverSolution<Cost> sub = best(mask & ~coverage_[c]);
        auto pos = std::lower_bound(sub.chosen.begin(), sub.chosen.end(), c);
        if (pos == sub.chosen.end() || *pos != c) {
          sub.cost = sub.cost + costs_[c];
          sub.chosen.insert(pos, c);
        }
        if (!have) {
          result = std::move(sub);
          have = true;
          continue;
        }
        int order = compare(sub.cost, result.cost);
        if (order < 0 || (order == 0 && std::lexicographical_compare(sub.chosen.begin(), sub.chosen.end(),
                                                                     result.chosen.begin(), result.chosen.end()))) {
          result = std::move(sub);
        }
      }
    }
    return memo_.emplace(mask, std::move(result)).first->second;
  }

  std::size_t members_;
  std::vector<std::uint64_t> coverage_;
  std::vector<Cost> costs_;
  CoverSearchLimits limits_;
  std::vector<std::vector<std::size_t>> coverers_;
  std::unordered_map<std::uint64_t, ExactCoverSolution<Cost>> memo_;
};

}  // namespace pcover
