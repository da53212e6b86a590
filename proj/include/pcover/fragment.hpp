#pragma once

// Dyadic weight processing, profiles, and minimum fragments.
//
// Sets and multisets share one engine over dense count vectors: a set is a
// count vector with entries in {0, 1}. For a fragment U ⊆ S \ W the union
// W ∪ U coincides with the sum W + U, and S'_j ∩ Z with the pointwise minimum,
// so one code path serves both cases.
//
// Weights live on the grid base^{-j}. All feasibility checks run on integers
// scaled by base^{tau+1}, which makes every comparison exact.

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "pcover/error.hpp"
#include "pcover/family.hpp"
#include "pcover/multiset.hpp"
#include "pcover/rational.hpp"
#include "pcover/subset.hpp"

namespace pcover {

using Counts = std::vector<std::uint32_t>;
using Profile = std::vector<std::uint64_t>;  // (s_0, ..., s_b)

struct FragmentConfig {
  std::uint32_t base = 100;
  Rational capture{1, 100};       // share of the weight a fragment must capture
  Rational mass_ratio{9, 10};     // lower bound t >= mass_ratio * n_b
  Rational good_threshold{1, 10000000000UL};
  std::size_t search_limit = 22;  // largest candidate pool searched exhaustively
};

/// floor(log_base n) + 2
inline int default_tau(std::size_t n, std::uint32_t base) {
  int k = 0;
  std::uint64_t power = base;
  while (power <= n) {
    ++k;
    power *= base;
  }
  return k + 2;
}

struct DyadicMember {
  Counts counts;
  std::vector<int> bucket;  // weight base^{-bucket[i]} where counts[i] > 0, else -1

  std::size_t size() const {
    std::size_t s = 0;
    for (auto c : counts) s += c;
    return s;
  }
};

struct DyadicFamily {
  std::size_t n = 1;
  int tau = 0;
  std::uint32_t base = 100;
  bool multiset = false;
  std::vector<DyadicMember> members;

  Rational unit(int j) const { return pow(Rational(base), -j); }

  /// sum_i S(i) lambda^S(i)
  Rational weight(std::size_t m) const {
    Rational w = 0;
    const auto& mem = members[m];
    for (std::size_t i = 0; i < n; ++i) {
      if (mem.counts[i] > 0) w += Rational(mem.counts[i]) * unit(mem.bucket[i]);
    }
    return w;
  }

  /// (s_0, ..., s_tau)
  Profile profile(std::size_t m) const {
    Profile s(static_cast<std::size_t>(tau) + 1, 0);
    const auto& mem = members[m];
    for (std::size_t i = 0; i < n; ++i) {
      if (mem.counts[i] > 0) s[static_cast<std::size_t>(mem.bucket[i])] += mem.counts[i];
    }
    return s;
  }

  WeightedFamily to_weighted(const Rational& p) const {
    std::vector<Member> out;
    for (const auto& mem : members) {
      Member m{SubsetBits(n), {}};
      for (std::size_t i = 0; i < n; ++i) {
        if (mem.counts[i] > 0) {
          m.set.set(static_cast<Element>(i));
          m.weights[static_cast<Element>(i)] = unit(mem.bucket[i]);
        }
      }
      out.push_back(std::move(m));
    }
    return WeightedFamily(GroundSet(n), std::move(out), p);
  }

  MultisetFamily to_multiset() const {
    MultisetFamily out;
    out.n = n;
    for (const auto& mem : members) {
      MultisetMember m{Multiset::from_counts(mem.counts), {}};
      for (std::size_t i = 0; i < n; ++i) {
        if (mem.counts[i] > 0) m.weights[static_cast<Element>(i)] = unit(mem.bucket[i]);
      }
      out.members.push_back(std::move(m));
    }
    return out;
  }
};

/// Processed family plus per-member total weight before and after.
struct ProcessedFamily {
  DyadicFamily family;
  std::vector<Rational> weight_before;
  std::vector<Rational> weight_after;

  Rational loss(std::size_t m) const { return weight_before[m] - weight_after[m]; }
};

namespace detail {

/// Smallest j >= 0 with lambda >= base^{-j}; lambda in (0, 1].
inline int dyadic_bucket(const Rational& lambda, std::uint32_t base, int cutoff) {
  Rational unit = 1;
  int j = 0;
  while (lambda < unit) {
    ++j;
    if (cutoff >= 0 && j > cutoff) return j;
    unit /= base;
  }
  return j;
}

inline DyadicMember dyadic_member(std::size_t n, const std::map<Element, std::uint32_t>& counts,
                                  const std::map<Element, Rational>& weights, std::uint32_t base, int cutoff) {
  DyadicMember out{Counts(n, 0), std::vector<int>(n, -1)};
  for (const auto& [e, c] : counts) {
    auto it = weights.find(e);
    if (it == weights.end() || it->second <= 0) continue;
    Rational lambda = it->second > 1 ? Rational(1) : it->second;
    int j = dyadic_bucket(lambda, base, cutoff);
    if (cutoff >= 0 && j > cutoff) continue;
    out.counts[e] = c;
    out.bucket[e] = j;
  }
  return out;
}

}  // namespace detail

/// Caps weights at 1, rounds lambda in [base^{-j}, base^{-j+1}) down to
/// base^{-j}, and drops zero-weight elements and those with j > tau.
inline ProcessedFamily preprocess(const WeightedFamily& f, const FragmentConfig& cfg = {}) {
  if (cfg.base < 2) throw InputError("base must be at least 2");
  ProcessedFamily out;
  out.family.n = f.n();
  out.family.base = cfg.base;
  out.family.tau = default_tau(f.n(), cfg.base);
  for (const auto& m : f.members()) {
    for (const auto& [e, w] : m.weights) {
      if (w < 0) throw InputError("negative weight");
    }
    std::map<Element, std::uint32_t> counts;
    m.set.for_each([&](Element e) { counts[e] = 1; });
    out.family.members.push_back(detail::dyadic_member(f.n(), counts, m.weights, cfg.base, out.family.tau));
    out.weight_before.push_back(m.total_weight());
  }
  for (std::size_t i = 0; i < out.family.members.size(); ++i) out.weight_after.push_back(out.family.weight(i));
  return out;
}

/// Multiset variant: no scale cutoff; tau is the largest bucket in use.
inline ProcessedFamily preprocess(const MultisetFamily& f, const FragmentConfig& cfg = {}) {
  if (cfg.base < 2) throw InputError("base must be at least 2");
  f.validate();
  ProcessedFamily out;
  out.family.n = f.n;
  out.family.base = cfg.base;
  out.family.multiset = true;
  out.family.tau = 0;
  for (const auto& m : f.members) {
    out.family.members.push_back(detail::dyadic_member(f.n, m.set.counts(), m.weights, cfg.base, -1));
    Rational before = 0;
    for (const auto& [e, c] : m.set.counts()) before += Rational(c) * m.weight_of(e);
    out.weight_before.push_back(before);
    for (int b : out.family.members.back().bucket) out.family.tau = std::max(out.family.tau, b);
  }
  for (std::size_t i = 0; i < out.family.members.size(); ++i) out.weight_after.push_back(out.family.weight(i));
  return out;
}

/// Bucket floor: s_j * base^4 * (j+1)^2 >= base^j.
inline bool meets_bucket_floor(int j, std::uint64_t s, std::uint32_t base) {
  return Integer(static_cast<unsigned long>(s)) * pow_integer(base, 4) * Integer((j + 1) * (j + 1)) >=
         pow_integer(base, static_cast<unsigned long>(j));
}

inline bool is_power_of(std::uint64_t s, std::uint32_t base) {
  if (s == 0) return false;
  while (s % base == 0) s /= base;
  return s == 1;
}

inline std::uint64_t floor_power_of(std::uint64_t s, std::uint32_t base) {
  std::uint64_t p = 1;
  while (p <= s / base) p *= base;
  return p;
}

/// A nonzero s_j is legal when max{1, base^j/(base^4 (j+1)^2)} <= s_j < 2 base^j
/// and s_j is a power of base.
inline bool is_legal_value(int j, std::uint64_t s, std::uint32_t base = 100) {
  if (s == 0) return true;
  return meets_bucket_floor(j, s, base) && Integer(static_cast<unsigned long>(s)) < 2 * pow_integer(base, j) &&
         is_power_of(s, base);
}

inline bool is_legal(const Profile& s, std::uint32_t base = 100) {
  for (std::size_t j = 0; j < s.size(); ++j) {
    if (!is_legal_value(static_cast<int>(j), s[j], base)) return false;
  }
  return true;
}

/// Nonzero legal values of s_j, ascending.
inline std::vector<std::uint64_t> legal_values(int j, std::uint32_t base = 100) {
  std::vector<std::uint64_t> out;
  const Integer ceiling = 2 * pow_integer(base, static_cast<unsigned long>(j));
  for (Integer s = 1; s < ceiling; s *= base) {
    if (meets_bucket_floor(j, to_u64(s), base)) out.push_back(to_u64(s));
  }
  return out;
}

/// All legal partial profiles (s_0..s_b), zero allowed in every coordinate,
/// in lexicographic order. Values above max_value (if nonzero) are skipped.
inline std::vector<Profile> enumerate_legal_partial_profiles(int b, std::uint32_t base = 100, std::uint64_t max_value = 0) {
  std::vector<Profile> out{Profile{}};
  for (int j = 0; j <= b; ++j) {
    std::vector<std::uint64_t> options{0};
    for (auto v : legal_values(j, base)) {
      if (max_value == 0 || v <= max_value) options.push_back(v);
    }
    std::vector<Profile> next;
    for (const auto& prefix : out) {
      for (auto v : options) {
        Profile p = prefix;
        p.push_back(v);
        next.push_back(std::move(p));
      }
    }
    out = std::move(next);
  }
  return out;
}

/// log_base(2 base^4 (j+1)^2): the per-coordinate count used in the cost bound.
inline long double profile_count_bound(int j, std::uint32_t base = 100) {
  long double v = 2.0L * std::pow(static_cast<long double>(base), 4.0L) * (j + 1) * (j + 1);
  return std::log(v) / std::log(static_cast<long double>(base));
}

/// Removes elements (one copy at a time, ascending id) until the weight is
/// below 2, deletes buckets under the floor, and rounds every remaining s_j
/// down to a power of base.
inline ProcessedFamily regularize(const DyadicFamily& f) {
  ProcessedFamily out;
  out.family = f;
  const std::uint32_t base = f.base;
  for (std::size_t m = 0; m < f.members.size(); ++m) {
    out.weight_before.push_back(f.weight(m));
    auto& mem = out.family.members[m];
    auto drop_one = [&](std::size_t i) {
      if (--mem.counts[i] == 0) mem.bucket[i] = -1;
    };

    Rational w = out.weight_before.back();
    for (std::size_t i = 0; i < f.n && w >= 2; ++i) {
      while (mem.counts[i] > 0 && w >= 2) {
        w -= f.unit(mem.bucket[i]);
        drop_one(i);
      }
    }

    Profile s = out.family.profile(m);
    for (std::size_t j = 0; j < s.size(); ++j) {
      const int jj = static_cast<int>(j);
      std::uint64_t target = s[j];
      if (s[j] > 0 && !meets_bucket_floor(jj, s[j], base)) target = 0;
      if (target > 0) target = floor_power_of(target, base);
      std::uint64_t excess = s[j] - target;
      for (std::size_t i = 0; i < f.n && excess > 0; ++i) {
        while (excess > 0 && mem.counts[i] > 0 && mem.bucket[i] == jj) {
          drop_one(i);
          --excess;
        }
      }
    }
    out.weight_after.push_back(out.family.weight(m));
  }
  return out;
}

struct FragmentResult {
  Counts T;
  int b = -1;
  std::size_t witness = 0;  // member index of the first feasible S'
  std::size_t t = 0;

  SubsetBits as_subset() const {
    SubsetBits s(T.size());
    for (std::size_t i = 0; i < T.size(); ++i) {
      if (T[i] > 0) s.set(static_cast<Element>(i));
    }
    return s;
  }
  Multiset as_multiset() const { return Multiset::from_counts(T); }
};

/// Outcome of checking every feasible S' for (W + T, b_T, s_{b_T}, t).
struct FragmentPropertyCheck {
  std::size_t feasible = 0;      // number of feasible S' examined
  bool exact_cover = true;       // (V_{j<=b} S'_j) \ W == T
  bool mass = true;              // t >= mass_ratio * n_b
  bool multiplicity = true;      // W(x) < S'(x) wherever T(x) > 0
  bool bad_index = true;         // W bad  =>  b_T >= 0
  bool ok() const { return feasible > 0 && exact_cover && mass && multiplicity && bad_index; }
};

inline Counts to_counts(const SubsetBits& s) {
  Counts c(s.universe(), 0);
  s.for_each([&](Element e) { c[e] = 1; });
  return c;
}
inline Counts to_counts(const Multiset& m) { return m.dense(); }

class FragmentEngine {
 public:
  using Wide = __int128;

  FragmentEngine(DyadicFamily family, FragmentConfig cfg = {}) : f_(std::move(family)), cfg_(std::move(cfg)) {
    if (f_.base != cfg_.base) throw InputError("family was processed with a different base");
    if (cfg_.capture <= 0 || cfg_.mass_ratio <= 0) throw InputError("capture and mass ratio must be positive");
    const int tau = f_.tau;
    const std::size_t levels = static_cast<std::size_t>(tau) + 2;  // b = -1..tau

    // Magnitude guard for the scaled integer arithmetic.
    std::uint64_t max_size = 0;
    for (const auto& m : f_.members) {
      max_size = std::max<std::uint64_t>(max_size, m.size());
      if (m.counts.size() != f_.n) throw InputError("member not over the ground set");
      for (std::size_t i = 0; i < f_.n; ++i) {
        if (m.counts[i] > 0 && (m.bucket[i] < 0 || m.bucket[i] > tau)) throw InputError("bucket outside 0..tau");
      }
    }
    Integer cap_num = cfg_.capture.get_num(), cap_den = cfg_.capture.get_den();
    Integer bound = (cap_num + cap_den) * pow_integer(f_.base, static_cast<unsigned long>(tau) + 2) *
                    Integer(static_cast<unsigned long>(4 * max_size + 4));
    if (mpz_sizeinbase(bound.get_mpz_t(), 2) > 120 || mpz_sizeinbase(cap_num.get_mpz_t(), 2) > 62 ||
        mpz_sizeinbase(cap_den.get_mpz_t(), 2) > 62) {
      throw GuardError("scale-overflow", "tau " + std::to_string(tau) + " is too deep for exact scaled arithmetic");
    }
    cap_num_ = static_cast<Wide>(mpz_get_si(cap_num.get_mpz_t()));
    cap_den_ = static_cast<Wide>(mpz_get_si(cap_den.get_mpz_t()));

    unit_.resize(levels + 1);
    for (int j = -1; j <= tau; ++j) unit_[static_cast<std::size_t>(j + 1)] = wide_power(tau + 1 - j);

    const std::size_t members = f_.members.size();
    profiles_.resize(members);
    prefix_size_.assign(members, std::vector<std::uint64_t>(levels, 0));
    suffix_mass_.assign(members, std::vector<Wide>(levels, 0));
    for (std::size_t m = 0; m < members; ++m) {
      profiles_[m] = f_.profile(m);
      const auto& mem = f_.members[m];
      for (int b = -1; b <= tau; ++b) {
        std::uint64_t nb = 0;
        Wide suffix = 0;
        for (std::size_t i = 0; i < f_.n; ++i) {
          if (mem.counts[i] == 0) continue;
          if (mem.bucket[i] <= b) {
            nb += mem.counts[i];
          } else {
            suffix += static_cast<Wide>(mem.counts[i]) * weight_unit(mem.bucket[i]);
          }
        }
        prefix_size_[m][static_cast<std::size_t>(b + 1)] = nb;
        suffix_mass_[m][static_cast<std::size_t>(b + 1)] = suffix;
      }
    }
    // Peer groups: members sharing the partial profile (s_0..s_b).
    peers_.assign(members, std::vector<std::vector<std::size_t>>(levels));
    for (std::size_t m = 0; m < members; ++m) {
      for (int b = -1; b <= tau; ++b) {
        auto& group = peers_[m][static_cast<std::size_t>(b + 1)];
        for (std::size_t o = 0; o < members; ++o) {
          if (same_partial_profile(m, o, b)) group.push_back(o);
        }
      }
    }
  }

  const DyadicFamily& family() const { return f_; }
  const FragmentConfig& config() const { return cfg_; }
  std::size_t size() const { return f_.members.size(); }
  int tau() const { return f_.tau; }

  Profile partial_profile(std::size_t m, int b) const {
    return Profile(profiles_[m].begin(), profiles_[m].begin() + (b + 1));
  }
  std::uint64_t n_b(std::size_t m, int b) const { return prefix_size_[m][static_cast<std::size_t>(b + 1)]; }

  /// Members whose partial profile matches member m's up to index b.
  const std::vector<std::size_t>& peers(std::size_t m, int b) const {
    check_index(b);
    return peers_[m][static_cast<std::size_t>(b + 1)];
  }

  /// (Z, b, s_b, t)-feasibility of member s_prime; s_b must be its partial profile.
  bool is_feasible(std::size_t s_prime, const Counts& Z, int b, const Profile& s_b, std::uint64_t t) const {
    check_index(b);
    if (partial_profile(s_prime, b) != s_b) throw InputError("member does not have the given partial profile");
    return feasible(s_prime, Z, b, t);
  }

  /// First member (in member order) witnessing that U is an (S, W)-fragment with index b.
  std::optional<std::size_t> fragment_witness(std::size_t s, const Counts& W, const Counts& U, int b) const {
    check_index(b);
    check_counts(W);
    check_counts(U);
    const auto& mem = f_.members[s];
    std::uint64_t t = 0;
    for (std::size_t i = 0; i < f_.n; ++i) {
      const std::uint32_t room = mem.counts[i] > W[i] ? mem.counts[i] - W[i] : 0;
      if (U[i] > room) throw InputError("U is not inside S \\ W");
      t += U[i];
    }
    Counts Z = W;
    for (std::size_t i = 0; i < f_.n; ++i) Z[i] += U[i];
    for (std::size_t o : peers(s, b)) {
      if (feasible(o, Z, b, t)) return o;
    }
    return std::nullopt;
  }

  /// Minimum (S, W)-fragment: smallest index b, then smallest |T|, then the
  /// lexicographically smallest sorted element list.
  FragmentResult minimum_fragment(std::size_t s, const Counts& W) const {
    check_counts(W);
    const auto& mem = f_.members[s];
    Counts rest(f_.n, 0);  // S \ W
    for (std::size_t i = 0; i < f_.n; ++i) rest[i] = mem.counts[i] > W[i] ? mem.counts[i] - W[i] : 0;

    for (int b = -1; b <= f_.tau; ++b) {
      // Every minimum-size fragment at the least index equals
      // (V_{j<=b} S'_j) \ W for its witness S', so candidates can be drawn
      // from the union of those sets over the peers, intersected with S \ W.
      Counts pool(f_.n, 0);
      for (std::size_t o : peers(s, b)) {
        const auto& other = f_.members[o];
        for (std::size_t i = 0; i < f_.n; ++i) {
          if (other.counts[i] > 0 && other.bucket[i] <= b) {
            const std::uint32_t above = other.counts[i] > W[i] ? other.counts[i] - W[i] : 0;
            pool[i] = std::max(pool[i], std::min(above, rest[i]));
          }
        }
      }
      std::size_t pool_size = 0, pool_support = 0;
      for (auto c : pool) {
        pool_size += c;
        pool_support += c > 0;
      }
      if (pool_support > cfg_.search_limit) {
        throw GuardError("search-too-large", "candidate pool of " + std::to_string(pool_support) +
                                                 " elements exceeds the limit " + std::to_string(cfg_.search_limit));
      }
      for (std::size_t k = 0; k <= pool_size; ++k) {
        std::optional<FragmentResult> hit;
        for_each_sub_counts(pool, k, [&](const Counts& U) {
          Counts Z = W;
          for (std::size_t i = 0; i < f_.n; ++i) Z[i] += U[i];
          for (std::size_t o : peers(s, b)) {
            if (feasible(o, Z, b, k)) {
              hit = FragmentResult{U, b, o, k};
              return true;
            }
          }
          return false;
        });
        if (hit) return *hit;
      }
    }
    throw PropertyViolation("no fragment found up to index tau; the family is not dyadic");
  }

  /// max_S sum_i W(i) lambda^S(i), scaled by base^{tau+1}.
  Wide captured_mass(const Counts& W) const {
    check_counts(W);
    Wide best = 0;
    for (const auto& mem : f_.members) {
      Wide m = 0;
      for (std::size_t i = 0; i < f_.n; ++i) {
        if (mem.counts[i] > 0) m += static_cast<Wide>(W[i]) * weight_unit(mem.bucket[i]);
      }
      best = std::max(best, m);
    }
    return best;
  }

  Rational captured_weight(const Counts& W) const {
    Wide scaled = captured_mass(W);
    return Rational(wide_to_integer(scaled), pow_integer(f_.base, static_cast<unsigned long>(f_.tau) + 1));
  }

  bool is_good(const Counts& W) const { return captured_weight(W) >= cfg_.good_threshold; }

  /// U(W) = {T(S, W) : S in F}, deduplicated, in lexicographic order of counts.
  std::vector<Counts> build_cover(const Counts& W) const {
    std::vector<Counts> out;
    for (std::size_t s = 0; s < size(); ++s) out.push_back(minimum_fragment(s, W).T);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
  }

  /// Checks the structural consequences of minimality against every feasible
  /// S' for (W + T, b_T, s_{b_T}, t), not only the stored witness.
  FragmentPropertyCheck check_properties(std::size_t s, const Counts& W, const FragmentResult& r) const {
    FragmentPropertyCheck out;
    const int b = r.b;
    Counts Z = W;
    for (std::size_t i = 0; i < f_.n; ++i) Z[i] += r.T[i];
    const Integer nb(static_cast<unsigned long>(n_b(s, b)));
    out.mass = cfg_.mass_ratio.get_den() * Integer(static_cast<unsigned long>(r.t)) >= cfg_.mass_ratio.get_num() * nb;
    out.bad_index = is_good(W) || b >= 0;
    for (std::size_t o : peers(s, b)) {
      if (!feasible(o, Z, b, r.t)) continue;
      ++out.feasible;
      const auto& other = f_.members[o];
      for (std::size_t i = 0; i < f_.n; ++i) {
        const std::uint32_t low = (other.counts[i] > 0 && other.bucket[i] <= b) ? other.counts[i] : 0;
        const std::uint32_t expected = low > W[i] ? low - W[i] : 0;
        if (expected != r.T[i]) out.exact_cover = false;
        if (r.T[i] > 0 && !(W[i] < other.counts[i])) out.multiplicity = false;
      }
    }
    return out;
  }

  static Integer wide_to_integer(Wide v) {
    const bool neg = v < 0;
    unsigned __int128 u = neg ? static_cast<unsigned __int128>(-v) : static_cast<unsigned __int128>(v);
    Integer out = Integer(static_cast<unsigned long>(u >> 64)) * pow_integer(2, 64) +
                  Integer(static_cast<unsigned long>(u & 0xFFFFFFFFFFFFFFFFULL));
    return neg ? Integer(-out) : out;
  }

 private:
  Wide wide_power(int e) const {
    Wide v = 1;
    for (int k = 0; k < e; ++k) v *= f_.base;
    return v;
  }
  /// Scaled weight of one copy in bucket j: base^{tau+1-j}.
  Wide weight_unit(int j) const { return unit_[static_cast<std::size_t>(j + 1)]; }
  /// Scaled base^{-b}: base^{tau+1-b}.
  Wide level_unit(int b) const { return unit_[static_cast<std::size_t>(b + 1)]; }

  void check_index(int b) const {
    if (b < -1 || b > f_.tau) throw InputError("index b outside -1..tau");
  }
  void check_counts(const Counts& c) const {
    if (c.size() != f_.n) throw InputError("count vector not over the ground set");
  }

  bool same_partial_profile(std::size_t a, std::size_t c, int b) const {
    for (int j = 0; j <= b; ++j) {
      if (profiles_[a][static_cast<std::size_t>(j)] != profiles_[c][static_cast<std::size_t>(j)]) return false;
    }
    return true;
  }

  bool feasible(std::size_t o, const Counts& Z, int b, std::uint64_t t) const {
    const auto& mem = f_.members[o];
    Wide captured = 0;
    for (std::size_t i = 0; i < f_.n; ++i) {
      const auto c = mem.counts[i];
      if (c == 0) continue;
      if (mem.bucket[i] <= b) {
        if (c > Z[i]) return false;
      } else {
        captured += static_cast<Wide>(std::min(c, Z[i])) * weight_unit(mem.bucket[i]);
      }
    }
    const Wide nb = static_cast<Wide>(prefix_size_[o][static_cast<std::size_t>(b + 1)]);
    const Wide rhs = suffix_mass_[o][static_cast<std::size_t>(b + 1)] - level_unit(b) * (nb - static_cast<Wide>(t));
    return cap_den_ * captured >= cap_num_ * rhs;
  }

  /// Sub-count-vectors of `pool` with total k, lexicographic in sorted
  /// element lists; stops when f returns true.
  template <class F>
  void for_each_sub_counts(const Counts& pool, std::size_t k, F&& f) const {
    std::vector<std::size_t> support;
    for (std::size_t i = 0; i < pool.size(); ++i) {
      if (pool[i] > 0) support.push_back(i);
    }
    std::vector<std::size_t> suffix(support.size() + 1, 0);
    for (std::size_t q = support.size(); q-- > 0;) suffix[q] = suffix[q + 1] + pool[support[q]];
    Counts current(pool.size(), 0);
    bool stopped = false;
    auto rec = [&](auto&& self, std::size_t q, std::size_t left) -> void {
      if (left == 0) {
        stopped = f(static_cast<const Counts&>(current));
        return;
      }
      if (q == support.size() || suffix[q] < left) return;
      const std::size_t i = support[q];
      const auto cap = static_cast<std::uint32_t>(std::min<std::size_t>(pool[i], left));
      for (std::uint32_t c = cap + 1; c-- > 0 && !stopped;) {
        current[i] = c;
        self(self, q + 1, left - c);
      }
      current[i] = 0;
    };
    rec(rec, 0, k);
  }

  DyadicFamily f_;
  FragmentConfig cfg_;
  Wide cap_num_ = 1, cap_den_ = 100;
  std::vector<Wide> unit_;
  std::vector<Profile> profiles_;
  std::vector<std::vector<std::uint64_t>> prefix_size_;
  std::vector<std::vector<Wide>> suffix_mass_;
  std::vector<std::vector<std::vector<std::size_t>>> peers_;
};

/// Classifies W as good when some member captures at least the threshold.
enum class WClass { Good, Bad };
inline const char* to_string(WClass c) { return c == WClass::Good ? "good" : "bad"; }

inline WClass classify(const FragmentEngine& e, const Counts& W) { return e.is_good(W) ? WClass::Good : WClass::Bad; }

}  // namespace pcover
