#include <functional>

#include <gtest/gtest.h>

#include "pcover/fragment.hpp"
#include "pcover/generators.hpp"

using namespace pcover;

namespace {

// Reference implementation of the fragment definitions in plain rationals,
// sharing nothing with the engine's scaled integer code.
struct Oracle {
  const DyadicFamily& f;
  FragmentConfig cfg;

  Rational lambda(std::size_t m, std::size_t i) const { return pow(Rational(f.base), -f.members[m].bucket[i]); }

  bool same_prefix(std::size_t a, std::size_t c, int b) const {
    const auto pa = f.profile(a), pc = f.profile(c);
    for (int j = 0; j <= b; ++j) {
      if (pa[j] != pc[j]) return false;
    }
    return true;
  }

  std::uint64_t n_b(std::size_t m, int b) const {
    std::uint64_t s = 0;
    for (std::size_t i = 0; i < f.n; ++i) {
      if (f.members[m].counts[i] > 0 && f.members[m].bucket[i] <= b) s += f.members[m].counts[i];
    }
    return s;
  }

  bool feasible(std::size_t o, const Counts& Z, int b, std::uint64_t t) const {
    const auto& mem = f.members[o];
    Rational captured = 0, rest = 0;
    for (std::size_t i = 0; i < f.n; ++i) {
      if (mem.counts[i] == 0) continue;
      if (mem.bucket[i] <= b) {
        if (mem.counts[i] > Z[i]) return false;
      } else {
        captured += Rational(std::min(mem.counts[i], Z[i])) * lambda(o, i);
        rest += Rational(mem.counts[i]) * lambda(o, i);
      }
    }
    const Rational level = pow(Rational(f.base), -b);
    const Rational deficit = level * (Rational(static_cast<unsigned long>(n_b(o, b))) - Rational(static_cast<unsigned long>(t)));
    return captured >= cfg.capture * (rest - deficit);
  }

  static void for_each_sub(const Counts& cap, const std::function<void(const Counts&)>& fn) {
    Counts cur(cap.size(), 0);
    std::function<void(std::size_t)> rec = [&](std::size_t i) {
      if (i == cap.size()) return fn(cur);
      for (std::uint32_t c = 0; c <= cap[i]; ++c) {
        cur[i] = c;
        rec(i + 1);
      }
      cur[i] = 0;
    };
    rec(0);
  }

  // Smallest (b, |U|) over every U inside S \ W and every peer S'.
  std::pair<int, std::uint64_t> minimum(std::size_t s, const Counts& W) const {
    Counts rest(f.n);
    for (std::size_t i = 0; i < f.n; ++i) rest[i] = f.members[s].counts[i] > W[i] ? f.members[s].counts[i] - W[i] : 0;
    for (int b = -1; b <= f.tau; ++b) {
      std::optional<std::uint64_t> best;
      for_each_sub(rest, [&](const Counts& U) {
        std::uint64_t t = 0;
        Counts Z = W;
        for (std::size_t i = 0; i < f.n; ++i) {
          t += U[i];
          Z[i] += U[i];
        }
        if (best && t >= *best) return;
        for (std::size_t o = 0; o < f.members.size(); ++o) {
          if (same_prefix(s, o, b) && feasible(o, Z, b, t)) {
            best = t;
            return;
          }
        }
      });
      if (best) return {b, *best};
    }
    return {f.tau + 1, 0};
  }

  bool good(const Counts& W) const {
    for (std::size_t m = 0; m < f.members.size(); ++m) {
      Rational w = 0;
      for (std::size_t i = 0; i < f.n; ++i) {
        if (f.members[m].counts[i] > 0) w += Rational(W[i]) * lambda(m, i);
      }
      if (w >= cfg.good_threshold) return true;
    }
    return false;
  }
};

std::vector<Counts> all_W(std::size_t n, std::uint32_t max_count) {
  std::vector<Counts> out;
  Counts cap(n, max_count);
  Oracle::for_each_sub(cap, [&](const Counts& c) { out.push_back(c); });
  return out;
}

std::vector<DyadicFamily> set_families(int count) {
  std::vector<DyadicFamily> out;
  for (int k = 0; k < count; ++k) {
    gen::RandomFamilyParams params;
    params.n = 2 + static_cast<std::size_t>(k % 4);
    params.members = 2 + static_cast<std::size_t>(k % 3);
    params.max_size = std::min<std::size_t>(params.n, 3);
    auto pf = preprocess(gen::random_family(params, 101, static_cast<std::uint64_t>(k)));
    out.push_back(k % 2 ? regularize(pf.family).family : pf.family);
  }
  return out;
}

FragmentConfig stress() {
  FragmentConfig c;
  c.good_threshold = c.capture;
  return c;
}

void check_against_oracle(const DyadicFamily& fam, const FragmentConfig& cfg, const std::vector<Counts>& Ws) {
  FragmentEngine e(fam, cfg);
  Oracle o{fam, cfg};
  for (const auto& W : Ws) {
    ASSERT_EQ(e.is_good(W), o.good(W));
    for (std::size_t s = 0; s < e.size(); ++s) {
      const auto r = e.minimum_fragment(s, W);
      const auto [b, t] = o.minimum(s, W);
      ASSERT_EQ(r.b, b) << "member " << s;
      ASSERT_EQ(r.t, t) << "member " << s;
      std::uint64_t size = 0;
      Counts Z = W;
      for (std::size_t i = 0; i < fam.n; ++i) {
        size += r.T[i];
        Z[i] += r.T[i];
        ASSERT_LE(W[i] + r.T[i], std::max(W[i], fam.members[s].counts[i])) << "T escapes S \\ W";
      }
      ASSERT_EQ(size, r.t);
      ASSERT_TRUE(o.same_prefix(s, r.witness, r.b));
      ASSERT_TRUE(o.feasible(r.witness, Z, r.b, r.t));
      ASSERT_EQ(e.fragment_witness(s, W, r.T, r.b), r.witness);

      // Structural consequences, checked over every feasible S'.
      std::size_t feasible = 0;
      for (std::size_t q = 0; q < fam.members.size(); ++q) {
        if (!o.same_prefix(s, q, r.b) || !o.feasible(q, Z, r.b, r.t)) continue;
        ++feasible;
        for (std::size_t i = 0; i < fam.n; ++i) {
          const auto& mem = fam.members[q];
          const std::uint32_t low = mem.counts[i] > 0 && mem.bucket[i] <= r.b ? mem.counts[i] : 0;
          ASSERT_EQ(r.T[i], low > W[i] ? low - W[i] : 0) << "union of low buckets minus W";
        }
      }
      ASSERT_GT(feasible, 0U);
      ASSERT_GE(Rational(static_cast<unsigned long>(r.t)),
                cfg.mass_ratio * Rational(static_cast<unsigned long>(o.n_b(s, r.b))));
      if (!o.good(W)) ASSERT_GE(r.b, 0);
      ASSERT_TRUE(e.check_properties(s, W, r).ok());
    }
  }
}

}  // namespace

TEST(Fragment, SetFamiliesMatchReference) {
  for (const auto& fam : set_families(24)) {
    check_against_oracle(fam, FragmentConfig{}, all_W(fam.n, 1));
  }
}

TEST(Fragment, SetFamiliesMatchReferenceUnderStressConfig) {
  for (const auto& fam : set_families(24)) {
    check_against_oracle(fam, stress(), all_W(fam.n, 1));
  }
}

TEST(Fragment, MultisetFamiliesMatchReference) {
  for (int k = 0; k < 10; ++k) {
    gen::RandomMultisetParams params;
    params.n = 2 + static_cast<std::size_t>(k % 2);
    auto inst = gen::random_multiset_family(params, 55, static_cast<std::uint64_t>(k));
    const auto fam = preprocess(inst.family).family;
    check_against_oracle(fam, stress(), all_W(fam.n, 2));
  }
}

TEST(Fragment, CoverCoversEveryMember) {
  for (const auto& fam : set_families(16)) {
    FragmentEngine e(fam);
    for (const auto& W : all_W(fam.n, 1)) {
      const auto cover = e.build_cover(W);
      for (const auto& mem : fam.members) {
        bool hit = false;
        for (const auto& T : cover) {
          bool sub = true;
          for (std::size_t i = 0; i < fam.n; ++i) sub = sub && T[i] <= (mem.counts[i] > W[i] ? mem.counts[i] - W[i] : 0);
          hit = hit || sub;
        }
        ASSERT_TRUE(hit);
      }
    }
  }
}

TEST(Preprocess, WeightsOnlyDecreaseAndStayAligned) {
  for (int k = 0; k < 30; ++k) {
    gen::RandomFamilyParams params;
    params.n = 3 + static_cast<std::size_t>(k % 3);
    const auto f = gen::random_family(params, 77, static_cast<std::uint64_t>(k));
    const auto pf = preprocess(f);
    ASSERT_EQ(pf.family.members.size(), f.size());
    for (std::size_t m = 0; m < f.size(); ++m) {
      EXPECT_EQ(pf.weight_before[m], f.members()[m].total_weight());
      EXPECT_LE(pf.weight_after[m], pf.weight_before[m]);
      for (std::size_t i = 0; i < f.n(); ++i) {
        if (pf.family.members[m].counts[i] > 0) EXPECT_TRUE(f.members()[m].set.test(static_cast<Element>(i)));
      }
    }
    const auto reg = regularize(pf.family);
    ASSERT_EQ(reg.family.members.size(), f.size());
    for (std::size_t m = 0; m < f.size(); ++m) {
      EXPECT_TRUE(is_legal(reg.family.profile(m))) << "member " << m;
      EXPECT_LE(reg.weight_after[m], reg.weight_before[m]);
    }
  }
}

TEST(Profiles, LegalValuesArePowersInsideTheFloor) {
  EXPECT_TRUE(is_power_of(1, 100));
  EXPECT_TRUE(is_power_of(10000, 100));
  EXPECT_FALSE(is_power_of(50, 100));
  EXPECT_EQ(floor_power_of(250, 100), 100U);
  for (int j = 0; j <= 3; ++j) {
    for (auto v : legal_values(j)) {
      EXPECT_TRUE(is_power_of(v, 100));
      EXPECT_TRUE(is_legal_value(j, v));
    }
  }
  EXPECT_FALSE(enumerate_legal_partial_profiles(1).empty());
}
