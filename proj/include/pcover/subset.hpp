#pragma once

#include <boost/dynamic_bitset.hpp>

#include <algorithm>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <iterator>
#include <string>
#include <vector>

#include "pcover/error.hpp"

namespace pcover {

using Element = std::uint32_t;

/// Finite ground set X = {0, ..., n-1}.
struct GroundSet {
  std::size_t n = 1;

  GroundSet() = default;
  explicit GroundSet(std::size_t size) : n(size) {
    if (n == 0) throw InputError("ground set must contain at least one element");
  }
  friend bool operator==(const GroundSet&, const GroundSet&) = default;
};

/// Subset of a ground set as a membership mask.
///
/// Ordering treats the mask as a binary number (highest element id most
/// significant); this is the "bitmask order" used for deterministic tie-breaks.
class SubsetBits {
 public:
  using Block = std::uint64_t;

  SubsetBits() = default;
  explicit SubsetBits(std::size_t universe) : bits_(universe) {}
  SubsetBits(std::size_t universe, std::initializer_list<Element> elems) : bits_(universe) {
    for (Element e : elems) set(e);
  }
  template <class Range>
  static SubsetBits from(std::size_t universe, const Range& elems) {
    SubsetBits out(universe);
    for (auto e : elems) out.set(static_cast<Element>(e));
    return out;
  }

  std::size_t universe() const { return bits_.size(); }
  std::size_t count() const { return bits_.count(); }
  bool empty() const { return bits_.none(); }

  bool test(Element e) const { return e < bits_.size() && bits_.test(e); }
  SubsetBits& set(Element e) {
    if (e >= bits_.size()) {
      throw InputError("element " + std::to_string(e) + " outside ground set of size " +
                       std::to_string(bits_.size()));
    }
    bits_.set(e);
    return *this;
  }
  SubsetBits& reset(Element e) {
    if (e < bits_.size()) bits_.reset(e);
    return *this;
  }

  /// this ⊆ other
  bool is_subset_of(const SubsetBits& other) const {
    same_universe(other);
    return bits_.is_subset_of(other.bits_);
  }
  bool intersects(const SubsetBits& other) const {
    same_universe(other);
    return bits_.intersects(other.bits_);
  }

  SubsetBits& operator|=(const SubsetBits& o) {
    same_universe(o);
    bits_ |= o.bits_;
    return *this;
  }
  SubsetBits& operator&=(const SubsetBits& o) {
    same_universe(o);
    bits_ &= o.bits_;
    return *this;
  }
  SubsetBits& operator-=(const SubsetBits& o) {
    same_universe(o);
    bits_ -= o.bits_;
    return *this;
  }
  friend SubsetBits operator|(SubsetBits a, const SubsetBits& b) { return a |= b; }
  friend SubsetBits operator&(SubsetBits a, const SubsetBits& b) { return a &= b; }
  friend SubsetBits operator-(SubsetBits a, const SubsetBits& b) { return a -= b; }

  std::size_t intersection_count(const SubsetBits& o) const { return (*this & o).count(); }

  std::vector<Element> elements() const {
    std::vector<Element> out;
    out.reserve(count());
    for (auto i = bits_.find_first(); i != boost::dynamic_bitset<Block>::npos; i = bits_.find_next(i)) {
      out.push_back(static_cast<Element>(i));
    }
    return out;
  }

  template <class F>
  void for_each(F&& f) const {
    for (auto i = bits_.find_first(); i != boost::dynamic_bitset<Block>::npos; i = bits_.find_next(i)) {
      f(static_cast<Element>(i));
    }
  }

  std::vector<Block> blocks() const {
    std::vector<Block> out(bits_.num_blocks());
    boost::to_block_range(bits_, out.begin());
    return out;
  }

  friend bool operator==(const SubsetBits& a, const SubsetBits& b) { return a.bits_ == b.bits_; }

  friend bool operator<(const SubsetBits& a, const SubsetBits& b) {
    a.same_universe(b);
    auto ab = a.blocks(), bb = b.blocks();
    return std::lexicographical_compare(ab.rbegin(), ab.rend(), bb.rbegin(), bb.rend());
  }

  /// "{0,3,5}"
  std::string to_string() const {
    std::string out = "{";
    bool first = true;
    for_each([&](Element e) {
      if (!first) out += ",";
      out += std::to_string(e);
      first = false;
    });
    return out + "}";
  }

 private:
  void same_universe(const SubsetBits& o) const {
    if (o.bits_.size() != bits_.size()) throw InputError("subsets over different ground sets");
  }

  boost::dynamic_bitset<Block> bits_;
};

/// Lexicographic order on sorted element lists ({0,3} < {1,2}); the tie-break
/// used among equal-cardinality fragments.
inline bool lex_elements_less(const SubsetBits& a, const SubsetBits& b) {
  auto ea = a.elements(), eb = b.elements();
  return std::lexicographical_compare(ea.begin(), ea.end(), eb.begin(), eb.end());
}

inline bool upset_contains(const SubsetBits& generator, const SubsetBits& s) {
  return generator.is_subset_of(s);
}

/// Visits every k-subset of `pool` in lexicographic order of sorted element
/// lists. Stops early when `f` returns true; returns whether it stopped.
template <class F>
bool for_each_k_subset(const SubsetBits& pool, std::size_t k, F&& f) {
  auto elems = pool.elements();
  const std::size_t m = elems.size();
  if (k > m) return false;
  std::vector<std::size_t> idx(k);
  for (std::size_t i = 0; i < k; ++i) idx[i] = i;
  while (true) {
    SubsetBits u(pool.universe());
    for (auto i : idx) u.set(elems[i]);
    if (f(u)) return true;
    // advance
    std::size_t i = k;
    while (i > 0 && idx[i - 1] == m - k + (i - 1)) --i;
    if (i == 0) return false;
    ++idx[i - 1];
    for (std::size_t j = i; j < k; ++j) idx[j] = idx[j - 1] + 1;
  }
}

/// Visits all subsets of `s` (including ∅ and s).
template <class F>
void for_each_subset(const SubsetBits& s, F&& f) {
  auto elems = s.elements();
  if (elems.size() >= 63) throw GuardError("subset-enumeration", "set has " + std::to_string(elems.size()) + " elements");
  const std::uint64_t total = std::uint64_t{1} << elems.size();
  for (std::uint64_t mask = 0; mask < total; ++mask) {
    SubsetBits u(s.universe());
    for (std::size_t i = 0; i < elems.size(); ++i) {
      if (mask >> i & 1U) u.set(elems[i]);
    }
    f(u);
  }
}

}  // namespace pcover

template <>
struct std::hash<pcover::SubsetBits> {
  std::size_t operator()(const pcover::SubsetBits& s) const noexcept {
    std::size_t h = s.universe();
    for (auto b : s.blocks()) h ^= std::hash<std::uint64_t>{}(b) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    return h;
  }
};
