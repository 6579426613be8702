#pragma once

#include <bit>
#include <cstdint>
#include <initializer_list>
#include <string>
#include <vector>

#include "arsched/types.hpp"

namespace arsched {

/// Fixed-universe bitset over PE ids [0, universe).
///
/// Every set taking part in one calendar shares the same universe (the
/// cluster size), so binary operations assume equal word counts.
class PeSet {
 public:
  PeSet() = default;

  explicit PeSet(std::uint32_t universe)
      : universe_(universe), words_((universe + 63) / 64, 0) {}

  PeSet(std::uint32_t universe, std::initializer_list<PeId> ids) : PeSet(universe) {
    for (PeId id : ids) insert(id);
  }

  static PeSet full(std::uint32_t universe) {
    PeSet s(universe);
    for (std::size_t w = 0; w < s.words_.size(); ++w) s.words_[w] = ~std::uint64_t{0};
    s.trim();
    return s;
  }

  /// The `count` lowest ids, i.e. {0, ..., count-1}.
  static PeSet prefix(std::uint32_t universe, std::uint32_t count) {
    PeSet s(universe);
    for (PeId id = 0; id < count && id < universe; ++id) s.insert(id);
    return s;
  }

  std::uint32_t universe() const { return universe_; }

  void insert(PeId id) {
    check(id);
    words_[id / 64] |= bit(id);
  }

  void erase(PeId id) {
    check(id);
    words_[id / 64] &= ~bit(id);
  }

  bool contains(PeId id) const {
    return id < universe_ && (words_[id / 64] & bit(id)) != 0;
  }

  std::uint32_t count() const {
    std::uint32_t n = 0;
    for (auto w : words_) n += static_cast<std::uint32_t>(std::popcount(w));
    return n;
  }

  bool empty() const {
    for (auto w : words_)
      if (w != 0) return false;
    return true;
  }

  bool intersects(const PeSet& other) const {
    for (std::size_t w = 0; w < words_.size(); ++w)
      if ((words_[w] & other.words_[w]) != 0) return true;
    return false;
  }

  bool is_subset_of(const PeSet& other) const {
    for (std::size_t w = 0; w < words_.size(); ++w)
      if ((words_[w] & ~other.words_[w]) != 0) return false;
    return true;
  }

  PeSet& operator|=(const PeSet& other) {
    for (std::size_t w = 0; w < words_.size(); ++w) words_[w] |= other.words_[w];
    return *this;
  }

  PeSet& operator-=(const PeSet& other) {
    for (std::size_t w = 0; w < words_.size(); ++w) words_[w] &= ~other.words_[w];
    return *this;
  }

  PeSet& operator&=(const PeSet& other) {
    for (std::size_t w = 0; w < words_.size(); ++w) words_[w] &= other.words_[w];
    return *this;
  }

  friend PeSet operator|(PeSet a, const PeSet& b) { return a |= b; }
  friend PeSet operator-(PeSet a, const PeSet& b) { return a -= b; }
  friend PeSet operator&(PeSet a, const PeSet& b) { return a &= b; }

  PeSet complement() const {
    PeSet s(universe_);
    for (std::size_t w = 0; w < words_.size(); ++w) s.words_[w] = ~words_[w];
    s.trim();
    return s;
  }

  /// Subset holding the `k` lowest ids of this set (all of them if fewer).
  PeSet lowest(std::uint32_t k) const {
    PeSet s(universe_);
    for (std::size_t w = 0; w < words_.size() && k > 0; ++w) {
      std::uint64_t word = words_[w];
      while (word != 0 && k > 0) {
        const std::uint64_t low = word & (~word + 1);
        s.words_[w] |= low;
        word ^= low;
        --k;
      }
    }
    return s;
  }

  std::vector<PeId> ids() const {
    std::vector<PeId> out;
    for (std::size_t w = 0; w < words_.size(); ++w) {
      std::uint64_t word = words_[w];
      while (word != 0) {
        out.push_back(static_cast<PeId>(w * 64 + std::countr_zero(word)));
        word &= word - 1;
      }
    }
    return out;
  }

  /// "0,1,5" in ascending order, "-" for the empty set.
  std::string to_string() const {
    if (empty()) return "-";
    std::string out;
    for (PeId id : ids()) {
      if (!out.empty()) out += ',';
      out += std::to_string(id);
    }
    return out;
  }

  friend bool operator==(const PeSet&, const PeSet&) = default;

 private:
  static std::uint64_t bit(PeId id) { return std::uint64_t{1} << (id % 64); }

  void check(PeId id) const {
    if (id >= universe_)
      throw PreconditionError("PE id " + std::to_string(id) + " outside cluster of " +
                              std::to_string(universe_));
  }

  void trim() {
    if (universe_ % 64 != 0 && !words_.empty())
      words_.back() &= (std::uint64_t{1} << (universe_ % 64)) - 1;
  }

  std::uint32_t universe_ = 0;
  std::vector<std::uint64_t> words_;
};

}  // namespace arsched
