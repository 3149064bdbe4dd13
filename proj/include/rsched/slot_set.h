#pragma once

#include <algorithm>
#include <cstdint>
#include <vector>

namespace rsched {

using Slot = int;

// Set of slots in [1, capacity], stored as a bitset.
class SlotSet {
 public:
  SlotSet() = default;
  explicit SlotSet(int capacity)
      : capacity_(capacity), words_(static_cast<std::size_t>(capacity) / 64 + 1, 0) {}

  // Builds the set encoded by bit (k-1) of `mask` for k in [1, capacity].
  static SlotSet from_mask(std::uint64_t mask, int capacity) {
    SlotSet set(capacity);
    for (Slot k = 1; k <= capacity && k <= 64; ++k) {
      if ((mask >> (k - 1)) & 1u) set.insert(k);
    }
    return set;
  }

  int capacity() const { return capacity_; }

  bool contains(Slot k) const {
    if (k < 1 || k > capacity_) return false;
    return (words_[static_cast<std::size_t>(k) >> 6] >> (k & 63)) & 1u;
  }

  void insert(Slot k) { words_[static_cast<std::size_t>(k) >> 6] |= std::uint64_t{1} << (k & 63); }

  void insert(Slot lo, Slot hi) {
    for (Slot k = lo; k <= hi; ++k) insert(k);
  }

  bool intersects(Slot lo, Slot hi) const {
    for (Slot k = lo; k <= hi; ++k) {
      if (contains(k)) return true;
    }
    return false;
  }

  bool intersects(const SlotSet& other) const {
    const std::size_t count = std::min(words_.size(), other.words_.size());
    for (std::size_t w = 0; w < count; ++w) {
      if (words_[w] & other.words_[w]) return true;
    }
    return false;
  }

  bool empty() const {
    for (auto w : words_) {
      if (w) return false;
    }
    return true;
  }

  std::vector<Slot> slots() const {
    std::vector<Slot> out;
    for (Slot k = 1; k <= capacity_; ++k) {
      if (contains(k)) out.push_back(k);
    }
    return out;
  }

  // Bit (k-1) set for every member k; only meaningful when capacity <= 64.
  std::uint64_t to_mask() const {
    std::uint64_t mask = 0;
    for (Slot k = 1; k <= capacity_ && k <= 64; ++k) {
      if (contains(k)) mask |= std::uint64_t{1} << (k - 1);
    }
    return mask;
  }

  friend bool operator==(const SlotSet& lhs, const SlotSet& rhs) {
    return lhs.capacity_ == rhs.capacity_ && lhs.words_ == rhs.words_;
  }

 private:
  int capacity_ = 0;
  std::vector<std::uint64_t> words_ = std::vector<std::uint64_t>(1, 0);
};

}  // namespace rsched
