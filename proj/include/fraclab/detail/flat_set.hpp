#pragma once

#include <cstdint>
#include <cstddef>
#include <vector>

#include "fraclab/errors.hpp"

namespace fraclab::detail {

inline std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Open-addressing set of 64-bit keys with linear probing.  The key ~0 is
// reserved as the empty slot marker; insert() remaps it.  Insertion order
// does not affect the final contents, so parallel shard merges and serial
// fills agree exactly.
class FlatSet64 {
 public:
  explicit FlatSet64(std::size_t expected = 64) { rehash(capacity_for(expected)); }

  static constexpr std::uint64_t kEmpty = ~0ULL;

  bool insert(std::uint64_t key) {
    if (key == kEmpty) {  // reserved marker, tracked out of band
      bool fresh = !has_empty_key_;
      if (fresh) ++size_;
      has_empty_key_ = true;
      return fresh;
    }
    if ((size_ + 1) * 10 >= cap_ * 7) rehash(cap_ * 2);
    std::size_t mask = cap_ - 1;
    std::size_t i = static_cast<std::size_t>(mix64(key)) & mask;
    while (true) {
      std::uint64_t cur = slots_[i];
      if (cur == kEmpty) {
        slots_[i] = key;
        ++size_;
        return true;
      }
      if (cur == key) return false;
      i = (i + 1) & mask;
    }
  }

  bool contains(std::uint64_t key) const {
    if (key == kEmpty) return has_empty_key_;
    std::size_t mask = cap_ - 1;
    std::size_t i = static_cast<std::size_t>(mix64(key)) & mask;
    while (true) {
      std::uint64_t cur = slots_[i];
      if (cur == kEmpty) return false;
      if (cur == key) return true;
      i = (i + 1) & mask;
    }
  }

  std::size_t size() const { return size_; }

  template <typename Fn>
  void for_each(Fn&& fn) const {
    if (has_empty_key_) fn(kEmpty);
    for (std::uint64_t s : slots_)
      if (s != kEmpty) fn(s);
  }

  void clear() {
    std::fill(slots_.begin(), slots_.end(), kEmpty);
    size_ = 0;
    has_empty_key_ = false;
  }

  void reserve(std::size_t expected) {
    std::size_t want = capacity_for(expected);
    if (want > cap_) rehash(want);
  }

 private:
  static std::size_t capacity_for(std::size_t expected) {
    std::size_t cap = 64;
    while (cap * 7 < (expected + 1) * 10) {
      cap <<= 1;
      if (cap > (std::size_t{1} << 34))
        throw ResourceError("FlatSet64: capacity beyond memory budget");
    }
    return cap;
  }

  void rehash(std::size_t newcap) {
    std::vector<std::uint64_t> old;
    old.swap(slots_);
    slots_.assign(newcap, kEmpty);
    cap_ = newcap;
    std::size_t mask = cap_ - 1;
    for (std::uint64_t key : old) {
      if (key == kEmpty) continue;
      std::size_t i = static_cast<std::size_t>(mix64(key)) & mask;
      while (slots_[i] != kEmpty) i = (i + 1) & mask;
      slots_[i] = key;
    }
  }

  std::vector<std::uint64_t> slots_;
  std::size_t cap_ = 0;
  std::size_t size_ = 0;
  bool has_empty_key_ = false;
};

}  // namespace fraclab::detail
