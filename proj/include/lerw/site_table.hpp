// Open-addressing map from lattice sites to 32-bit values, tuned for random
// walk workloads.
//
// Sites in the same 4x4x4 block hash to 64 consecutive slots, so a walk that
// lingers in a region keeps hitting the same few cache lines. Entries carry an
// epoch stamp and clear() just bumps the epoch, which makes per-sample reuse
// O(1).
#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "lerw/lattice.hpp"

namespace lerw {

/// Coordinates packed into 21-bit fields; valid for |coordinate| < 2^20.
using SiteKey = std::uint64_t;

inline constexpr std::int64_t kPackOffset = std::int64_t{1} << 20;
inline constexpr std::int64_t kPackLimit = kPackOffset - 1;

constexpr SiteKey pack(std::int64_t x, std::int64_t y, std::int64_t z) {
  return (static_cast<SiteKey>(x + kPackOffset) << 42) | (static_cast<SiteKey>(y + kPackOffset) << 21) |
         static_cast<SiteKey>(z + kPackOffset);
}
constexpr SiteKey pack(const Point& p) { return pack(p.x, p.y, p.z); }

constexpr Point unpack(SiteKey k) {
  constexpr SiteKey mask = (SiteKey{1} << 21) - 1;
  return {static_cast<std::int64_t>((k >> 42) & mask) - kPackOffset,
          static_cast<std::int64_t>((k >> 21) & mask) - kPackOffset,
          static_cast<std::int64_t>(k & mask) - kPackOffset};
}

/// Key offsets for the unit steps, in kUnitSteps order.
inline constexpr SiteKey kStepKeyDelta[6] = {
    SiteKey{1} << 42, static_cast<SiteKey>(-(std::int64_t{1} << 42)),
    SiteKey{1} << 21, static_cast<SiteKey>(-(std::int64_t{1} << 21)),
    SiteKey{1},       static_cast<SiteKey>(std::int64_t{-1})};

class SiteTable {
 public:
  static constexpr std::uint32_t kMissing = 0xFFFFFFFFu;

  explicit SiteTable(unsigned log2_capacity = 12) { allocate(log2_capacity); }

  void clear() {
    size_ = 0;
    if (++epoch_ == 0) {
      for (auto& s : slots_) s.epoch = 0;
      epoch_ = 1;
    }
  }

  [[nodiscard]] std::size_t size() const { return size_; }
  [[nodiscard]] std::size_t capacity() const { return slots_.size(); }

  /// Stored value or kMissing.
  [[nodiscard]] std::uint32_t find(SiteKey key) const {
    for (std::size_t i = home(key);; i = (i + 1) & mask_) {
      const Slot& s = slots_[i];
      if (s.epoch != epoch_) return kMissing;
      if (s.key == key) return s.value;
    }
  }

  void assign(SiteKey key, std::uint32_t value) {
    for (std::size_t i = home(key);; i = (i + 1) & mask_) {
      Slot& s = slots_[i];
      if (s.epoch != epoch_) {
        s = {key, value, epoch_};
        if (++size_ * 2 > slots_.size()) grow();
        return;
      }
      if (s.key == key) {
        s.value = value;
        return;
      }
    }
  }

 private:
  struct Slot {
    SiteKey key = 0;
    std::uint32_t value = 0;
    std::uint32_t epoch = 0;
  };

  [[nodiscard]] std::size_t home(SiteKey key) const {
    // Block coordinates drop the two low bits of each 21-bit field.
    constexpr SiteKey kLow = (SiteKey{3} << 42) | (SiteKey{3} << 21) | SiteKey{3};
    const SiteKey block = key & ~kLow;
    std::uint64_t h = block * 0x9E3779B97F4A7C15ULL;
    h ^= h >> 32;
    h *= 0xD6E8FEB86659FD93ULL;
    h ^= h >> 29;
    const auto local = static_cast<std::size_t>((key & 3) | (((key >> 21) & 3) << 2) | (((key >> 42) & 3) << 4));
    return ((static_cast<std::size_t>(h) << 6) | local) & mask_;
  }

  void allocate(unsigned log2_capacity) {
    if (log2_capacity < 7) log2_capacity = 7;
    slots_.assign(std::size_t{1} << log2_capacity, Slot{});
    mask_ = slots_.size() - 1;
    epoch_ = 1;
    size_ = 0;
  }

  void grow() {
    std::vector<Slot> old;
    old.swap(slots_);
    const std::uint32_t live = epoch_;
    unsigned bits = 0;
    while ((std::size_t{1} << bits) < old.size() * 2) ++bits;
    allocate(bits);
    for (const Slot& s : old)
      if (s.epoch == live) assign(s.key, s.value);
  }

  std::vector<Slot> slots_;
  std::size_t mask_ = 0;
  std::size_t size_ = 0;
  std::uint32_t epoch_ = 1;
};

}  // namespace lerw
