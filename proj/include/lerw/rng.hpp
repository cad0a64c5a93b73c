// Counter-based random streams (Philox4x32-10).
//
// Every stream is addressed by (master_seed, stream_index): the key is the
// 64-bit master seed and the 128-bit counter holds (block, stream_index). The
// output of a stream is a pure function of that pair, so any sample can be
// regenerated independently of how work was split across threads.
#pragma once

#include <array>
#include <cstdint>
#include <limits>

namespace lerw {

inline constexpr const char* kRngAlgorithm = "philox4x32-10";

using Philox4x32Counter = std::array<std::uint32_t, 4>;
using Philox4x32Key = std::array<std::uint32_t, 2>;

/// One Philox4x32 block with ten rounds.
constexpr Philox4x32Counter philox4x32_10(Philox4x32Counter ctr, Philox4x32Key key) {
  constexpr std::uint32_t kM0 = 0xD2511F53u;
  constexpr std::uint32_t kM1 = 0xCD9E8D57u;
  constexpr std::uint32_t kW0 = 0x9E3779B9u;
  constexpr std::uint32_t kW1 = 0xBB67AE85u;
  for (int round = 0; round < 10; ++round) {
    const std::uint64_t p0 = static_cast<std::uint64_t>(kM0) * ctr[0];
    const std::uint64_t p1 = static_cast<std::uint64_t>(kM1) * ctr[2];
    const auto hi0 = static_cast<std::uint32_t>(p0 >> 32), lo0 = static_cast<std::uint32_t>(p0);
    const auto hi1 = static_cast<std::uint32_t>(p1 >> 32), lo1 = static_cast<std::uint32_t>(p1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    key[0] += kW0;
    key[1] += kW1;
  }
  return ctr;
}

class RngStream {
 public:
  using result_type = std::uint32_t;

  RngStream(std::uint64_t master_seed, std::uint64_t stream_index)
      : seed_(master_seed), stream_(stream_index) {}

  [[nodiscard]] std::uint64_t master_seed() const { return seed_; }
  [[nodiscard]] std::uint64_t stream_index() const { return stream_; }

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() { return next_u32(); }

  /// Words come out in block order: block b yields words 4b .. 4b+3.
  std::uint32_t next_u32() {
    if (pos_ == kBatchWords) refill();
    return buf_[pos_++];
  }

  std::uint64_t next_u64() {
    const std::uint64_t hi = next_u32();
    return (hi << 32) | next_u32();
  }

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  /// Exactly uniform integer in [0, n), n > 0 (Lemire's rejection method).
  std::uint32_t below(std::uint32_t n) {
    std::uint64_t m = static_cast<std::uint64_t>(next_u32()) * n;
    auto low = static_cast<std::uint32_t>(m);
    if (low < n) {
      const std::uint32_t floor = static_cast<std::uint32_t>(-n) % n;
      while (low < floor) {
        m = static_cast<std::uint64_t>(next_u32()) * n;
        low = static_cast<std::uint32_t>(m);
      }
    }
    return static_cast<std::uint32_t>(m >> 32);
  }

  /// A uniform direction index in [0, 6). Directions are drawn in pairs from
  /// one uniform value in [0, 36); the second is held for the next call.
  std::uint32_t direction() {
    if (pending_ < 6) {
      const std::uint32_t d = pending_;
      pending_ = kNoPending;
      return d;
    }
    const std::uint32_t v = below(36);
    pending_ = v % 6;
    return v / 6;
  }

 private:
  static constexpr unsigned kBatchBlocks = 16;
  static constexpr unsigned kBatchWords = 4 * kBatchBlocks;
  static constexpr std::uint32_t kNoPending = 6;

  void refill() {
    // Lane-parallel form of philox4x32_10 over consecutive blocks.
    constexpr std::uint32_t kM0 = 0xD2511F53u;
    constexpr std::uint32_t kM1 = 0xCD9E8D57u;
    std::uint32_t c0[kBatchBlocks], c1[kBatchBlocks], c2[kBatchBlocks], c3[kBatchBlocks];
    for (unsigned l = 0; l < kBatchBlocks; ++l) {
      const std::uint64_t b = block_ + l;
      c0[l] = static_cast<std::uint32_t>(b);
      c1[l] = static_cast<std::uint32_t>(b >> 32);
      c2[l] = static_cast<std::uint32_t>(stream_);
      c3[l] = static_cast<std::uint32_t>(stream_ >> 32);
    }
    std::uint32_t k0 = static_cast<std::uint32_t>(seed_);
    std::uint32_t k1 = static_cast<std::uint32_t>(seed_ >> 32);
    for (int round = 0; round < 10; ++round) {
      for (unsigned l = 0; l < kBatchBlocks; ++l) {
        const std::uint64_t p0 = static_cast<std::uint64_t>(kM0) * c0[l];
        const std::uint64_t p1 = static_cast<std::uint64_t>(kM1) * c2[l];
        const auto n0 = static_cast<std::uint32_t>(p1 >> 32) ^ c1[l] ^ k0;
        const auto n2 = static_cast<std::uint32_t>(p0 >> 32) ^ c3[l] ^ k1;
        c1[l] = static_cast<std::uint32_t>(p1);
        c3[l] = static_cast<std::uint32_t>(p0);
        c0[l] = n0;
        c2[l] = n2;
      }
      k0 += 0x9E3779B9u;
      k1 += 0xBB67AE85u;
    }
    for (unsigned l = 0; l < kBatchBlocks; ++l) {
      buf_[4 * l] = c0[l];
      buf_[4 * l + 1] = c1[l];
      buf_[4 * l + 2] = c2[l];
      buf_[4 * l + 3] = c3[l];
    }
    block_ += kBatchBlocks;
    pos_ = 0;
  }

  std::uint64_t seed_;
  std::uint64_t stream_;
  std::uint64_t block_ = 0;
  std::array<std::uint32_t, kBatchWords> buf_{};
  unsigned pos_ = kBatchWords;
  std::uint32_t pending_ = kNoPending;
};

/// A contiguous range of stream indices owned by one estimator call.
struct StreamRange {
  std::uint64_t master_seed = 0;
  std::uint64_t first = 0;  ///< first stream index used
  std::uint64_t count = 0;  ///< number of stream indices reserved
};

}  // namespace lerw
