// Paged sparse map from lattice sites to 32-bit values.
//
// The lattice is tiled by 8x8x8 blocks; each touched block owns a dense page
// of 512 values, located through a small open-addressing block table. The
// page of the most recent lookup is cached, and a walk stays in one block for
// many steps, so most lookups never touch the block table. clear() is O(1)
// apart from recycling pages.
#pragma once

#include <cstdint>
#include <cstring>
#include <vector>

#include "lerw/site_table.hpp"

namespace lerw {

class SparseGrid {
 public:
  static constexpr std::uint32_t kMissing = 0xFFFFFFFFu;
  static constexpr std::size_t kPageSites = 512;

  SparseGrid() { blocks_.assign(std::size_t{1} << 10, Block{}); }

  void clear() {
    pages_used_ = 0;
    block_count_ = 0;
    cached_block_ = kNoBlock;
    cached_page_ = nullptr;
    if (++epoch_ == 0) {
      for (auto& b : blocks_) b.epoch = 0;
      epoch_ = 1;
    }
  }

  [[nodiscard]] std::uint32_t find(SiteKey key) const {
    const SiteKey block = key & kBlockMask;
    if (block != cached_block_) {
      const std::uint32_t page = lookup_block(block);
      if (page == kMissing) return kMissing;
      cached_block_ = block;
      cached_page_ = page_ptr(page);
    }
    return cached_page_[local(key)];
  }

  /// Reference to the value stored for `key`, creating its page if needed.
  std::uint32_t& slot(SiteKey key) {
    const SiteKey block = key & kBlockMask;
    if (block != cached_block_) {
      cached_page_ = page_ptr(find_or_create_block(block));
      cached_block_ = block;
    }
    return cached_page_[local(key)];
  }

  void assign(SiteKey key, std::uint32_t value) { slot(key) = value; }

  [[nodiscard]] std::size_t pages_in_use() const { return pages_used_; }

 private:
  static constexpr SiteKey kLow3 = (SiteKey{7} << 42) | (SiteKey{7} << 21) | SiteKey{7};
  static constexpr SiteKey kBlockMask = ~kLow3;
  static constexpr SiteKey kNoBlock = ~SiteKey{0};

  struct Block {
    SiteKey key = 0;
    std::uint32_t page = 0;
    std::uint32_t epoch = 0;
  };

  static std::size_t local(SiteKey key) {
    return static_cast<std::size_t>((key & 7) | (((key >> 21) & 7) << 3) | (((key >> 42) & 7) << 6));
  }

  static std::uint64_t mix(SiteKey k) {
    k ^= k >> 31;
    k *= 0x7FB5D329728EA185ULL;
    k ^= k >> 27;
    k *= 0x81DADEF4BC2DD44DULL;
    k ^= k >> 33;
    return k;
  }

  std::uint32_t* page_ptr(std::uint32_t page) const {
    return const_cast<std::uint32_t*>(storage_.data()) + std::size_t{page} * kPageSites;
  }

  [[nodiscard]] std::uint32_t lookup_block(SiteKey block) const {
    const std::size_t mask = blocks_.size() - 1;
    for (std::size_t i = mix(block) & mask;; i = (i + 1) & mask) {
      const Block& b = blocks_[i];
      if (b.epoch != epoch_) return kMissing;
      if (b.key == block) return b.page;
    }
  }

  std::uint32_t find_or_create_block(SiteKey block) {
    const std::size_t mask = blocks_.size() - 1;
    for (std::size_t i = mix(block) & mask;; i = (i + 1) & mask) {
      Block& b = blocks_[i];
      if (b.epoch == epoch_) {
        if (b.key == block) return b.page;
        continue;
      }
      const auto page = static_cast<std::uint32_t>(pages_used_++);
      if (storage_.size() < pages_used_ * kPageSites) storage_.resize(pages_used_ * kPageSites * 2);
      std::memset(page_ptr(page), 0xFF, kPageSites * sizeof(std::uint32_t));
      b = {block, page, epoch_};
      if (++block_count_ * 2 > blocks_.size()) grow_blocks();
      return page;
    }
  }

  void grow_blocks() {
    std::vector<Block> old;
    old.swap(blocks_);
    blocks_.assign(old.size() * 2, Block{});
    const std::size_t mask = blocks_.size() - 1;
    for (const Block& b : old) {
      if (b.epoch != epoch_) continue;
      std::size_t i = mix(b.key) & mask;
      while (blocks_[i].epoch == epoch_) i = (i + 1) & mask;
      blocks_[i] = b;
    }
  }

  std::vector<Block> blocks_;
  std::vector<std::uint32_t> storage_;
  std::size_t pages_used_ = 0;
  std::size_t block_count_ = 0;
  std::uint32_t epoch_ = 1;
  mutable SiteKey cached_block_ = kNoBlock;
  mutable std::uint32_t* cached_page_ = nullptr;
};

}  // namespace lerw
