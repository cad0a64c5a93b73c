// Chronological loop erasure.
#pragma once

#include <cstdint>
#include <vector>

#include "lerw/lattice.hpp"
#include "lerw/path.hpp"
#include "lerw/site_table.hpp"
#include "lerw/sparse_grid.hpp"

namespace lerw {

/// Literal last-visit recursion: s_0 = max{t : p(t) = p(0)},
/// s_i = max{t : p(t) = p(s_{i-1} + 1)}, stopping once s_i reaches the end.
/// Quadratic; kept as the reference the fast eraser is tested against.
SelfAvoidingPath loop_erase_reference(const Path& path);

/// Erase-on-revisit over a hash map of site -> position.
SelfAvoidingPath loop_erase_fast(const Path& path);

/// [p(m), ..., p(0)].
Path reverse_path(const Path& path);
SelfAvoidingPath reverse_path(const SelfAvoidingPath& path);

/// Streaming erase-on-revisit state.
///
/// Holds only the current self-avoiding path and a map from site to its
/// position. Map entries are never deleted: an entry is live only if the
/// position it records is still inside the current path and holds the same
/// site, so truncation is just a resize.
class LoopEraser {
 public:
  static constexpr std::uint32_t npos = SparseGrid::kMissing;

  LoopEraser() = default;

  void reset(SiteKey start) {
    table_.clear();
    if (keys_.empty()) keys_.resize(1024);
    keys_[0] = start;
    size_ = 1;
    table_.assign(start, 0);
  }
  void reset(const Point& start) { reset(pack(start)); }

  /// Appends the next walk position (a neighbour of the current tip). A
  /// revisit truncates the path back to the earlier occurrence; written
  /// without data-dependent branches since revisits are unpredictable.
  void push(SiteKey key) {
    std::uint32_t& slot = table_.slot(key);
    const std::size_t at = slot;
    const bool in_range = at < size_;
    const bool hit = in_range & (keys_[in_range ? at : 0] == key);
    const std::size_t pos = hit ? at : size_;
    if (pos >= keys_.size()) keys_.resize(keys_.size() * 2);
    keys_[pos] = key;
    slot = static_cast<std::uint32_t>(pos);
    size_ = pos + 1;
  }
  void push(const Point& p) { push(pack(p)); }

  /// Position of `key` in the current path, or npos.
  [[nodiscard]] std::uint32_t index_of(SiteKey key) const {
    const std::uint32_t at = table_.find(key);
    return (at < size_ && keys_[at] == key) ? at : npos;
  }
  [[nodiscard]] bool contains(SiteKey key) const { return index_of(key) != npos; }

  [[nodiscard]] std::size_t length() const { return size_ - 1; }
  [[nodiscard]] std::size_t size() const { return size_; }
  [[nodiscard]] SiteKey key_at(std::size_t i) const { return keys_[i]; }
  [[nodiscard]] SelfAvoidingPath path() const;

 private:
  SparseGrid table_;
  std::vector<SiteKey> keys_;  // capacity buffer; the path is keys_[0, size_)
  std::size_t size_ = 0;
};

/// len(LE(path)); `ball` is the stopping ball the path was sampled for.
std::size_t lerw_length(const Path& path, const Ball& ball);

}  // namespace lerw
