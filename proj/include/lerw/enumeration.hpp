// Depth-first enumeration of loop-erased paths with their exact prefix
// probabilities.
//
// A prefix eta[0, n] whose tip lies in the region has probability
//   6^-n * prod_{j<n} G_{A_j}(eta_j, eta_j) * P^{eta_n}(leave D before hitting eta[0, n-1]),
// A_j = D \ eta[0, j-1]. The enumerator keeps G restricted to the working
// sites (region plus the boundary sites that still lie in D) and the escape
// vector e(x) = P^x(leave D before hitting the current path), and removes each
// committed site with one Schur complement step:
//   G'(x, y) = G(x, y) - G(x, u) G(u, y) / G(u, u),
//   e'(x)    = e(x)    - G(x, u) e(u)    / G(u, u).
// Each depth owns its own buffers, so backtracking never has to undo an
// update.
#pragma once

#include <bit>
#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <unordered_map>
#include <vector>

#include "lerw/domain.hpp"
#include "lerw/exact_oracle.hpp"
#include "lerw/lattice.hpp"

namespace lerw {

class LerwEnumerator {
 public:
  using Index = std::uint32_t;

  /// Loop erasures of walks in `domain`, followed until the path first
  /// leaves `region` (a subset of the domain). Green's values come from
  /// column solves in the domain.
  LerwEnumerator(const FiniteDomain& domain, const std::vector<Point>& region, const OracleOptions& opts = {});

  /// Same, with the ambient domain given by a membership test and its Green's
  /// function supplied directly (e.g. all of Z^3).
  LerwEnumerator(const std::vector<Point>& region, const std::function<bool(const Point&)>& in_domain,
                 const std::function<double(const Point&, const Point&)>& green);

  [[nodiscard]] std::size_t region_size() const { return nr_; }
  /// Sites with an index: region first, then boundary sites inside the domain,
  /// then boundary sites outside it.
  [[nodiscard]] const std::vector<Point>& sites() const { return sites_; }
  [[nodiscard]] const Point& site(Index i) const { return sites_[i]; }
  [[nodiscard]] bool in_region(Index i) const { return i < nr_; }
  [[nodiscard]] bool in_domain(Index i) const { return i < nw_; }
  [[nodiscard]] Index index_of(const Point& p) const;
  /// Index of site i + kUnitSteps[d], or FiniteDomain::npos if it has none.
  [[nodiscard]] Index neighbor(Index i, std::size_t d) const { return nbr_all_[i][d]; }

  class Node;

  /// Walks every prefix starting at `start` (which must be in the region).
  /// `enter(node)` sees each prefix whose tip is in the region and returns
  /// whether to descend into it; `leaf(node)` sees each prefix whose tip has
  /// just left the region.
  template <class Enter, class Leaf>
  void run(const Point& start, Enter&& enter, Leaf&& leaf) const;

  /// Convenience: every path to the first exit from the region.
  template <class Leaf>
  void for_each_exit_path(const Point& start, Leaf&& leaf) const {
    run(start, [](const Node&) { return true; }, leaf);
  }

 private:
  friend class Node;
  struct Level {
    std::vector<double> h;  // rows: live working sites, cols: live region sites
    std::vector<double> e;
    std::size_t rows = 0, cols = 0;
  };
  struct State;

  void build(const std::vector<Point>& region, const std::function<bool(const Point&)>& in_domain);
  template <class Enter, class Leaf>
  void expand(State& st, std::size_t depth, double weight, Enter& enter, Leaf& leaf) const;

  std::vector<Point> sites_;
  std::size_t nr_ = 0, nw_ = 0;
  std::vector<std::array<Index, 6>> nbr_;      // for region sites
  std::vector<std::array<Index, 6>> nbr_all_;  // for every indexed site
  std::unordered_map<Point, Index, PointHash> index_;
  std::vector<double> g0_;                 // nw_ x nr_
  std::vector<double> e0_;                 // nw_
  std::size_t words_ = 0;
};

struct LerwEnumerator::State {
  std::vector<Level> levels;
  std::vector<Index> path;
  std::vector<std::uint64_t> removed;  // bitmask over region sites

  [[nodiscard]] bool is_removed(Index i) const { return (removed[i >> 6] >> (i & 63)) & 1u; }
  void set_removed(Index i, bool on) {
    if (on)
      removed[i >> 6] |= std::uint64_t{1} << (i & 63);
    else
      removed[i >> 6] &= ~(std::uint64_t{1} << (i & 63));
  }
  // Rank of a live site among live sites; region sites come first, so rows and
  // columns share it.
  [[nodiscard]] std::size_t rank(Index i, std::size_t nr, std::size_t depth) const {
    if (i >= nr) return i - depth;
    std::size_t before = 0;
    const std::size_t w = i >> 6;
    for (std::size_t k = 0; k < w; ++k) before += static_cast<std::size_t>(std::popcount(removed[k]));
    const std::uint64_t mask = (std::uint64_t{1} << (i & 63)) - 1;
    before += static_cast<std::size_t>(std::popcount(removed[w] & mask));
    return i - before;
  }
};

/// A prefix seen during enumeration.
class LerwEnumerator::Node {
 public:
  /// Site indices of the prefix, start first.
  [[nodiscard]] std::span<const Index> path() const { return path_; }
  [[nodiscard]] std::size_t length() const { return path_.size() - 1; }
  [[nodiscard]] Index tip() const { return path_.back(); }
  [[nodiscard]] double probability() const { return probability_; }
  [[nodiscard]] const LerwEnumerator& enumerator() const { return *owner_; }
  [[nodiscard]] std::vector<Point> points() const {
    std::vector<Point> out;
    out.reserve(path_.size());
    for (Index i : path_) out.push_back(owner_->site(i));
    return out;
  }

  /// P^x(leave D before hitting path[0, n-1]) for a working site x, with
  /// n = length(). Zero on the path, one outside D.
  [[nodiscard]] double escape_without_prefix(Index x) const;
  /// G_{D \ path[0, n-1]}(x, y) for working sites x and region site y.
  [[nodiscard]] double green_without_prefix(Index x, Index y) const;

 private:
  friend class LerwEnumerator;
  Node(const LerwEnumerator* owner, const State* st, std::size_t depth, std::span<const Index> path, double p)
      : owner_(owner), st_(st), depth_(depth), path_(path), probability_(p) {}

  const LerwEnumerator* owner_;
  const State* st_;
  std::size_t depth_;  // levels[depth_] holds G and e with path[0, depth_-1] removed
  std::span<const Index> path_;
  double probability_;
};

inline double LerwEnumerator::Node::escape_without_prefix(Index x) const {
  // levels[depth_] has path[0, depth_-1] removed; the prefix here may extend
  // one further site u = path[depth_] that is committed lazily.
  if (!owner_->in_domain(x)) return 1.0;
  const std::size_t committed = path_.size() - 1;  // sites to remove
  const auto& lv = st_->levels[depth_];
  const std::size_t nr = owner_->nr_;
  if (x < nr && st_->is_removed(x)) return 0.0;
  const std::size_t rx = st_->rank(x, nr, depth_);
  if (committed == depth_) return lv.e[rx];
  const Index u = path_[depth_];
  if (x == u) return 0.0;
  const std::size_t ru = st_->rank(u, nr, depth_);
  const double piv = lv.h[ru * lv.cols + ru];
  return lv.e[rx] - lv.h[rx * lv.cols + ru] * lv.e[ru] / piv;
}

inline double LerwEnumerator::Node::green_without_prefix(Index x, Index y) const {
  if (!owner_->in_domain(x) || !owner_->in_region(y)) return 0.0;
  const std::size_t committed = path_.size() - 1;
  const auto& lv = st_->levels[depth_];
  const std::size_t nr = owner_->nr_;
  if ((x < nr && st_->is_removed(x)) || st_->is_removed(y)) return 0.0;
  const std::size_t rx = st_->rank(x, nr, depth_), ry = st_->rank(y, nr, depth_);
  if (committed == depth_) return lv.h[rx * lv.cols + ry];
  const Index u = path_[depth_];
  if (x == u || y == u) return 0.0;
  const std::size_t ru = st_->rank(u, nr, depth_);
  const double piv = lv.h[ru * lv.cols + ru];
  return lv.h[rx * lv.cols + ry] - lv.h[rx * lv.cols + ru] * lv.h[ru * lv.cols + ry] / piv;
}

template <class Enter, class Leaf>
void LerwEnumerator::run(const Point& start, Enter&& enter, Leaf&& leaf) const {
  const Index s = index_of(start);
  if (s == FiniteDomain::npos || !in_region(s)) throw std::invalid_argument("LerwEnumerator: start outside region");
  State st;
  st.levels.resize(nr_ + 1);
  st.levels[0].h = g0_;
  st.levels[0].e = e0_;
  st.levels[0].rows = nw_;
  st.levels[0].cols = nr_;
  for (std::size_t d = 1; d <= nr_; ++d) {
    st.levels[d].h.resize((nw_ - d) * (nr_ - d));
    st.levels[d].e.resize(nw_ - d);
    st.levels[d].rows = nw_ - d;
    st.levels[d].cols = nr_ - d;
  }
  st.removed.assign(words_, 0);
  st.path.reserve(nr_ + 2);
  st.path.push_back(s);
  const Node root(this, &st, 0, st.path, e0_[s]);
  if (!enter(root)) return;
  expand(st, 0, 1.0, enter, leaf);
}

template <class Enter, class Leaf>
void LerwEnumerator::expand(State& st, std::size_t depth, double weight, Enter& enter, Leaf& leaf) const {
  // path[0, depth-1] is removed in levels[depth]; u = path[depth] is the tip.
  const Index u = st.path[depth];
  Level& lv = st.levels[depth];
  const std::size_t ru = st.rank(u, nr_, depth);
  const double piv = lv.h[ru * lv.cols + ru];
  const double w = weight * piv / 6.0;
  const double eu = lv.e[ru];
  bool built = false;

  for (std::size_t d = 0; d < 6; ++d) {
    const Index v = nbr_[u][d];
    if (v < nr_ && (v == u || st.is_removed(v))) continue;
    double ev = 1.0;
    if (v < nw_) {
      const std::size_t rv = st.rank(v, nr_, depth);
      ev = lv.e[rv] - lv.h[rv * lv.cols + ru] * eu / piv;
    }
    st.path.push_back(v);
    const Node node(this, &st, depth, st.path, w * ev);
    if (v >= nr_) {
      leaf(node);
    } else if (enter(node)) {
      if (!built) {
        Level& nx = st.levels[depth + 1];
        const std::size_t cols = lv.cols;
        const double* hu = &lv.h[ru * cols];
        std::size_t r2 = 0;
        for (std::size_t r = 0; r < lv.rows; ++r) {
          if (r == ru) continue;
          const double* hr = &lv.h[r * cols];
          const double f = hr[ru] / piv;
          double* out = &nx.h[r2 * nx.cols];
          for (std::size_t c = 0; c < ru; ++c) out[c] = hr[c] - f * hu[c];
          for (std::size_t c = ru + 1; c < cols; ++c) out[c - 1] = hr[c] - f * hu[c];
          nx.e[r2] = lv.e[r] - f * eu;
          ++r2;
        }
        built = true;
      }
      st.set_removed(u, true);
      expand(st, depth + 1, w, enter, leaf);
      st.set_removed(u, false);
    }
    st.path.pop_back();
  }
}

}  // namespace lerw
