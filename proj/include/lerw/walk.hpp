// Simple random walk sampling: ball-exit stopping, hitting and last-visit
// indices, and Doob h-transformed walks.
#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <stdexcept>
#include <vector>

#include "lerw/domain.hpp"
#include "lerw/errors.hpp"
#include "lerw/lattice.hpp"
#include "lerw/path.hpp"
#include "lerw/rng.hpp"
#include "lerw/site_table.hpp"

namespace lerw {

/// Largest walk length materialised as a Path.
inline constexpr std::size_t kDefaultWalkCap = std::size_t{1} << 30;

/// Throws std::invalid_argument unless every site within distance
/// radius + 1 of the ball's centre has packable coordinates.
void require_packable(const Ball& ball);

/// Streams a simple random walk from `start` until it first leaves `ball`.
/// `visit(key)` sees every point after the start, the exit point included, and
/// may return false to stop early. Returns the number of steps taken.
template <class Visit>
std::uint64_t walk_until_exit(const Point& start, const Ball& ball, RngStream& rng, Visit&& visit) {
  const Point rel = start - ball.center();
  std::int64_t c[3] = {rel.x, rel.y, rel.z};
  std::int64_t d2 = norm2(rel);
  const std::int64_t limit = ball.threshold();
  SiteKey key = pack(start);
  std::uint64_t steps = 0;
  while (d2 < limit) {
    const std::uint32_t dir = rng.direction();
    const std::uint32_t axis = dir >> 1;
    const std::int64_t sign = 1 - 2 * static_cast<std::int64_t>(dir & 1u);
    d2 += 1 + 2 * sign * c[axis];
    c[axis] += sign;
    key += kStepKeyDelta[dir];
    ++steps;
    if (!visit(key)) break;
  }
  return steps;
}

/// S[0, T] for T the first exit time from `ball`. The start must lie inside.
/// Throws std::length_error beyond `cap` steps.
Path sample_srw_exit(const Point& start, const Ball& ball, RngStream& rng, std::size_t cap = kDefaultWalkCap);

/// Smallest t with path(t) outside the ball; NotReached if none.
std::size_t first_exit_index(const Path& path, const Ball& ball);

/// Largest t <= upto with region(path(t)); NotFound if none.
std::size_t last_visit_index(const Path& path, std::size_t upto, const std::function<bool(const Point&)>& region);

/// Precomputed Doob transform of the simple random walk on a finite domain.
///
/// From a transient site v the walk steps to neighbour w with probability
/// h(w) / sum_u h(u), which equals h(w) / (6 h(v)) wherever h is harmonic.
/// Sites outside the domain and sites flagged as stops absorb the walk.
class DoobKernel {
 public:
  DoobKernel(std::shared_ptr<const FiniteDomain> domain, std::span<const double> h,
             const std::function<double(const Point&)>& exterior_h, std::vector<char> stop);

  [[nodiscard]] const FiniteDomain& domain() const { return *domain_; }

  /// Path from `start` to its absorption point. `start` must be a domain site
  /// from which some neighbour has positive weight.
  Path sample(const Point& start, RngStream& rng, std::size_t cap = kDefaultWalkCap) const;

  /// Step probabilities out of a domain site (kUnitSteps order).
  [[nodiscard]] std::array<double, 6> step_probabilities(const Point& from) const;

 private:
  std::shared_ptr<const FiniteDomain> domain_;
  std::vector<std::array<double, 6>> cumulative_;
  std::vector<char> stop_;
  std::vector<char> dead_;
};

/// Walk from `start` conditioned to hit table.target before leaving `ball`.
class ConditionedWalkSampler {
 public:
  ConditionedWalkSampler(const Ball& ball, const HittingTable& table);
  Path sample(const Point& start, RngStream& rng) const;
  [[nodiscard]] const DoobKernel& kernel() const { return kernel_; }

 private:
  Ball ball_;
  HittingTable table_;
  DoobKernel kernel_;
};

/// One-off convenience wrapper around ConditionedWalkSampler.
Path sample_conditioned_walk(const Point& start, const Ball& ball, const HittingTable& table, RngStream& rng);

}  // namespace lerw
