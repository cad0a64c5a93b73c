// Adding loops back to a loop-erased walk.
//
// The loops of the soup in A that pass through v, concatenated at v, have the
// law of the excursions of a walk from v that return to v before leaving A.
// Their number is geometric with success probability 1 / G_A(v, v).
#pragma once

#include <memory>
#include <vector>

#include "lerw/domain.hpp"
#include "lerw/path.hpp"
#include "lerw/rng.hpp"

namespace lerw {

/// A loop rooted at v inside the domain, possibly the trivial [v]: returning
/// excursions are kept until the first one that leaves.
Path loops_at_vertex(const Point& v, const FiniteDomain& domain, RngStream& rng);

/// l_0 + [lambda(0), lambda(1)] + l_1 + ... + l_{n-1} + [lambda(n-1), lambda(n)]
/// with l_j = loops_at_vertex(lambda(j), D \ lambda[0, j-1]). Requires
/// lambda[0, n-1] in D and lambda(n) on the outer boundary of D.
Path reconstruct_srw(const SelfAvoidingPath& lerw, const FiniteDomain& domain, RngStream& rng);

/// Reusable form of the two operations above for repeated sampling on one
/// domain.
class LoopInserter {
 public:
  explicit LoopInserter(std::shared_ptr<const FiniteDomain> domain);

  [[nodiscard]] const FiniteDomain& domain() const { return *domain_; }

  /// Appends loops at v (excluding the leading v) to `out`, inside the domain
  /// minus the sites currently marked removed. Returns the number of kept
  /// excursions.
  std::size_t append_loops(std::uint32_t v, RngStream& rng, std::vector<Point>& out);

  Path reconstruct(const SelfAvoidingPath& lerw, RngStream& rng);

 private:
  std::shared_ptr<const FiniteDomain> domain_;
  std::vector<char> removed_;
  std::vector<Point> excursion_;
};

}  // namespace lerw
