// Enumerated finite subsets of Z^3 with a site -> index map and a
// precomputed neighbour table.
#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "lerw/lattice.hpp"
#include "lerw/site_table.hpp"

namespace lerw {

class FiniteDomain {
 public:
  static constexpr std::uint32_t npos = SiteTable::kMissing;

  FiniteDomain() = default;
  /// Throws std::invalid_argument on duplicate sites or coordinates beyond
  /// the packable range.
  explicit FiniteDomain(std::vector<Point> sites);

  static FiniteDomain ball(const Ball& b) { return FiniteDomain(b.sites()); }

  [[nodiscard]] std::size_t size() const { return sites_.size(); }
  [[nodiscard]] bool empty() const { return sites_.empty(); }
  [[nodiscard]] const std::vector<Point>& sites() const { return sites_; }
  [[nodiscard]] const Point& site(std::size_t i) const { return sites_[i]; }

  [[nodiscard]] std::uint32_t index_of(const Point& p) const;
  [[nodiscard]] bool contains(const Point& p) const { return index_of(p) != npos; }

  /// Index of the neighbour of site i in direction d (kUnitSteps order), or npos.
  [[nodiscard]] std::uint32_t neighbor(std::size_t i, std::size_t d) const { return nbr_[i][d]; }
  /// Number of neighbours of site i lying outside the domain.
  [[nodiscard]] int exterior_degree(std::size_t i) const;

  /// Outer boundary, sorted lexicographically.
  [[nodiscard]] std::vector<Point> outer_boundary() const;
  [[nodiscard]] bool in_outer_boundary(const Point& p) const;

  /// This domain with the given sites removed (absent sites are ignored).
  [[nodiscard]] FiniteDomain without(std::span<const Point> removed) const;

 private:
  static bool packable(const Point& p);

  std::vector<Point> sites_;
  SiteTable index_;
  std::vector<std::array<std::uint32_t, 6>> nbr_;
};

}  // namespace lerw

#include <memory>

namespace lerw {

/// h(v) = P^v(hit target before leaving domain) for every site of a domain.
struct HittingTable {
  std::shared_ptr<const FiniteDomain> domain;
  Point target;
  std::vector<double> values;  ///< indexed like domain->sites()

  [[nodiscard]] double at(const Point& p) const {
    const auto i = domain->index_of(p);
    return i == FiniteDomain::npos ? 0.0 : values[i];
  }
};

}  // namespace lerw
