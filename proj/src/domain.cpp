#include "lerw/domain.hpp"

#include <algorithm>
#include <stdexcept>
#include <unordered_set>

namespace lerw {

bool FiniteDomain::packable(const Point& p) {
  auto ok = [](std::int64_t v) { return v > -kPackLimit && v < kPackLimit; };
  return ok(p.x) && ok(p.y) && ok(p.z);
}

FiniteDomain::FiniteDomain(std::vector<Point> sites) : sites_(std::move(sites)) {
  if (sites_.size() >= npos) throw std::invalid_argument("FiniteDomain: too many sites");
  unsigned bits = 7;
  while ((std::size_t{1} << bits) < 2 * sites_.size() + 2) ++bits;
  index_ = SiteTable(bits + 1);
  for (std::size_t i = 0; i < sites_.size(); ++i) {
    if (!packable(sites_[i])) throw std::invalid_argument("FiniteDomain: site coordinates out of range");
    const SiteKey k = pack(sites_[i]);
    if (index_.find(k) != SiteTable::kMissing) throw std::invalid_argument("FiniteDomain: duplicate site");
    index_.assign(k, static_cast<std::uint32_t>(i));
  }
  nbr_.resize(sites_.size());
  for (std::size_t i = 0; i < sites_.size(); ++i)
    for (std::size_t d = 0; d < 6; ++d) nbr_[i][d] = index_of(sites_[i] + kUnitSteps[d]);
}

std::uint32_t FiniteDomain::index_of(const Point& p) const {
  if (sites_.empty() || !packable(p)) return npos;
  return index_.find(pack(p));
}

int FiniteDomain::exterior_degree(std::size_t i) const {
  int n = 0;
  for (auto j : nbr_[i]) n += (j == npos);
  return n;
}

bool FiniteDomain::in_outer_boundary(const Point& p) const {
  return lerw::in_outer_boundary([this](const Point& q) { return contains(q); }, p);
}

std::vector<Point> FiniteDomain::outer_boundary() const {
  std::vector<Point> out;
  std::unordered_set<Point, PointHash> seen;
  for (std::size_t i = 0; i < sites_.size(); ++i)
    for (std::size_t d = 0; d < 6; ++d)
      if (nbr_[i][d] == npos) {
        const Point q = sites_[i] + kUnitSteps[d];
        if (seen.insert(q).second) out.push_back(q);
      }
  std::sort(out.begin(), out.end());
  return out;
}

FiniteDomain FiniteDomain::without(std::span<const Point> removed) const {
  std::vector<char> drop(sites_.size(), 0);
  for (const auto& p : removed) {
    const auto i = index_of(p);
    if (i != npos) drop[i] = 1;
  }
  std::vector<Point> kept;
  kept.reserve(sites_.size());
  for (std::size_t i = 0; i < sites_.size(); ++i)
    if (!drop[i]) kept.push_back(sites_[i]);
  return FiniteDomain(std::move(kept));
}

}  // namespace lerw
