#include "lerw/enumeration.hpp"

#include <algorithm>
#include <unordered_map>

namespace lerw {

LerwEnumerator::LerwEnumerator(const FiniteDomain& domain, const std::vector<Point>& region,
                               const OracleOptions& opts) {
  for (const auto& p : region)
    if (!domain.contains(p)) throw std::invalid_argument("LerwEnumerator: region must lie in the domain");
  build(region, [&](const Point& p) { return domain.contains(p); });
  g0_.assign(nw_ * nr_, 0.0);
  for (std::size_t c = 0; c < nr_; ++c) {
    const auto col = green_column(domain, sites_[c], opts);
    for (std::size_t r = 0; r < nw_; ++r) g0_[r * nr_ + c] = col[domain.index_of(sites_[r])];
  }
}

LerwEnumerator::LerwEnumerator(const std::vector<Point>& region, const std::function<bool(const Point&)>& in_domain,
                               const std::function<double(const Point&, const Point&)>& green) {
  build(region, in_domain);
  g0_.assign(nw_ * nr_, 0.0);
  for (std::size_t r = 0; r < nw_; ++r)
    for (std::size_t c = 0; c < nr_; ++c) g0_[r * nr_ + c] = green(sites_[r], sites_[c]);
}

void LerwEnumerator::build(const std::vector<Point>& region, const std::function<bool(const Point&)>& in_domain) {
  std::unordered_map<Point, Index, PointHash> idx;
  for (const auto& p : region) {
    if (idx.contains(p)) throw std::invalid_argument("LerwEnumerator: duplicate region site");
    idx.emplace(p, static_cast<Index>(sites_.size()));
    sites_.push_back(p);
  }
  nr_ = sites_.size();
  std::vector<Point> inner, outer;
  for (const auto& p : region)
    for (const auto& q : neighbors(p)) {
      if (idx.contains(q)) continue;
      idx.emplace(q, 0);
      (in_domain(q) ? inner : outer).push_back(q);
    }
  for (const auto& q : inner) {
    idx[q] = static_cast<Index>(sites_.size());
    sites_.push_back(q);
  }
  nw_ = sites_.size();
  for (const auto& q : outer) {
    idx[q] = static_cast<Index>(sites_.size());
    sites_.push_back(q);
  }
  nbr_.resize(nr_);
  for (std::size_t i = 0; i < nr_; ++i)
    for (std::size_t d = 0; d < 6; ++d) nbr_[i][d] = idx.at(sites_[i] + kUnitSteps[d]);
  nbr_all_.resize(sites_.size());
  for (std::size_t i = 0; i < sites_.size(); ++i)
    for (std::size_t d = 0; d < 6; ++d) {
      const auto it = idx.find(sites_[i] + kUnitSteps[d]);
      nbr_all_[i][d] = it == idx.end() ? FiniteDomain::npos : it->second;
    }
  index_ = std::move(idx);
  e0_.assign(nw_, 1.0);
  words_ = (nr_ + 63) / 64 + 1;
}

LerwEnumerator::Index LerwEnumerator::index_of(const Point& p) const {
  const auto it = index_.find(p);
  return it == index_.end() ? FiniteDomain::npos : it->second;
}

}  // namespace lerw
