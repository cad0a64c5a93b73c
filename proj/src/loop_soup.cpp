#include "lerw/loop_soup.hpp"

#include <stdexcept>

namespace lerw {

LoopInserter::LoopInserter(std::shared_ptr<const FiniteDomain> domain)
    : domain_(std::move(domain)), removed_(domain_->size(), 0) {}

std::size_t LoopInserter::append_loops(std::uint32_t v, RngStream& rng, std::vector<Point>& out) {
  const FiniteDomain& d = *domain_;
  std::size_t kept = 0;
  for (;;) {
    excursion_.clear();
    std::uint32_t i = v;
    Point cur = d.site(v);
    for (;;) {
      const std::uint32_t dir = rng.direction();
      i = d.neighbor(i, dir);
      cur = cur + kUnitSteps[dir];
      if (i == FiniteDomain::npos || removed_[i]) return kept;
      excursion_.push_back(cur);
      if (i == v) break;
    }
    out.insert(out.end(), excursion_.begin(), excursion_.end());
    ++kept;
  }
}

Path LoopInserter::reconstruct(const SelfAvoidingPath& lerw, RngStream& rng) {
  const FiniteDomain& d = *domain_;
  const std::size_t n = lerw.length();
  if (n == 0) throw std::invalid_argument("reconstruct_srw: path has no steps");
  std::vector<std::uint32_t> idx(n);
  for (std::size_t j = 0; j < n; ++j) {
    idx[j] = d.index_of(lerw[j]);
    if (idx[j] == FiniteDomain::npos) throw std::invalid_argument("reconstruct_srw: lambda[0, n-1] must lie in the domain");
  }
  if (d.contains(lerw.back()) || !d.in_outer_boundary(lerw.back()))
    throw std::invalid_argument("reconstruct_srw: lambda(n) must lie on the outer boundary");
  std::vector<Point> out{lerw.front()};
  for (std::size_t j = 0; j < n; ++j) {
    append_loops(idx[j], rng, out);
    removed_[idx[j]] = 1;
    out.push_back(lerw[j + 1]);
  }
  for (auto i : idx) removed_[i] = 0;
  return Path::trusted(std::move(out));
}

Path loops_at_vertex(const Point& v, const FiniteDomain& domain, RngStream& rng) {
  const auto i = domain.index_of(v);
  if (i == FiniteDomain::npos) throw std::invalid_argument("loops_at_vertex: v must lie in the domain");
  LoopInserter ins(std::make_shared<const FiniteDomain>(domain));
  std::vector<Point> out{v};
  ins.append_loops(i, rng, out);
  return Path::trusted(std::move(out));
}

Path reconstruct_srw(const SelfAvoidingPath& lerw, const FiniteDomain& domain, RngStream& rng) {
  return LoopInserter(std::make_shared<const FiniteDomain>(domain)).reconstruct(lerw, rng);
}

}  // namespace lerw
