#include "lerw/walk.hpp"

#include <cmath>

namespace lerw {

void require_packable(const Ball& ball) {
  const auto reach = static_cast<std::int64_t>(std::ceil(ball.radius())) + 2;
  const Point& c = ball.center();
  for (auto v : {c.x, c.y, c.z})
    if (v - reach <= -kPackLimit || v + reach >= kPackLimit)
      throw std::invalid_argument("ball extends beyond the packable coordinate range");
}

Path sample_srw_exit(const Point& start, const Ball& ball, RngStream& rng, std::size_t cap) {
  if (!ball.contains(start)) throw std::invalid_argument("sample_srw_exit: start must lie strictly inside the ball");
  require_packable(ball);
  std::vector<Point> pts{start};
  walk_until_exit(start, ball, rng, [&](SiteKey k) {
    if (pts.size() > cap) throw std::length_error("sample_srw_exit: walk exceeded the in-memory cap");
    pts.push_back(unpack(k));
    return true;
  });
  return Path::trusted(std::move(pts));
}

std::size_t first_exit_index(const Path& path, const Ball& ball) {
  for (std::size_t t = 0; t < path.size(); ++t)
    if (!ball.contains(path[t])) return t;
  throw NotReached("first_exit_index: path never leaves the ball");
}

std::size_t last_visit_index(const Path& path, std::size_t upto, const std::function<bool(const Point&)>& region) {
  const std::size_t end = std::min(upto + 1, path.size());
  bool found = false;
  std::size_t last = 0;
  for (std::size_t t = 0; t < end; ++t)
    if (region(path[t])) {
      last = t;
      found = true;
    }
  if (!found) throw NotFound("last_visit_index: no index satisfies the region predicate");
  return last;
}

DoobKernel::DoobKernel(std::shared_ptr<const FiniteDomain> domain, std::span<const double> h,
                       const std::function<double(const Point&)>& exterior_h, std::vector<char> stop)
    : domain_(std::move(domain)), stop_(std::move(stop)) {
  const auto n = domain_->size();
  if (h.size() != n || stop_.size() != n) throw std::invalid_argument("DoobKernel: table sizes do not match domain");
  cumulative_.resize(n);
  dead_.assign(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    std::array<double, 6> w{};
    double total = 0.0;
    for (std::size_t d = 0; d < 6; ++d) {
      const auto j = domain_->neighbor(i, d);
      w[d] = j == FiniteDomain::npos ? exterior_h(domain_->site(i) + kUnitSteps[d]) : h[j];
      if (w[d] < 0.0) throw std::invalid_argument("DoobKernel: negative weight");
      total += w[d];
    }
    if (total <= 0.0) {
      dead_[i] = 1;
      continue;
    }
    double acc = 0.0;
    for (std::size_t d = 0; d < 6; ++d) {
      acc += w[d] / total;
      cumulative_[i][d] = acc;
    }
    cumulative_[i][5] = 1.0;
  }
}

std::array<double, 6> DoobKernel::step_probabilities(const Point& from) const {
  const auto i = domain_->index_of(from);
  if (i == FiniteDomain::npos) throw std::invalid_argument("DoobKernel: site outside domain");
  std::array<double, 6> p{};
  double prev = 0.0;
  for (std::size_t d = 0; d < 6; ++d) {
    p[d] = dead_[i] ? 0.0 : cumulative_[i][d] - prev;
    prev = dead_[i] ? 0.0 : cumulative_[i][d];
  }
  return p;
}

Path DoobKernel::sample(const Point& start, RngStream& rng, std::size_t cap) const {
  auto i = domain_->index_of(start);
  if (i == FiniteDomain::npos) throw std::invalid_argument("DoobKernel: start outside domain");
  std::vector<Point> pts{start};
  if (stop_[i]) return Path::trusted(std::move(pts));
  Point cur = start;
  for (;;) {
    if (dead_[i]) throw std::invalid_argument("DoobKernel: walk reached a site with no admissible step");
    const double u = rng.uniform();
    std::size_t d = 0;
    while (d < 5 && u >= cumulative_[i][d]) ++d;
    cur = cur + kUnitSteps[d];
    pts.push_back(cur);
    if (pts.size() > cap) throw std::length_error("DoobKernel: walk exceeded the in-memory cap");
    i = domain_->neighbor(i, d);
    if (i == FiniteDomain::npos || stop_[i]) break;
  }
  return Path::trusted(std::move(pts));
}

namespace {

DoobKernel make_conditioned_kernel(const Ball& ball, const HittingTable& table) {
  if (!table.domain) throw std::invalid_argument("ConditionedWalkSampler: empty hitting table");
  std::vector<char> stop(table.domain->size(), 0);
  const auto t = table.domain->index_of(table.target);
  if (t == FiniteDomain::npos) throw std::invalid_argument("ConditionedWalkSampler: target outside the table domain");
  stop[t] = 1;
  for (const auto& p : table.domain->sites())
    if (!ball.contains(p)) throw std::invalid_argument("ConditionedWalkSampler: table domain is not inside the ball");
  return DoobKernel(table.domain, table.values, [](const Point&) { return 0.0; }, std::move(stop));
}

}  // namespace

ConditionedWalkSampler::ConditionedWalkSampler(const Ball& ball, const HittingTable& table)
    : ball_(ball), table_(table), kernel_(make_conditioned_kernel(ball, table)) {}

Path ConditionedWalkSampler::sample(const Point& start, RngStream& rng) const {
  if (!ball_.contains(start)) throw std::invalid_argument("sample_conditioned_walk: start outside the ball");
  if (!(table_.at(start) > 0.0)) throw std::invalid_argument("sample_conditioned_walk: h(start) = 0, conditioning impossible");
  return kernel_.sample(start, rng);
}

Path sample_conditioned_walk(const Point& start, const Ball& ball, const HittingTable& table, RngStream& rng) {
  return ConditionedWalkSampler(ball, table).sample(start, rng);
}

}  // namespace lerw
