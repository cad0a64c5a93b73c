#include "lerw/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace lerw {

namespace {

std::int64_t membership_threshold(double radius) {
  const double r2 = radius * radius;
  const double guarded = r2 - 1e-12 * std::max(1.0, r2);
  if (!(guarded < 9.0e18)) throw std::invalid_argument("Ball: radius too large for exact membership");
  return static_cast<std::int64_t>(std::ceil(guarded));
}

}  // namespace

Ball::Ball(Point center, double radius) : center_(center), radius_(radius), threshold_(0) {
  if (!(radius > 0.0) || !std::isfinite(radius)) throw std::invalid_argument("Ball: radius must be positive and finite");
  threshold_ = membership_threshold(radius);
}

std::vector<Point> Ball::sites() const {
  std::vector<Point> out;
  const auto reach = static_cast<std::int64_t>(std::ceil(radius_));
  for (std::int64_t dx = -reach; dx <= reach; ++dx)
    for (std::int64_t dy = -reach; dy <= reach; ++dy)
      for (std::int64_t dz = -reach; dz <= reach; ++dz) {
        const Point p = center_ + Point{dx, dy, dz};
        if (contains(p)) out.push_back(p);
      }
  return out;  // generated in lexicographic order
}

std::vector<Point> Ball::outer_boundary() const {
  std::vector<Point> out;
  const auto reach = static_cast<std::int64_t>(std::ceil(radius_)) + 1;
  auto member = [this](const Point& p) { return contains(p); };
  for (std::int64_t dx = -reach; dx <= reach; ++dx)
    for (std::int64_t dy = -reach; dy <= reach; ++dy)
      for (std::int64_t dz = -reach; dz <= reach; ++dz) {
        const Point p = center_ + Point{dx, dy, dz};
        if (in_outer_boundary(member, p)) out.push_back(p);
      }
  return out;
}

bool in_outer_boundary(const std::function<bool(const Point&)>& member, const Point& p) {
  if (member(p)) return false;
  for (const auto& q : neighbors(p))
    if (member(q)) return true;
  return false;
}

Point nearest_scaled_point(const std::array<double, 3>& x, unsigned n) {
  const double len2 = x[0] * x[0] + x[1] * x[1] + x[2] * x[2];
  if (!(len2 < 1.0)) throw std::invalid_argument("nearest_scaled_point: requires |x| < 1");
  if (n > 60) throw std::invalid_argument("nearest_scaled_point: scale exponent too large");
  const double scale = std::ldexp(1.0, static_cast<int>(n));
  std::array<double, 3> target{};
  std::array<std::array<std::int64_t, 2>, 3> cand{};
  for (int i = 0; i < 3; ++i) {
    target[i] = x[i] * scale;  // exact: power-of-two scaling
    const double f = std::floor(target[i]);
    cand[i] = {static_cast<std::int64_t>(f), static_cast<std::int64_t>(f) + 1};
  }
  Point best{};
  double best_d = std::numeric_limits<double>::infinity();
  // Candidates are visited in lexicographic order, so a strict comparison
  // keeps the lexicographically smallest among exact ties.
  for (auto cx : cand[0])
    for (auto cy : cand[1])
      for (auto cz : cand[2]) {
        const double dx = static_cast<double>(cx) - target[0];
        const double dy = static_cast<double>(cy) - target[1];
        const double dz = static_cast<double>(cz) - target[2];
        const double d = dx * dx + dy * dy + dz * dz;
        if (d < best_d) {
          best_d = d;
          best = {cx, cy, cz};
        }
      }
  return best;
}

}  // namespace lerw
