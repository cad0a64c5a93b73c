#include "lerw/path.hpp"

#include <unordered_set>

namespace lerw {

bool is_self_avoiding(const std::vector<Point>& pts) {
  std::unordered_set<Point, PointHash> seen;
  seen.reserve(pts.size() * 2);
  for (const auto& p : pts)
    if (!seen.insert(p).second) return false;
  return true;
}

SelfAvoidingPath::SelfAvoidingPath(std::vector<Point> points) : points_(std::move(points)) {
  Path::validate(points_);
  if (!is_self_avoiding(points_)) throw std::invalid_argument("SelfAvoidingPath: repeated site");
}

}  // namespace lerw
