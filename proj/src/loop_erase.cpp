#include "lerw/loop_erase.hpp"

#include <algorithm>
#include <stdexcept>
#include <unordered_map>

namespace lerw {

SelfAvoidingPath loop_erase_reference(const Path& path) {
  const auto& p = path.points();
  const std::size_t m = path.length();
  auto last_visit = [&](const Point& site) {
    std::size_t t = m;
    while (p[t] != site) --t;
    return t;
  };
  std::vector<Point> out;
  std::size_t s = last_visit(p[0]);
  out.push_back(p[s]);
  while (s != m) {
    s = last_visit(p[s + 1]);
    out.push_back(p[s]);
  }
  return SelfAvoidingPath::trusted(std::move(out));
}

namespace {

bool fits_packing(const Path& path) {
  auto ok = [](std::int64_t v) { return v > -kPackLimit && v < kPackLimit; };
  return std::all_of(path.begin(), path.end(), [&](const Point& q) { return ok(q.x) && ok(q.y) && ok(q.z); });
}

SelfAvoidingPath erase_generic(const Path& path) {
  std::unordered_map<Point, std::size_t, PointHash> pos;
  std::vector<Point> out;
  for (const auto& q : path) {
    auto it = pos.find(q);
    if (it != pos.end() && it->second < out.size() && out[it->second] == q) {
      out.resize(it->second + 1);
    } else {
      pos[q] = out.size();
      out.push_back(q);
    }
  }
  return SelfAvoidingPath::trusted(std::move(out));
}

}  // namespace

SelfAvoidingPath loop_erase_fast(const Path& path) {
  if (!fits_packing(path)) return erase_generic(path);
  LoopEraser eraser;
  eraser.reset(path.front());
  for (std::size_t t = 1; t < path.size(); ++t) eraser.push(path[t]);
  return eraser.path();
}

SelfAvoidingPath LoopEraser::path() const {
  std::vector<Point> pts;
  pts.reserve(size_);
  for (std::size_t i = 0; i < size_; ++i) pts.push_back(unpack(keys_[i]));
  return SelfAvoidingPath::trusted(std::move(pts));
}

Path reverse_path(const Path& path) {
  std::vector<Point> pts(path.points().rbegin(), path.points().rend());
  return Path::trusted(std::move(pts));
}

SelfAvoidingPath reverse_path(const SelfAvoidingPath& path) {
  std::vector<Point> pts(path.points().rbegin(), path.points().rend());
  return SelfAvoidingPath::trusted(std::move(pts));
}

std::size_t lerw_length(const Path& path, const Ball& ball) {
  if (path.size() == 0 || !ball.contains(path.front()))
    throw std::invalid_argument("lerw_length: path must start inside its stopping ball");
  return loop_erase_fast(path).length();
}

}  // namespace lerw
