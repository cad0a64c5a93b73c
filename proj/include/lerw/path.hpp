// Nearest-neighbour paths and self-avoiding paths.
#pragma once

#include <cstddef>
#include <stdexcept>
#include <utility>
#include <vector>

#include "lerw/lattice.hpp"

namespace lerw {

/// [p(0), ..., p(len)] with |p(j-1) - p(j)| = 1; never empty.
class Path {
 public:
  Path() : points_{kOrigin} {}
  explicit Path(std::vector<Point> points) : points_(std::move(points)) { validate(points_); }

  /// Skips validation; for producers that construct valid paths by design.
  static Path trusted(std::vector<Point> points) {
    Path p;
    p.points_ = std::move(points);
    return p;
  }

  [[nodiscard]] const std::vector<Point>& points() const { return points_; }
  [[nodiscard]] std::size_t length() const { return points_.size() - 1; }
  [[nodiscard]] std::size_t size() const { return points_.size(); }
  [[nodiscard]] const Point& operator[](std::size_t i) const { return points_[i]; }
  [[nodiscard]] const Point& front() const { return points_.front(); }
  [[nodiscard]] const Point& back() const { return points_.back(); }
  [[nodiscard]] auto begin() const { return points_.begin(); }
  [[nodiscard]] auto end() const { return points_.end(); }

  friend bool operator==(const Path&, const Path&) = default;

  static void validate(const std::vector<Point>& pts) {
    if (pts.empty()) throw std::invalid_argument("Path: empty point sequence");
    for (std::size_t j = 1; j < pts.size(); ++j)
      if (!adjacent(pts[j - 1], pts[j])) throw std::invalid_argument("Path: consecutive points are not lattice neighbours");
  }

 private:
  std::vector<Point> points_;
};

/// A Path whose points are pairwise distinct.
class SelfAvoidingPath {
 public:
  SelfAvoidingPath() : points_{kOrigin} {}
  explicit SelfAvoidingPath(std::vector<Point> points);

  static SelfAvoidingPath trusted(std::vector<Point> points) {
    SelfAvoidingPath p;
    p.points_ = std::move(points);
    return p;
  }

  [[nodiscard]] const std::vector<Point>& points() const { return points_; }
  [[nodiscard]] std::size_t length() const { return points_.size() - 1; }
  [[nodiscard]] std::size_t size() const { return points_.size(); }
  [[nodiscard]] const Point& operator[](std::size_t i) const { return points_[i]; }
  [[nodiscard]] const Point& front() const { return points_.front(); }
  [[nodiscard]] const Point& back() const { return points_.back(); }
  [[nodiscard]] auto begin() const { return points_.begin(); }
  [[nodiscard]] auto end() const { return points_.end(); }

  [[nodiscard]] Path as_path() const { return Path::trusted(points_); }

  friend bool operator==(const SelfAvoidingPath&, const SelfAvoidingPath&) = default;
  friend auto operator<=>(const SelfAvoidingPath& a, const SelfAvoidingPath& b) { return a.points_ <=> b.points_; }

 private:
  std::vector<Point> points_;
};

bool is_self_avoiding(const std::vector<Point>& pts);

}  // namespace lerw
