// Integer lattice Z^3: points, Euclidean balls, outer boundaries and the
// dyadic scaling map x -> x_n.
#pragma once

#include <array>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <vector>

namespace lerw {

struct Point {
  std::int64_t x = 0;
  std::int64_t y = 0;
  std::int64_t z = 0;

  friend constexpr bool operator==(const Point&, const Point&) = default;
  friend constexpr auto operator<=>(const Point&, const Point&) = default;

  constexpr Point operator+(const Point& o) const { return {x + o.x, y + o.y, z + o.z}; }
  constexpr Point operator-(const Point& o) const { return {x - o.x, y - o.y, z - o.z}; }
  constexpr Point operator-() const { return {-x, -y, -z}; }
};

inline constexpr Point kOrigin{0, 0, 0};

/// Unit steps in the fixed order +x, -x, +y, -y, +z, -z.
inline constexpr std::array<Point, 6> kUnitSteps{{
    {1, 0, 0}, {-1, 0, 0}, {0, 1, 0}, {0, -1, 0}, {0, 0, 1}, {0, 0, -1}}};

constexpr std::int64_t norm2(const Point& p) { return p.x * p.x + p.y * p.y + p.z * p.z; }

constexpr std::int64_t l1_distance(const Point& a, const Point& b) {
  auto abs = [](std::int64_t v) { return v < 0 ? -v : v; };
  return abs(a.x - b.x) + abs(a.y - b.y) + abs(a.z - b.z);
}

constexpr bool adjacent(const Point& a, const Point& b) { return l1_distance(a, b) == 1; }

/// p + e for each unit step e, in the order of kUnitSteps.
constexpr std::array<Point, 6> neighbors(const Point& p) {
  std::array<Point, 6> out{};
  for (std::size_t i = 0; i < 6; ++i) out[i] = p + kUnitSteps[i];
  return out;
}

struct PointHash {
  std::size_t operator()(const Point& p) const noexcept {
    std::uint64_t h = static_cast<std::uint64_t>(p.x) * 0x9E3779B97F4A7C15ULL;
    h ^= static_cast<std::uint64_t>(p.y) + 0xC2B2AE3D27D4EB4FULL + (h << 6) + (h >> 2);
    h ^= static_cast<std::uint64_t>(p.z) + 0x165667B19E3779F9ULL + (h << 6) + (h >> 2);
    h ^= h >> 31;
    h *= 0xBF58476D1CE4E5B9ULL;
    h ^= h >> 29;
    return static_cast<std::size_t>(h);
  }
};

/// B(center, r) = { p in Z^3 : |p - center| < r }.
///
/// Membership compares the exact integer |p - c|^2 against an integer
/// threshold ceil(r^2 - eps) computed once from the double r^2, so radii whose
/// square is an integer up to rounding (2^k, sqrt(5), ...) keep the strict
/// inequality.
class Ball {
 public:
  Ball(Point center, double radius);
  explicit Ball(double radius) : Ball(kOrigin, radius) {}

  [[nodiscard]] const Point& center() const { return center_; }
  [[nodiscard]] double radius() const { return radius_; }
  /// Members satisfy |p - c|^2 < threshold().
  [[nodiscard]] std::int64_t threshold() const { return threshold_; }

  [[nodiscard]] bool contains(const Point& p) const { return norm2(p - center_) < threshold_; }

  /// All member sites, sorted lexicographically.
  [[nodiscard]] std::vector<Point> sites() const;
  /// Outer boundary of the member set, sorted lexicographically.
  [[nodiscard]] std::vector<Point> outer_boundary() const;

 private:
  Point center_;
  double radius_;
  std::int64_t threshold_;
};

/// p is in the outer boundary of A: p not in A and some neighbour of p is.
bool in_outer_boundary(const std::function<bool(const Point&)>& member, const Point& p);

/// Lattice point nearest to 2^n x; ties go to the lexicographically smallest.
/// Requires |x| < 1.
Point nearest_scaled_point(const std::array<double, 3>& x, unsigned n);

}  // namespace lerw
