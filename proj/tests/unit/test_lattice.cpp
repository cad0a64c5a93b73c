#include <algorithm>
#include <cmath>
#include <set>

#include "doctest.h"
#include "lerw/lattice.hpp"

using namespace lerw;

TEST_CASE("neighbors in the documented order") {
  const std::array<Point, 6> expected{Point{1, 0, 0}, Point{-1, 0, 0}, Point{0, 1, 0},
                                      Point{0, -1, 0}, Point{0, 0, 1}, Point{0, 0, -1}};
  CHECK(neighbors(kOrigin) == expected);
  const Point p{2, 0, 0};
  for (const auto& q : neighbors(p)) CHECK(l1_distance(p, q) == 1);
  const Point r{-5, 7, 3};
  const auto n = neighbors(r);
  CHECK(std::set<Point>(n.begin(), n.end()).size() == 6);
}

TEST_CASE("outer boundary test") {
  auto origin_only = [](const Point& p) { return p == kOrigin; };
  CHECK(in_outer_boundary(origin_only, {1, 0, 0}));
  CHECK_FALSE(in_outer_boundary(origin_only, {1, 1, 0}));
  CHECK_FALSE(in_outer_boundary(origin_only, kOrigin));
  const Ball b2(2.0);
  CHECK(in_outer_boundary([&](const Point& p) { return b2.contains(p); }, {2, 0, 0}));
}

namespace {

// Sites with x^2 + y^2 + z^2 < r^2, by direct count.
std::vector<Point> brute_ball(double r) {
  std::vector<Point> out;
  const int m = static_cast<int>(std::ceil(r)) + 1;
  for (int x = -m; x <= m; ++x)
    for (int y = -m; y <= m; ++y)
      for (int z = -m; z <= m; ++z)
        if (static_cast<double>(x * x + y * y + z * z) < r * r - 1e-9) out.push_back({x, y, z});
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

TEST_CASE("ball membership is the strict Euclidean inequality") {
  CHECK(Ball(1.0).sites() == std::vector<Point>{kOrigin});
  CHECK(Ball(2.0).sites().size() == 27);
  CHECK(Ball(std::sqrt(5.0)).sites().size() == 33);
  CHECK(Ball(3.0).sites().size() == 93);
  for (double r : {1.0, 1.5, 2.0, std::sqrt(2.0), std::sqrt(5.0), 3.0, 4.0, 5.5, 8.0}) {
    CAPTURE(r);
    CHECK(Ball(r).sites() == brute_ball(r));
  }
  CHECK_FALSE(Ball(2.0).contains({2, 0, 0}));
  CHECK(Ball(2.0).contains({1, 1, 1}));
}

TEST_CASE("membership is monotone in the radius") {
  const std::vector<double> radii{0.5, 1.0, 1.2, 1.5, 2.0, 2.5, 3.0, 3.7};
  for (int x = -4; x <= 4; ++x)
    for (int y = -4; y <= 4; ++y)
      for (int z = -4; z <= 4; ++z)
        for (std::size_t i = 0; i + 1 < radii.size(); ++i)
          if (Ball(radii[i]).contains({x, y, z})) REQUIRE(Ball(radii[i + 1]).contains({x, y, z}));
}

TEST_CASE("outer boundary equals the set-difference definition") {
  for (double r : {1.0, 2.0, std::sqrt(5.0), 3.0, 6.0, 6.5}) {
    const Ball b(r);
    const auto sites = b.sites();
    std::set<Point> inside(sites.begin(), sites.end()), expected;
    for (const auto& p : inside)
      for (const auto& q : neighbors(p))
        if (!inside.contains(q)) expected.insert(q);
    const auto got = b.outer_boundary();
    CHECK(std::set<Point>(got.begin(), got.end()) == expected);
  }
  CHECK(Ball(1.0).outer_boundary().size() == 6);
}

TEST_CASE("off-centre balls") {
  const Ball b({5, -3, 2}, 2.0);
  CHECK(b.sites().size() == 27);
  CHECK(b.contains({6, -2, 3}));
  CHECK_FALSE(b.contains({7, -3, 2}));
}

TEST_CASE("nearest scaled point") {
  CHECK(nearest_scaled_point({0.5, 0, 0}, 4) == Point{8, 0, 0});
  CHECK(nearest_scaled_point({0.3, 0, 0}, 1) == Point{1, 0, 0});
  CHECK(nearest_scaled_point({0.25, 0.25, 0}, 1) == Point{0, 0, 0});
  CHECK(nearest_scaled_point({-0.25, 0, 0}, 1) == Point{-1, 0, 0});
  CHECK(nearest_scaled_point({0.1, -0.7, 0.33}, 5) == Point{3, -22, 11});
  CHECK_THROWS(nearest_scaled_point({1.0, 0, 0}, 3));
}

TEST_CASE("nearest scaled point minimises the distance") {
  for (int i = 0; i < 200; ++i) {
    const std::array<double, 3> x{std::sin(i * 1.3) * 0.55, std::cos(i * 0.7) * 0.55, std::sin(i * 0.31) * 0.5};
    for (unsigned n : {0u, 1u, 3u, 6u}) {
      const Point p = nearest_scaled_point(x, n);
      const double s = std::exp2(n);
      auto d2 = [&](const Point& q) {
        const double dx = q.x - s * x[0], dy = q.y - s * x[1], dz = q.z - s * x[2];
        return dx * dx + dy * dy + dz * dz;
      };
      for (int a = -1; a <= 1; ++a)
        for (int b = -1; b <= 1; ++b)
          for (int c = -1; c <= 1; ++c) REQUIRE(d2(p) <= d2(p + Point{a, b, c}) + 1e-12);
    }
  }
}
