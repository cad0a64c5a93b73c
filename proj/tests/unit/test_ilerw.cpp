#include <cmath>
#include <vector>

#include "doctest.h"
#include "lerw/enumeration.hpp"
#include "lerw/exact_oracle.hpp"

using namespace lerw;

TEST_CASE("LERW prefixes in growing balls approach the infinite LERW") {
  // Law of the loop-erased path up to its exit from B(2): for the walk
  // stopped on leaving B(2k), and for the transient walk on Z^3.
  const auto region = Ball(2.0).sites();
  const LerwEnumerator infinite(
      region, [](const Point&) { return true; }, [](const Point& x, const Point& y) { return lattice_green_z3(y - x); });
  std::vector<double> reference;
  reference.reserve(66'000'000);
  double total = 0.0;
  infinite.for_each_exit_path(kOrigin, [&](const LerwEnumerator::Node& node) {
    reference.push_back(node.probability());
    total += node.probability();
  });
  CHECK(total == doctest::Approx(1.0).epsilon(1e-8));

  std::vector<double> tv;
  for (double k : {2.0, 4.0, 8.0}) {
    const auto d = FiniteDomain::ball(Ball(2.0 * k));
    const LerwEnumerator en(d, region);
    std::size_t i = 0;
    double sum = 0.0;
    en.for_each_exit_path(kOrigin, [&](const LerwEnumerator::Node& node) {
      sum += std::abs(node.probability() - reference[i++]);
    });
    REQUIRE(i == reference.size());
    tv.push_back(sum / 2.0);
    MESSAGE("k = " << k << ": TV = " << tv.back() << ", k * TV = " << k * tv.back());
  }
  CHECK(tv[0] > tv[1]);
  CHECK(tv[1] > tv[2]);
}
