#include <algorithm>
#include <set>
#include <vector>

#include "doctest.h"
#include "lerw/rng.hpp"
#include "lerw/stats.hpp"

using namespace lerw;

TEST_CASE("philox4x32-10 known-answer vectors") {
  CHECK(philox4x32_10({0, 0, 0, 0}, {0, 0}) == Philox4x32Counter{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8});
  CHECK(philox4x32_10({0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, {0xffffffff, 0xffffffff}) ==
        Philox4x32Counter{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd});
  CHECK(philox4x32_10({0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, {0xa4093822, 0x299f31d0}) ==
        Philox4x32Counter{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1});
}

TEST_CASE("a stream is a pure function of seed and index") {
  RngStream a(42, 7), b(42, 7);
  for (int i = 0; i < 10000; ++i) REQUIRE(a.next_u32() == b.next_u32());
  RngStream c(42, 8), d(43, 7);
  RngStream e(42, 7);
  int same_c = 0, same_d = 0;
  for (int i = 0; i < 1000; ++i) {
    const auto v = e.next_u32();
    same_c += v == c.next_u32();
    same_d += v == d.next_u32();
  }
  CHECK(same_c < 3);
  CHECK(same_d < 3);
}

TEST_CASE("uniform lies in [0, 1) and below(n) stays in range") {
  RngStream r(1, 1);
  for (int i = 0; i < 100000; ++i) {
    const double u = r.uniform();
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
    REQUIRE(r.below(7) < 7u);
  }
}

TEST_CASE("direction and below are uniform by chi-square") {
  RngStream r(3, 0);
  std::vector<std::uint64_t> dir(6, 0), mod(7, 0), pairs(36, 0);
  for (int i = 0; i < 600000; ++i) {
    const auto a = r.direction(), b = r.direction();
    ++dir[a];
    ++dir[b];
    ++pairs[6 * a + b];
    ++mod[r.below(7)];
  }
  CHECK(chi_square_gof(dir, std::vector<double>(6, 1.0 / 6.0)).p_value > 1e-3);
  CHECK(chi_square_gof(pairs, std::vector<double>(36, 1.0 / 36.0)).p_value > 1e-3);
  CHECK(chi_square_gof(mod, std::vector<double>(7, 1.0 / 7.0)).p_value > 1e-3);
}

TEST_CASE("consecutive streams are uncorrelated") {
  // First words of streams 0..n-1 under one seed, bucketed.
  std::vector<std::uint64_t> buckets(16, 0);
  for (std::uint64_t s = 0; s < 160000; ++s) {
    RngStream r(9, s);
    ++buckets[r.next_u32() >> 28];
  }
  CHECK(chi_square_gof(buckets, std::vector<double>(16, 1.0 / 16.0)).p_value > 1e-3);
}
