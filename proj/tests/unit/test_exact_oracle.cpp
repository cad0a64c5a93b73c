#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <map>
#include <set>
#include <sstream>

#include "doctest.h"
#include "lerw/domain.hpp"
#include "lerw/enumeration.hpp"
#include "lerw/errors.hpp"
#include "lerw/exact_oracle.hpp"
#include "lerw/exact_values.hpp"
#include "lerw/loop_erase.hpp"
#include "lerw/walk.hpp"

using namespace lerw;

namespace {

const Point e1{1, 0, 0}, e2{0, 1, 0}, e3{0, 0, 1};

FiniteDomain single_site() { return FiniteDomain({kOrigin}); }

// Q = P restricted to the domain, as a dense matrix.
Eigen::MatrixXd killed_transition(const FiniteDomain& d) {
  Eigen::MatrixXd q = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(d.size()), static_cast<Eigen::Index>(d.size()));
  for (std::size_t i = 0; i < d.size(); ++i)
    for (const auto& w : neighbors(d.site(i)))
      if (const auto j = d.index_of(w); j != FiniteDomain::npos)
        q(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) += 1.0 / 6.0;
  return q;
}

// sum_{L=1}^{max_len} tr(Q^L) / L: the mass of rooted loops of length <= max_len.
std::vector<double> loop_sums(const FiniteDomain& d, std::size_t max_len) {
  const auto q = killed_transition(d);
  Eigen::MatrixXd power = Eigen::MatrixXd::Identity(q.rows(), q.cols());
  std::vector<double> out(max_len + 1, 0.0);
  double acc = 0.0;
  for (std::size_t len = 1; len <= max_len; ++len) {
    power = power * q;
    acc += power.trace() / static_cast<double>(len);
    out[len] = acc;
  }
  return out;
}

SelfAvoidingPath sap(std::vector<Point> pts) { return SelfAvoidingPath(std::move(pts)); }

}  // namespace

TEST_CASE("single-site domain") {
  const auto d = single_site();
  const auto g = green_matrix(d);
  CHECK(g(0, 0) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(f_eta(sap({kOrigin}), d) == doctest::Approx(1.0));
  for (const auto& n : neighbors(kOrigin)) {
    CHECK(lerw_law_exact(sap({kOrigin, n}), d) == doctest::Approx(1.0 / 6.0).epsilon(1e-14));
    CHECK(escape_exact(sap({kOrigin}), d, n) == 1.0);
  }
  const auto law = srw_exit_law_exact(d, kOrigin);
  REQUIRE(law.sites.size() == 6);
  for (double p : law.probabilities) CHECK(p == doctest::Approx(1.0 / 6.0).epsilon(1e-14));
  CHECK(loop_mass_touching({{kOrigin}}, d) == doctest::Approx(0.0));
}

TEST_CASE("dense and iterative Green's matrices agree on B(2)") {
  const auto d = FiniteDomain::ball(Ball(2.0));
  OracleOptions dense, cg;
  dense.solver = SolverKind::Dense;
  cg.solver = SolverKind::Iterative;
  const auto a = green_matrix(d, dense), b = green_matrix(d, cg);
  double diff = 0.0;
  for (std::size_t i = 0; i < a.values().size(); ++i) diff = std::max(diff, std::abs(a.values()[i] - b.values()[i]));
  CHECK(diff < 1e-8);
  CHECK(a.residual() < 1e-10);
  CHECK(b.residual() < 1e-10);
}

TEST_CASE("Green's matrix on B(3): symmetric, positive, diagonal at least 1") {
  const auto g = green_matrix(FiniteDomain::ball(Ball(3.0)));
  CHECK(g.residual() < 1e-10);
  for (std::size_t i = 0; i < g.size(); ++i) {
    CHECK(g(i, i) >= 1.0);
    for (std::size_t j = 0; j < g.size(); ++j) {
      REQUIRE(g(i, j) >= 0.0);
      REQUIRE(std::abs(g(i, j) - g(j, i)) < 1e-12);
    }
  }
  CHECK(g.at({5, 5, 5}, kOrigin) == 0.0);
}

TEST_CASE("Green's matrix against the Neumann series") {
  const auto d = FiniteDomain::ball(Ball(std::sqrt(2.0)));
  const auto q = killed_transition(d);
  Eigen::MatrixXd sum = Eigen::MatrixXd::Identity(q.rows(), q.cols()), power = sum;
  for (int k = 0; k < 2000; ++k) {
    power = power * q;
    sum += power;
  }
  const auto g = green_matrix(d);
  for (std::size_t i = 0; i < d.size(); ++i)
    for (std::size_t j = 0; j < d.size(); ++j)
      CHECK(g(i, j) == doctest::Approx(sum(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j))).epsilon(1e-12));
}

TEST_CASE("Green's table binary round trip") {
  const auto g = green_matrix(FiniteDomain::ball(Ball(2.0)));
  std::stringstream buf;
  g.write(buf);
  const std::string bytes = buf.str();
  CHECK(bytes.size() == 8 + 8 + 27 * 24 + 27 * 27 * 8);
  CHECK(bytes.substr(0, 8) == "LERWGRN1");
  const auto back = GreenTable::read(buf);
  CHECK(back.values() == g.values());
  CHECK(back.domain().sites() == g.domain().sites());
  std::stringstream bad("NOTGREEN........");
  CHECK_THROWS(GreenTable::read(bad));
}

TEST_CASE("site cap") {
  OracleOptions small;
  small.cap_sites = 10;
  CHECK_THROWS_AS(green_matrix(FiniteDomain::ball(Ball(2.0)), small), CapExceeded);
  try {
    check_cap(FiniteDomain::ball(Ball(2.0)), small);
  } catch (const CapExceeded& e) {
    CHECK(e.cap_sites == 10);
    CHECK(e.requested_sites == 27);
  }
  ::setenv("LERWLAB_CAP_SITES", "1234", 1);
  CHECK(default_cap_sites() == 1234);
  ::unsetenv("LERWLAB_CAP_SITES");
  CHECK(default_cap_sites() == kDefaultCapSites);
}

TEST_CASE("escape probability") {
  const auto d = FiniteDomain::ball(Ball(2.0));
  for (const auto& b : d.outer_boundary()) CHECK(escape_exact(sap({kOrigin}), d, b) == 1.0);
  const double exact = escape_exact(sap({kOrigin}), d, e1);
  CHECK(exact > 0.0);
  CHECK(exact < 1.0);
  // Monte Carlo: walks from e1 in B(2) that miss the origin after time 0.
  const Ball ball(2.0);
  const std::uint64_t n = 10'000'000;
  std::uint64_t miss = 0;
  const SiteKey origin = pack(kOrigin);
  for (std::uint64_t i = 0; i < n; ++i) {
    RngStream r(31, i);
    bool hit = false;
    walk_until_exit(e1, ball, r, [&](SiteKey k) {
      hit = k == origin;
      return !hit;
    });
    miss += !hit;
  }
  const double p = static_cast<double>(miss) / n, se = std::sqrt(p * (1 - p) / n);
  CAPTURE(p);
  CAPTURE(exact);
  CHECK(std::abs(p - exact) <= 3.0 * se);
}

TEST_CASE("F_eta: Schur complements, recomputation and loop mass agree") {
  const auto d = FiniteDomain::ball(Ball(3.0));
  for (const auto& eta : {sap({kOrigin, e1, e1 + e2}), sap({kOrigin, e3, e3 + e3}),
                          sap({kOrigin, e1, e1 + e2, e2, e2 + e2, e2 + e2 - e1})}) {
    const double f = f_eta(eta, d);
    CHECK(f == doctest::Approx(f_eta_recompute(eta, d)).epsilon(1e-12));
    CHECK(std::log(f) == doctest::Approx(loop_mass_touching({eta.points()}, d)).epsilon(1e-10));
    std::vector<Point> rev(eta.points().rbegin(), eta.points().rend());
    CHECK(std::log(f) == doctest::Approx(loop_mass_touching({rev}, d)).epsilon(1e-10));
  }
  CHECK(f_eta(sap({kOrigin}), single_site()) == 1.0);
}

TEST_CASE("loop mass of a two-site set equals log F of a path through it") {
  const auto d = FiniteDomain::ball(Ball(3.0));
  const double m = loop_mass_touching({{kOrigin, e1}}, d);
  CHECK(m == doctest::Approx(std::log(f_eta(sap({kOrigin, e1}), d))).epsilon(1e-10));
  CHECK(m == doctest::Approx(loop_mass_touching({{e1}, {kOrigin}}, d)).epsilon(1e-10));
}

TEST_CASE("loop mass equals the trace expansion of the loop measure") {
  const auto d = FiniteDomain::ball(Ball(3.0));
  const std::vector<Point> t{kOrigin, e1, e1 + e2};
  const auto full = loop_sums(d, 4000);
  const auto rest = loop_sums(d.without(t), 4000);
  CHECK(loop_mass_touching({t}, d) == doctest::Approx(full.back() - rest.back()).epsilon(1e-10));
}

TEST_CASE("loop term L_N") {
  const auto d = FiniteDomain::ball(Ball(3.0));
  const auto g1 = sap({kOrigin, e1, e1 + e2});
  CHECK(loop_term_LN(g1, g1, d) == doctest::Approx(loop_mass_touching({g1.points()}, d)).epsilon(1e-12));

  const auto far1 = sap({{2, 2, 0}, {2, 2, 1}});
  const auto far2 = sap({{-2, -2, 0}, {-2, -2, -1}});
  const double ln = loop_term_LN(far1, far2, d);
  CHECK(ln >= 0.0);
  CHECK(ln <= loop_mass_touching({far1.points(), far2.points()}, d));

  // Two adjacent sites: rooted closed walks of length <= 12 touching both,
  // by inclusion-exclusion over traces, plus the geometric tail.
  const auto a = sap({kOrigin}), b = sap({e1});
  const double exact = loop_term_LN(a, b, d);
  const std::size_t cut = 12;
  auto touching_both = [&](std::size_t len) {
    const auto full = loop_sums(d, len), na = loop_sums(d.without(std::vector<Point>{kOrigin}), len),
               nb = loop_sums(d.without(std::vector<Point>{e1}), len),
               nab = loop_sums(d.without(std::vector<Point>{kOrigin, e1}), len);
    return full.back() - na.back() - nb.back() + nab.back();
  };
  const double truncated = touching_both(cut);
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(killed_transition(d));
  const double rho = eig.eigenvalues().cwiseAbs().maxCoeff();
  const double tail = std::pow(rho, static_cast<double>(cut + 1)) / (1.0 - rho);
  MESSAGE("L_N(0, e1) on B(3): exact " << exact << ", length <= 12 sum " << truncated << ", tail bound " << tail);
  CHECK(truncated <= exact + 1e-12);
  CHECK(exact - truncated <= tail);
  CHECK(touching_both(4000) == doctest::Approx(exact).epsilon(1e-10));
}

TEST_CASE("hitting table") {
  auto d = std::make_shared<const FiniteDomain>(FiniteDomain::ball(Ball(2.0)));
  const auto h = hitting_table(d, kOrigin);
  CHECK(h.at(kOrigin) == 1.0);
  CHECK(h.at({5, 0, 0}) == 0.0);
  for (std::size_t i = 0; i < d->size(); ++i) {
    if (d->site(i) == kOrigin) continue;
    double s = 0.0;
    for (const auto& w : neighbors(d->site(i))) s += h.at(w);
    CHECK(std::abs(h.values[i] - s / 6.0) < 1e-10);
  }
}

TEST_CASE("exit law on B(2)") {
  const auto d = FiniteDomain::ball(Ball(2.0));
  const auto law = srw_exit_law_exact(d, kOrigin);
  double total = 0.0;
  std::map<std::vector<std::int64_t>, std::vector<double>> classes;
  for (std::size_t i = 0; i < law.sites.size(); ++i) {
    total += law.probabilities[i];
    std::vector<std::int64_t> c{std::abs(law.sites[i].x), std::abs(law.sites[i].y), std::abs(law.sites[i].z)};
    std::sort(c.begin(), c.end());
    classes[c].push_back(law.probabilities[i]);
  }
  CHECK(total == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(classes.size() > 1);
  for (const auto& [c, ps] : classes)
    for (double p : ps) CHECK(p == doctest::Approx(ps.front()).epsilon(1e-12));
  CHECK(law.at({7, 7, 7}) == 0.0);
}

TEST_CASE("exact law: validation and agreement with the enumerator") {
  const auto d = FiniteDomain::ball(Ball(2.0));
  CHECK_THROWS(lerw_law_exact(sap({kOrigin, e1, e1 + e1, e1 + e1 + e1}), d));
  CHECK_THROWS(lerw_law_exact(sap({e1, e1 + e1}), single_site()));

  const LerwEnumerator en(d, d.sites());
  std::size_t seen = 0;
  double total = 0.0;
  std::uint64_t leaves = 0;
  en.for_each_exit_path(kOrigin, [&](const LerwEnumerator::Node& node) {
    total += node.probability();
    if (leaves++ % 997 == 0 && seen < 2000) {
      const auto eta = SelfAvoidingPath::trusted(node.points());
      REQUIRE(node.probability() == doctest::Approx(lerw_law_exact(eta, d)).epsilon(1e-10));
      ++seen;
    }
  });
  CHECK(std::abs(total - 1.0) < 1e-8);
  CHECK(seen == 2000);
}

TEST_CASE("prefix probabilities of the enumerator match the law of partial paths") {
  const auto d = FiniteDomain::ball(Ball(3.0));
  const LerwEnumerator en(d, d.sites());
  std::size_t checked = 0;
  en.run(
      kOrigin,
      [&](const LerwEnumerator::Node& node) {
        if (node.length() % 2 == 1) {
          REQUIRE(node.probability() ==
                  doctest::Approx(lerw_law_exact(SelfAvoidingPath::trusted(node.points()), d)).epsilon(1e-10));
          ++checked;
        }
        return node.length() < 4;
      },
      [](const LerwEnumerator::Node&) {});
  // Odd lengths up to 3 inside B(3): 6 single steps plus the 6 * 5 * 5
  // three-step self-avoiding paths less the 6 straight ones ending at |p| = 3.
  CHECK(checked == 6 + 150 - 6);
}

TEST_CASE("lazy prefix queries match explicit solves") {
  const auto d = FiniteDomain::ball(Ball(std::sqrt(3.0)));
  const LerwEnumerator en(d, d.sites());
  std::size_t checked = 0;
  en.run(
      kOrigin,
      [&](const LerwEnumerator::Node& node) {
        if (node.length() == 3 && checked < 20) {
          const auto pts = node.points();
          const std::vector<Point> removed(pts.begin(), pts.end() - 1);
          const auto a = d.without(removed);
          const auto g = green_matrix(a);
          for (LerwEnumerator::Index x = 0; x < en.sites().size(); ++x) {
            const Point& px = en.site(x);
            const double esc = std::find(removed.begin(), removed.end(), px) != removed.end()
                                   ? 0.0
                                   : (d.contains(px) ? avoid_probability_exact(d, px, removed) : 1.0);
            // Off the path, missing it with S[1, T] or with S[0, T] is the same event.
            REQUIRE(node.escape_without_prefix(x) == doctest::Approx(esc).epsilon(1e-10));
            for (LerwEnumerator::Index y = 0; y < en.region_size(); ++y)
              REQUIRE(node.green_without_prefix(x, y) == doctest::Approx(g.at(px, en.site(y))).epsilon(1e-10));
          }
          ++checked;
        }
        return node.length() < 3;
      },
      [](const LerwEnumerator::Node&) {});
  CHECK(checked == 20);
}

TEST_CASE("Z^3 Green's function") {
  // Watson's integral: G(0) = 3 W with W = 0.505462019717326...
  CHECK(lattice_green_z3(kOrigin) == doctest::Approx(1.516386059151978).epsilon(1e-12));
  CHECK(lattice_green_z3(e1) == doctest::Approx(lattice_green_z3(kOrigin) - 1.0).epsilon(1e-11));
  CHECK(lattice_green_z3({0, -1, 0}) == lattice_green_z3(e1));
  const double far = lattice_green_z3({12, 0, 0});
  CHECK(far == doctest::Approx(3.0 / (2.0 * M_PI * 12.0)).epsilon(0.01));
  // Harmonic off the origin.
  const Point x{2, 1, 0};
  double s = 0.0;
  for (const auto& w : neighbors(x)) s += lattice_green_z3(w);
  CHECK(s / 6.0 == doctest::Approx(lattice_green_z3(x)).epsilon(1e-10));
}

TEST_CASE("exact values on tiny balls") {
  CHECK(exact_es(1.0) == doctest::Approx(5.0 / 6.0).epsilon(1e-14));
  CHECK(exact_mean_lerw_length(1.0) == doctest::Approx(1.0));
  CHECK(exact_one_point(2.0, e1) > 0.0);
  // Es(m, n) >= Es(n) by containment.
  CHECK(exact_es_annulus(1.0, 2.0) >= exact_es(2.0) - 1e-12);
}
