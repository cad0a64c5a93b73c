#include "lerw/exact_values.hpp"

#include <algorithm>
#include <unordered_map>

#include "lerw/enumeration.hpp"

namespace lerw {

double avoid_probability_exact(const FiniteDomain& domain, const Point& start, const std::vector<Point>& obstacles,
                               const OracleOptions& opts) {
  const FiniteDomain rest = domain.without(obstacles);
  auto blocked = [&](const Point& p) { return std::find(obstacles.begin(), obstacles.end(), p) != obstacles.end(); };
  // u(w) = P^w(leave D through a non-obstacle site before touching one).
  std::vector<double> rhs(rest.size(), 0.0);
  for (std::size_t i = 0; i < rest.size(); ++i)
    for (const auto& q : neighbors(rest.site(i)))
      if (!domain.contains(q) && !blocked(q)) rhs[i] += 1.0 / 6.0;
  const auto u = rest.empty() ? std::vector<double>{} : solve_killed(rest, rhs, opts);
  double p = 0.0;
  for (const auto& w : neighbors(start)) {
    if (blocked(w)) continue;
    if (!domain.contains(w)) {
      p += 1.0;
    } else {
      p += u[rest.index_of(w)];
    }
  }
  return p / 6.0;
}

namespace {

LerwEnumerator ball_enumerator(double radius, FiniteDomain& domain, const OracleOptions& opts) {
  domain = FiniteDomain::ball(Ball(radius));
  check_cap(domain, opts);
  return LerwEnumerator(domain, domain.sites(), opts);
}

}  // namespace

double exact_es(double radius, const OracleOptions& opts) {
  FiniteDomain domain;
  const LerwEnumerator en = ball_enumerator(radius, domain, opts);
  using Index = LerwEnumerator::Index;
  const Index origin = en.index_of(kOrigin);
  long double total = 0.0L;
  en.for_each_exit_path(kOrigin, [&](const LerwEnumerator::Node& node) {
    // S2 escapes unless it steps onto the path, including leaving D at the
    // path's own exit point.
    const Index tau = node.tip();
    double q = 0.0;
    for (std::size_t d = 0; d < 6; ++d) {
      const Index w = en.neighbor(origin, d);
      if (!en.in_domain(w)) {
        q += (w != tau) ? 1.0 : 0.0;
        continue;
      }
      double v = node.escape_without_prefix(w);
      if (v == 0.0) continue;
      double through_tau = 0.0;
      for (std::size_t k = 0; k < 6; ++k) {
        const Index x = en.neighbor(tau, k);
        if (x != FiniteDomain::npos && en.in_region(x)) through_tau += node.green_without_prefix(w, x);
      }
      q += v - through_tau / 6.0;
    }
    total += static_cast<long double>(node.probability()) * (q / 6.0);
  });
  return static_cast<double>(total);
}

double exact_es_annulus(double m, double n, const OracleOptions& opts) {
  if (!(m >= 1.0) || !(m < n)) throw std::invalid_argument("Es(m, n) requires 1 <= m < n");
  FiniteDomain domain;
  const LerwEnumerator en = ball_enumerator(n, domain, opts);
  const Ball inner(m);
  using Index = LerwEnumerator::Index;
  std::vector<char> on_inner_boundary(en.sites().size(), 0);
  for (Index i = 0; i < en.sites().size(); ++i) {
    const Point& p = en.site(i);
    on_inner_boundary[i] = !inner.contains(p) && in_outer_boundary([&](const Point& q) { return inner.contains(q); }, p);
  }
  if (en.region_size() + 20 > 64 || en.sites().size() >= (1u << 14)) throw std::invalid_argument("exact_es_annulus: ball too large for the bitmask key");
  // Group exit paths by the site set of their tail eta[s, n].
  std::unordered_map<std::uint64_t, long double> mass;
  en.for_each_exit_path(kOrigin, [&](const LerwEnumerator::Node& node) {
    const auto path = node.path();
    std::size_t s = path.size() - 1;
    while (!on_inner_boundary[path[s]]) --s;
    std::uint64_t key = static_cast<std::uint64_t>(path.back()) << 6;
    for (std::size_t j = s; j + 1 < path.size(); ++j) key |= std::uint64_t{1} << (path[j] + 20);
    mass[key] += node.probability();
  });
  long double total = 0.0L;
  for (const auto& [key, p] : mass) {
    std::vector<Point> tail{en.site(static_cast<Index>((key >> 6) & 0x3FFF))};
    for (Index i = 0; i < en.region_size(); ++i)
      if ((key >> (i + 20)) & 1u) tail.push_back(en.site(i));
    total += p * static_cast<long double>(avoid_probability_exact(domain, kOrigin, tail, opts));
  }
  return static_cast<double>(total);
}

double exact_mean_lerw_length(double radius, const OracleOptions& opts) {
  FiniteDomain domain;
  const LerwEnumerator en = ball_enumerator(radius, domain, opts);
  long double total = 0.0L;
  en.for_each_exit_path(kOrigin, [&](const LerwEnumerator::Node& node) {
    total += static_cast<long double>(node.probability()) * static_cast<long double>(node.length());
  });
  return static_cast<double>(total);
}

double exact_one_point(double radius, const Point& x, const OracleOptions& opts) {
  FiniteDomain domain;
  const LerwEnumerator en = ball_enumerator(radius, domain, opts);
  const auto target = en.index_of(x);
  if (target == FiniteDomain::npos) return 0.0;
  long double total = 0.0L;
  en.for_each_exit_path(kOrigin, [&](const LerwEnumerator::Node& node) {
    const auto path = node.path();
    if (std::find(path.begin(), path.end(), target) != path.end()) total += node.probability();
  });
  return static_cast<double>(total);
}

}  // namespace lerw
