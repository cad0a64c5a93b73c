#include "lerw/validation.hpp"

#include <algorithm>
#include <cmath>
#include <locale>
#include <map>
#include <sstream>

#include "lerw/enumeration.hpp"
#include "lerw/estimators.hpp"
#include "lerw/exact_values.hpp"
#include "lerw/loop_erase.hpp"
#include "lerw/loop_soup.hpp"
#include "lerw/stats.hpp"
#include "lerw/walk.hpp"

namespace lerw {

namespace {

std::string fmt(double v) {
  std::ostringstream s;
  s.imbue(std::locale::classic());
  s.precision(12);
  s << v;
  return s.str();
}

Check check(std::string name, bool ok, std::string detail) { return {std::move(name), ok, std::move(detail)}; }

}  // namespace

std::vector<Check> oracle_suite(const OracleOptions& opts) {
  std::vector<Check> out;
  const FiniteDomain b2 = FiniteDomain::ball(Ball(2.0));
  const FiniteDomain b3 = FiniteDomain::ball(Ball(3.0));

  {
    const LerwEnumerator en(b2, b2.sites(), opts);
    long double sum = 0.0L;
    en.for_each_exit_path(kOrigin, [&](const LerwEnumerator::Node& n) { sum += n.probability(); });
    const double dev = std::abs(static_cast<double>(sum) - 1.0);
    out.push_back(check("lerw law normalisation on B(2)", dev < 1e-8, "|sum - 1| = " + fmt(dev)));
  }
  {
    OracleOptions dense = opts, iter = opts;
    dense.solver = SolverKind::Dense;
    iter.solver = SolverKind::Iterative;
    const auto gd = green_matrix(b2, dense), gi = green_matrix(b2, iter);
    double diff = 0.0;
    for (std::size_t k = 0; k < gd.values().size(); ++k) diff = std::max(diff, std::abs(gd.values()[k] - gi.values()[k]));
    out.push_back(check("dense and iterative Green's matrices agree on B(2)", diff < 1e-8, "max diff " + fmt(diff)));
    const auto g3 = green_matrix(b3, opts);
    double asym = 0.0;
    for (std::size_t i = 0; i < g3.size(); ++i)
      for (std::size_t j = 0; j < i; ++j) asym = std::max(asym, std::abs(g3(i, j) - g3(j, i)));
    out.push_back(check("Green's matrix symmetric on B(3)", asym < 1e-12, "max asymmetry " + fmt(asym)));
    out.push_back(check("Green's matrix residual on B(3)", g3.residual() < 1e-10, "residual " + fmt(g3.residual())));
  }
  {
    const SelfAvoidingPath eta({{0, 0, 0}, {1, 0, 0}, {1, 1, 0}, {1, 1, 1}, {2, 1, 1}});
    const double f = f_eta(eta, b3, opts), fr = f_eta_recompute(eta, b3, opts);
    const double m = loop_mass_touching({eta.points()}, b3, opts);
    out.push_back(check("F_eta by Schur complements matches recomputation", std::abs(f - fr) < 1e-10 * fr,
                        fmt(f) + " vs " + fmt(fr)));
    out.push_back(check("log F_eta equals the loop mass touching eta", std::abs(std::log(f) - m) < 1e-10,
                        fmt(std::log(f)) + " vs " + fmt(m)));
    std::vector<Point> rev(eta.points().rbegin(), eta.points().rend());
    const double mr = loop_mass_touching({rev}, b3, opts);
    out.push_back(check("loop mass independent of site order", std::abs(m - mr) < 1e-10, fmt(m) + " vs " + fmt(mr)));
    const double ln_self = loop_term_LN(eta, eta, b3, opts);
    out.push_back(check("L_N(g, g) = M(g)", std::abs(ln_self - m) < 1e-10, fmt(ln_self) + " vs " + fmt(m)));
  }
  {
    const SelfAvoidingPath eta({{0, 0, 0}, {1, 0, 0}, {2, 0, 0}});
    const double esc = escape_exact(eta, b2, {2, 0, 0}, opts);
    out.push_back(check("Esc = 1 on the outer boundary", esc == 1.0, fmt(esc)));
    const FiniteDomain single({kOrigin});
    bool uniform = true;
    for (const auto& e : kUnitSteps)
      uniform = uniform && std::abs(lerw_law_exact(SelfAvoidingPath({kOrigin, e}), single, opts) - 1.0 / 6.0) < 1e-15;
    out.push_back(check("one-site domain: each one-step path has law 1/6", uniform, ""));
  }
  {
    const auto law = srw_exit_law_exact(b2, kOrigin, opts);
    double total = 0.0;
    std::map<std::array<std::int64_t, 3>, std::vector<double>> classes;
    for (std::size_t k = 0; k < law.sites.size(); ++k) {
      total += law.probabilities[k];
      const Point& p = law.sites[k];
      std::array<std::int64_t, 3> c{std::abs(p.x), std::abs(p.y), std::abs(p.z)};
      std::sort(c.begin(), c.end());
      classes[c].push_back(law.probabilities[k]);
    }
    double spread = 0.0;
    for (const auto& [c, v] : classes) spread = std::max(spread, *std::max_element(v.begin(), v.end()) - *std::min_element(v.begin(), v.end()));
    out.push_back(check("exit law on B(2) sums to 1", std::abs(total - 1.0) < 1e-10, "sum " + fmt(total)));
    out.push_back(check("exit law on B(2) constant on symmetry classes", spread < 1e-12, "spread " + fmt(spread)));
  }
  {
    const auto es1 = exact_es(1.0, opts);
    out.push_back(check("exact Es(1) = 5/6", std::abs(es1 - 5.0 / 6.0) < 1e-14, fmt(es1)));
    const double g0 = lattice_green_z3(kOrigin);
    out.push_back(check("Z^3 Green's function at 0", std::abs(g0 - 1.516386059151978) < 1e-9, fmt(g0)));
  }
  return out;
}

std::vector<Check> statistical_suite(std::uint64_t seed, std::uint64_t samples, unsigned workers,
                                     const OracleOptions& opts) {
  std::vector<Check> out;
  RunConfig cfg{seed, 0, workers};
  auto z_check = [&](const std::string& name, double est, double se, double ref) {
    const double z = z_score(est, ref, se);
    out.push_back(check(name, z <= 3.0, "estimate " + fmt(est) + " exact " + fmt(ref) + " z " + fmt(z)));
  };
  {
    const auto r = estimate_es(1.0, samples, cfg);
    z_check("Es(1) against 5/6", r.estimate, r.std_error, 5.0 / 6.0);
  }
  {
    cfg.first_stream = level_stream_offset(1);
    const auto run = run_es(2.0, samples, cfg);
    z_check("Es(2) against the exact sum", run.es.estimate, run.es.std_error, exact_es(2.0, opts));
    const auto lm = length_moments(2.0, run.lengths, run.es.seeds);
    z_check("mean LERW length on B(2)", lm.mean, lm.std_error, exact_mean_lerw_length(2.0, opts));
  }
  {
    cfg.first_stream = level_stream_offset(2);
    const auto r = estimate_one_point_direct(1, {0.5, 0.0, 0.0}, samples, cfg);
    z_check("one-point function on B(2) at (1,0,0)", r.estimate, r.std_error, exact_one_point(2.0, {1, 0, 0}, opts));
  }
  {
    const Ball ball(2.0);
    const auto domain = FiniteDomain::ball(ball);
    const auto law = srw_exit_law_exact(domain, kOrigin, opts);
    std::vector<std::uint64_t> counts(law.sites.size(), 0);
    for (std::uint64_t i = 0; i < samples; ++i) {
      RngStream rng(seed, level_stream_offset(3) + i);
      Point last = kOrigin;
      walk_until_exit(kOrigin, ball, rng, [&](SiteKey k) {
        last = unpack(k);
        return true;
      });
      const auto it = std::lower_bound(law.sites.begin(), law.sites.end(), last);
      ++counts[static_cast<std::size_t>(it - law.sites.begin())];
    }
    const auto chi = chi_square_gof(counts, law.probabilities);
    out.push_back(check("exit point law on B(2)", chi.p_value > 0.001,
                        "chi2 " + fmt(chi.statistic) + " dof " + fmt(chi.dof) + " p " + fmt(chi.p_value)));
  }
  {
    const auto domain = std::make_shared<const FiniteDomain>(FiniteDomain::ball(Ball(2.0)));
    const double g00 = green_column(*domain, kOrigin, opts)[domain->index_of(kOrigin)];
    LoopInserter ins(domain);
    std::uint64_t some = 0;
    std::vector<Point> buf;
    for (std::uint64_t i = 0; i < samples; ++i) {
      RngStream rng(seed, level_stream_offset(4) + i);
      buf.clear();
      some += ins.append_loops(domain->index_of(kOrigin), rng, buf) > 0;
    }
    const auto r = bernoulli_result("loops", some, samples, {});
    z_check("P(at least one loop at 0 in B(2)) = 1 - 1/G(0,0)", r.estimate, r.std_error, 1.0 - 1.0 / g00);
  }
  return out;
}

std::vector<Check> compare_suite(const std::string& path_a, const std::string& path_b) {
  std::vector<Check> out;
  const auto ma = read_manifests(path_a), mb = read_manifests(path_b);
  if (ma.empty() || mb.empty()) {
    out.push_back(check("manifests present", false, "compare needs json result files with embedded manifests"));
    return out;
  }
  for (const auto* set : {&ma, &mb})
    for (const auto& m : *set)
      if (m.conventions != ma.front().conventions) {
        out.push_back(check("convention flags match", false, "refusing to compare results made under different conventions"));
        return out;
      }
  out.push_back(check("convention flags match", true, ""));
  const auto ra = read_results(path_a), rb = read_results(path_b);
  std::size_t matched = 0;
  for (const auto& a : ra)
    for (const auto& b : rb) {
      if (a.quantity != b.quantity || a.params != b.params) continue;
      ++matched;
      const double se = std::hypot(a.std_error, b.std_error);
      const double z = z_score(a.estimate, b.estimate, se);
      out.push_back(check(param_label(a), z <= 3.0, fmt(a.estimate) + " vs " + fmt(b.estimate) + " z " + fmt(z)));
    }
  if (matched == 0) out.push_back(check("matching results", false, "no result appears in both files"));
  return out;
}

}  // namespace lerw
