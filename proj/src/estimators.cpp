#include "lerw/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <numeric>
#include <stdexcept>
#include <thread>

#include "lerw/loop_erase.hpp"
#include "lerw/walk.hpp"

namespace lerw {

namespace {

// Runs body(i, acc) for i in [0, samples) split into contiguous blocks, one
// accumulator per worker, and returns the accumulators in block order.
template <class Acc, class Make, class Body>
std::vector<Acc> fan_out(std::uint64_t samples, unsigned workers, Make make, Body body) {
  workers = std::max(1u, workers);
  if (samples < workers) workers = static_cast<unsigned>(std::max<std::uint64_t>(1, samples));
  std::vector<Acc> accs;
  accs.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) accs.push_back(make());
  auto run_block = [&](unsigned w) {
    const std::uint64_t lo = samples * w / workers, hi = samples * (w + 1) / workers;
    for (std::uint64_t i = lo; i < hi; ++i) body(i, accs[w]);
  };
  if (workers == 1) {
    run_block(0);
  } else {
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(workers);
    for (unsigned w = 0; w < workers; ++w)
      pool.emplace_back([&, w] {
        try {
          run_block(w);
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    for (auto& t : pool) t.join();
    for (auto& e : errors)
      if (e) std::rethrow_exception(e);
  }
  return accs;
}

Ball checked_ball(double radius) {
  if (!(radius >= 1.0) || !std::isfinite(radius)) throw std::invalid_argument("radius must be a finite value >= 1");
  Ball ball(radius);
  require_packable(ball);
  return ball;
}

struct EsAcc {
  LoopEraser eraser;
  std::uint64_t escapes = 0;
  std::vector<std::pair<std::uint64_t, std::uint32_t>> lengths;
};

// S2 from the origin until exit; true if some S2[1, T] point satisfies hit.
template <class Hit>
bool second_walk_hits(const Ball& ball, RngStream& rng, Hit&& hit) {
  bool found = false;
  walk_until_exit(kOrigin, ball, rng, [&](SiteKey k) {
    if (hit(k)) {
      found = true;
      return false;
    }
    return true;
  });
  return found;
}

void erase_walk(const Point& start, const Ball& ball, RngStream& rng, LoopEraser& er) {
  er.reset(start);
  walk_until_exit(start, ball, rng, [&](SiteKey k) {
    er.push(k);
    return true;
  });
}

// Last index of the erased path whose point lies on the outer boundary of
// `inner`.
std::size_t last_on_boundary(const LoopEraser& er, const Ball& inner) {
  for (std::size_t i = er.size(); i-- > 0;) {
    const Point p = unpack(er.key_at(i));
    if (!inner.contains(p) && in_outer_boundary([&](const Point& q) { return inner.contains(q); }, p)) return i;
  }
  throw NotFound("erased path never touches the outer boundary of the inner ball");
}

}  // namespace

std::uint64_t radius_stream_offset(double radius) {
  int e = 0;
  const double mant = std::frexp(radius, &e);
  if (mant == 0.5 && e >= 1 && e <= 64) return level_stream_offset(static_cast<unsigned>(e - 1));
  std::uint64_t bits = 0;
  std::memcpy(&bits, &radius, sizeof bits);
  bits ^= bits >> 33;
  bits *= 0xff51afd7ed558ccdULL;
  bits ^= bits >> 33;
  return (std::uint64_t{64} + (bits & ((std::uint64_t{1} << 23) - 1))) << 40;
}

EstimatorResult bernoulli_result(std::string quantity, std::uint64_t successes, std::uint64_t n, SeedManifest seeds) {
  EstimatorResult r;
  r.quantity = std::move(quantity);
  r.n_samples = n;
  r.seeds = seeds;
  if (n > 0) {
    const double p = static_cast<double>(successes) / static_cast<double>(n);
    r.estimate = p;
    r.std_error = std::sqrt(p * (1.0 - p) / static_cast<double>(n));
  }
  return r;
}

EsRun run_es(double radius, std::uint64_t samples, const RunConfig& cfg) {
  const Ball ball = checked_ball(radius);
  auto accs = fan_out<EsAcc>(samples, cfg.workers, [] { return EsAcc{}; }, [&](std::uint64_t i, EsAcc& acc) {
    RngStream s1(cfg.master_seed, cfg.first_stream + 2 * i);
    RngStream s2(cfg.master_seed, cfg.first_stream + 2 * i + 1);
    erase_walk(kOrigin, ball, s1, acc.eraser);
    acc.lengths.emplace_back(i, static_cast<std::uint32_t>(acc.eraser.length()));
    const bool hit = second_walk_hits(ball, s2, [&](SiteKey k) { return acc.eraser.contains(k); });
    acc.escapes += !hit;
  });
  EsRun run;
  std::uint64_t escapes = 0;
  run.lengths.resize(samples);
  for (const auto& a : accs) {
    escapes += a.escapes;
    for (const auto& [i, len] : a.lengths) run.lengths[i] = len;
  }
  run.es = bernoulli_result("es", escapes, samples, {cfg.master_seed, cfg.first_stream, 2 * samples});
  run.es.params["radius"] = radius;
  return run;
}

EstimatorResult estimate_es(double radius, std::uint64_t samples, const RunConfig& cfg) {
  return run_es(radius, samples, cfg).es;
}

std::vector<std::array<bool, 2>> paired_es_indicators(double m, double n, std::uint64_t samples, const RunConfig& cfg) {
  if (!(m >= 1.0) || !(m < n)) throw std::invalid_argument("Es(m, n) requires 1 <= m < n");
  const Ball outer = checked_ball(n);
  const Ball inner(m);
  struct Acc {
    LoopEraser eraser;
    std::vector<std::pair<std::uint64_t, std::array<bool, 2>>> out;
  };
  auto accs = fan_out<Acc>(samples, cfg.workers, [] { return Acc{}; }, [&](std::uint64_t i, Acc& acc) {
    RngStream s1(cfg.master_seed, cfg.first_stream + 2 * i);
    RngStream s2(cfg.master_seed, cfg.first_stream + 2 * i + 1);
    erase_walk(kOrigin, outer, s1, acc.eraser);
    const std::size_t s = last_on_boundary(acc.eraser, inner);
    bool hit_full = false, hit_tail = false;
    walk_until_exit(kOrigin, outer, s2, [&](SiteKey k) {
      const auto at = acc.eraser.index_of(k);
      if (at != LoopEraser::npos) {
        hit_full = true;
        if (at >= s) hit_tail = true;
      }
      return !hit_tail;
    });
    acc.out.emplace_back(i, std::array<bool, 2>{!hit_full, !hit_tail});
  });
  std::vector<std::array<bool, 2>> out(samples);
  for (const auto& a : accs)
    for (const auto& [i, v] : a.out) out[i] = v;
  return out;
}

EstimatorResult estimate_es_annulus(double m, double n, std::uint64_t samples, const RunConfig& cfg) {
  if (!(m >= 1.0) || !(m < n)) throw std::invalid_argument("Es(m, n) requires 1 <= m < n");
  const Ball outer = checked_ball(n);
  const Ball inner(m);
  struct Acc {
    LoopEraser eraser;
    std::uint64_t escapes = 0;
  };
  auto accs = fan_out<Acc>(samples, cfg.workers, [] { return Acc{}; }, [&](std::uint64_t i, Acc& acc) {
    RngStream s1(cfg.master_seed, cfg.first_stream + 2 * i);
    RngStream s2(cfg.master_seed, cfg.first_stream + 2 * i + 1);
    erase_walk(kOrigin, outer, s1, acc.eraser);
    const std::size_t s = last_on_boundary(acc.eraser, inner);
    const bool hit = second_walk_hits(outer, s2, [&](SiteKey k) {
      const auto at = acc.eraser.index_of(k);
      return at != LoopEraser::npos && at >= s;
    });
    acc.escapes += !hit;
  });
  std::uint64_t escapes = 0;
  for (const auto& a : accs) escapes += a.escapes;
  auto r = bernoulli_result("es-annulus", escapes, samples, {cfg.master_seed, cfg.first_stream, 2 * samples});
  r.params["m"] = m;
  r.params["n"] = n;
  return r;
}

namespace {

Point checked_scaled_point(unsigned n, const std::array<double, 3>& x) {
  const Point xn = nearest_scaled_point(x, n);
  if (xn == kOrigin) throw std::invalid_argument("x_n is the origin; the one-point function needs x_n != 0");
  return xn;
}

void put_point_params(EstimatorResult& r, unsigned n, const std::array<double, 3>& x, const Point& xn) {
  r.params["n"] = n;
  r.params["x1"] = x[0];
  r.params["x2"] = x[1];
  r.params["x3"] = x[2];
  r.params["xn1"] = static_cast<double>(xn.x);
  r.params["xn2"] = static_cast<double>(xn.y);
  r.params["xn3"] = static_cast<double>(xn.z);
}

}  // namespace

EstimatorResult estimate_one_point_direct(unsigned n, const std::array<double, 3>& x, std::uint64_t samples,
                                          const RunConfig& cfg) {
  const Point xn = checked_scaled_point(n, x);
  const Ball ball = checked_ball(std::ldexp(1.0, static_cast<int>(n)));
  const SeedManifest seeds{cfg.master_seed, cfg.first_stream, samples};
  if (!ball.contains(xn)) {
    auto r = bernoulli_result("one-point-direct", 0, samples, seeds);
    put_point_params(r, n, x, xn);
    r.params["outside"] = 1;
    return r;
  }
  const SiteKey target = pack(xn);
  struct Acc {
    LoopEraser eraser;
    std::uint64_t hits = 0;
  };
  auto accs = fan_out<Acc>(samples, cfg.workers, [] { return Acc{}; }, [&](std::uint64_t i, Acc& acc) {
    RngStream s(cfg.master_seed, cfg.first_stream + i);
    erase_walk(kOrigin, ball, s, acc.eraser);
    acc.hits += acc.eraser.contains(target);
  });
  std::uint64_t hits = 0;
  for (const auto& a : accs) hits += a.hits;
  auto r = bernoulli_result("one-point-direct", hits, samples, seeds);
  put_point_params(r, n, x, xn);
  return r;
}

EstimatorResult estimate_one_point_factored(unsigned n, const std::array<double, 3>& x, std::uint64_t samples,
                                            const RunConfig& cfg, const OracleOptions& opts) {
  const Point xn = checked_scaled_point(n, x);
  const Ball ball = checked_ball(std::ldexp(1.0, static_cast<int>(n)));
  if (!ball.contains(xn)) throw std::invalid_argument("x_n lies outside B(2^n)");
  auto domain = std::make_shared<const FiniteDomain>(FiniteDomain::ball(ball));
  check_cap(*domain, opts);
  auto g = green_column(*domain, kOrigin, opts);
  const double g0x = g[domain->index_of(xn)];
  const double g00 = g[domain->index_of(kOrigin)];
  for (double& v : g) v /= g00;
  const HittingTable table{domain, kOrigin, std::move(g)};
  const ConditionedWalkSampler sampler(ball, table);
  struct Acc {
    LoopEraser eraser;
    std::uint64_t escapes = 0;
  };
  auto accs = fan_out<Acc>(samples, cfg.workers, [] { return Acc{}; }, [&](std::uint64_t i, Acc& acc) {
    RngStream sx(cfg.master_seed, cfg.first_stream + 2 * i);
    RngStream sy(cfg.master_seed, cfg.first_stream + 2 * i + 1);
    const Path walk = sampler.sample(xn, sx);
    acc.eraser.reset(xn);
    for (std::size_t t = 1; t < walk.size(); ++t) acc.eraser.push(walk[t]);
    bool hit = false;
    walk_until_exit(xn, ball, sy, [&](SiteKey k) {
      hit = acc.eraser.contains(k);
      return !hit;
    });
    acc.escapes += !hit;
  });
  std::uint64_t escapes = 0;
  for (const auto& a : accs) escapes += a.escapes;
  auto r = bernoulli_result("one-point-factored", escapes, samples, {cfg.master_seed, cfg.first_stream, 2 * samples});
  r.params["green"] = g0x;
  r.params["escape"] = r.estimate;
  r.params["escape_stderr"] = r.std_error;
  r.estimate *= g0x;
  r.std_error *= g0x;
  put_point_params(r, n, x, xn);
  return r;
}

LengthMoments length_moments(double radius, const std::vector<std::uint32_t>& lengths, SeedManifest seeds) {
  LengthMoments m;
  m.radius = radius;
  m.seeds = seeds;
  m.n_samples = lengths.size();
  if (lengths.empty()) return m;
  // Integer sums keep the moments independent of how samples were split.
  unsigned __int128 s1 = 0, s2 = 0;
  for (auto v : lengths) {
    s1 += v;
    s2 += static_cast<unsigned __int128>(v) * v;
  }
  const double n = static_cast<double>(lengths.size());
  m.mean = static_cast<double>(s1) / n;
  if (lengths.size() > 1) {
    const long double var = (static_cast<long double>(s2) - static_cast<long double>(s1) * static_cast<long double>(s1) / n) /
                            (n - 1.0);
    m.variance = static_cast<double>(std::max<long double>(0.0L, var));
  }
  m.std_error = std::sqrt(m.variance / n);
  std::vector<std::uint32_t> sorted = lengths;
  std::sort(sorted.begin(), sorted.end());
  auto quantile = [&](double q) {
    const double h = (n - 1.0) * q;
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    return sorted[lo] + (h - static_cast<double>(lo)) * (static_cast<double>(sorted[hi]) - sorted[lo]);
  };
  m.median = quantile(0.5);
  m.q90 = quantile(0.9);
  m.q95 = quantile(0.95);
  return m;
}

LengthMoments estimate_length(double radius, std::uint64_t samples, const RunConfig& cfg) {
  const EsRun run = run_es(radius, samples, cfg);
  return length_moments(radius, run.lengths, run.es.seeds);
}

EstimatorResult ratio_result(std::string quantity, const EstimatorResult& num, const EstimatorResult& den) {
  if (!(den.estimate > 0.0) || !(den.estimate >= 5.0 * den.std_error))
    throw std::domain_error("ratio denominator is not resolved 5 standard errors above zero");
  EstimatorResult r;
  r.quantity = std::move(quantity);
  r.estimate = num.estimate / den.estimate;
  const double rel_num = num.estimate > 0.0 ? num.std_error / num.estimate : 0.0;
  const double rel_den = den.std_error / den.estimate;
  r.std_error = std::abs(r.estimate) * std::sqrt(rel_num * rel_num + rel_den * rel_den);
  r.n_samples = std::min(num.n_samples, den.n_samples);
  r.seeds = num.seeds;
  r.params["num_estimate"] = num.estimate;
  r.params["num_stderr"] = num.std_error;
  r.params["den_estimate"] = den.estimate;
  r.params["den_stderr"] = den.std_error;
  r.params["den_first_stream"] = static_cast<double>(den.seeds.first_stream);
  return r;
}

EstimatorResult estimate_bn(unsigned n, std::uint64_t samples, const RunConfig& cfg) {
  if (n < 1) throw std::invalid_argument("b_n needs n >= 1");
  RunConfig hi = cfg, lo = cfg;
  hi.first_stream = cfg.first_stream + level_stream_offset(n);
  lo.first_stream = cfg.first_stream + level_stream_offset(n - 1);
  const auto num = estimate_es(std::ldexp(1.0, static_cast<int>(n)), samples, hi);
  const auto den = estimate_es(std::ldexp(1.0, static_cast<int>(n) - 1), samples, lo);
  auto r = ratio_result("bn", num, den);
  r.params["n"] = n;
  return r;
}

AlphaFit fit_alpha(const std::vector<SeriesPoint>& series) {
  double s = 0, sx = 0, sy = 0, sxx = 0, sxy = 0;
  std::vector<std::array<double, 3>> pts;  // x, y, w
  for (const auto& p : series) {
    if (!(p.es > 0.0) || !(p.std_error > 0.0) || !std::isfinite(p.std_error) || !std::isfinite(p.n)) continue;
    const double y = std::log2(p.es);
    const double sigma = p.std_error / (p.es * std::log(2.0));
    pts.push_back({p.n, y, 1.0 / (sigma * sigma)});
  }
  if (pts.size() < 3) throw std::invalid_argument("fit_alpha needs at least 3 points with positive finite stderr");
  for (const auto& [x, y, w] : pts) {
    s += w;
    sx += w * x;
    sy += w * y;
    sxx += w * x * x;
    sxy += w * x * y;
  }
  const double delta = s * sxx - sx * sx;
  if (!(delta > 0.0)) throw std::invalid_argument("fit_alpha needs at least two distinct n values");
  const double slope = (s * sxy - sx * sy) / delta;
  const double intercept = (sxx * sy - sx * sxy) / delta;
  double chi2 = 0.0;
  for (const auto& [x, y, w] : pts) {
    const double r = y - intercept - slope * x;
    chi2 += w * r * r;
  }
  AlphaFit fit;
  fit.points = pts.size();
  fit.alpha = -slope;
  fit.intercept = intercept;
  fit.reduced_chi2 = chi2 / static_cast<double>(pts.size() - 2);
  fit.alpha_std_error = std::sqrt(s / delta) * std::max(1.0, std::sqrt(fit.reduced_chi2));
  fit.ci_low = fit.alpha - 1.959963984540054 * fit.alpha_std_error;
  fit.ci_high = fit.alpha + 1.959963984540054 * fit.alpha_std_error;
  return fit;
}

std::vector<ScalingRow> scaling_rows(const std::vector<std::pair<unsigned, EsRun>>& runs, double alpha_hat) {
  std::vector<ScalingRow> rows;
  for (std::size_t k = 0; k < runs.size(); ++k) {
    const auto& [n, run] = runs[k];
    ScalingRow row;
    row.n = n;
    row.radius = std::ldexp(1.0, static_cast<int>(n));
    row.es = run.es.estimate;
    row.es_std_error = run.es.std_error;
    const auto lm = length_moments(row.radius, run.lengths, run.es.seeds);
    row.length_mean = lm.mean;
    row.length_std_error = lm.std_error;
    row.alpha = alpha_hat;
    row.es_normalized = row.es * std::exp2(alpha_hat * n);
    row.length_normalized = row.length_mean / std::pow(row.radius, 2.0 - alpha_hat);
    if (k > 0 && runs[k - 1].first + 1 == n) {
      try {
        const auto b = ratio_result("bn", run.es, runs[k - 1].second.es);
        row.bn = b.estimate;
        row.bn_std_error = b.std_error;
      } catch (const std::domain_error&) {
      }
    }
    rows.push_back(row);
  }
  return rows;
}

std::vector<ScalingRow> scaling_table(unsigned n_min, unsigned n_max, std::uint64_t samples, double alpha_hat,
                                      const RunConfig& cfg) {
  std::vector<std::pair<unsigned, EsRun>> runs;
  for (unsigned n = n_min; n <= n_max; ++n) {
    RunConfig c = cfg;
    c.first_stream = cfg.first_stream + level_stream_offset(n);
    runs.emplace_back(n, run_es(std::ldexp(1.0, static_cast<int>(n)), samples, c));
  }
  return scaling_rows(runs, alpha_hat);
}

}  // namespace lerw
