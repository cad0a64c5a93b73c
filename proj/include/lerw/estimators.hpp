// Monte Carlo estimators: escape probabilities, the one-point function, LERW
// lengths, ratio sequences and the exponent fit.
//
// Radius convention: every estimator takes a radius r and stops walks on
// first leaving B(r); the dyadic quantities use r = 2^n. For Es(m, n) the
// erased path is cut at u = its last index (the exit point from B(n)) and
// s = the last index <= u whose point lies on the outer boundary of B(m).
// The second walk is compared from its first step on.
//
// Sample i of a run draws from stream first_stream + k*i + j for its j-th
// walk (k walks per sample), so a result depends only on the master seed, the
// first stream and the sample count, not on the worker count.
#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "lerw/exact_oracle.hpp"
#include "lerw/lattice.hpp"

namespace lerw {

inline constexpr const char* kRadiusConvention = "radius";
inline constexpr const char* kAnnulusConvention = "u=endpoint,s=last-on-outer-boundary(B(m))";
inline constexpr const char* kSecondWalkConvention = "S2[1,T]";

struct SeedManifest {
  std::uint64_t master_seed = 0;
  std::uint64_t first_stream = 0;
  std::uint64_t stream_count = 0;

  friend bool operator==(const SeedManifest&, const SeedManifest&) = default;
};

struct RunConfig {
  std::uint64_t master_seed = 0;
  std::uint64_t first_stream = 0;
  unsigned workers = 1;
};

struct EstimatorResult {
  std::string quantity;
  double estimate = 0.0;
  double std_error = 0.0;
  std::uint64_t n_samples = 0;
  std::map<std::string, double> params;
  SeedManifest seeds;

  friend bool operator==(const EstimatorResult&, const EstimatorResult&) = default;
};

/// Bernoulli estimate with stderr sqrt(p(1-p)/n).
EstimatorResult bernoulli_result(std::string quantity, std::uint64_t successes, std::uint64_t n, SeedManifest seeds);

/// Streams one Es sample pair per index; keeps the erased lengths.
struct EsRun {
  EstimatorResult es;
  std::vector<std::uint32_t> lengths;  ///< len LE(S1[0, T]) per sample, in sample order
};

EsRun run_es(double radius, std::uint64_t samples, const RunConfig& cfg);

/// Es(r) = P(LE(S1[0, T]) misses S2[1, T]). Requires r >= 1.
EstimatorResult estimate_es(double radius, std::uint64_t samples, const RunConfig& cfg);

/// Es(m, n) with radii m < n.
EstimatorResult estimate_es_annulus(double m, double n, std::uint64_t samples, const RunConfig& cfg);

/// Both indicators on the same pair of walks, for the containment property:
/// returns {Es(n) escapes, Es(m, n) escapes} per sample.
std::vector<std::array<bool, 2>> paired_es_indicators(double m, double n, std::uint64_t samples, const RunConfig& cfg);

/// a_{n,x} = P(x_n lies on LE(S[0, T_{2^n}])). Throws std::invalid_argument
/// if x_n is the origin or |x| >= 1; returns 0 if x_n lies outside B(2^n).
EstimatorResult estimate_one_point_direct(unsigned n, const std::array<double, 3>& x, std::uint64_t samples,
                                          const RunConfig& cfg);

/// G_{B(2^n)}(0, x_n) times the Monte Carlo estimate of
/// P(LE(X[0, tau_0]) misses Y[1, T]), X the walk from x_n conditioned to hit
/// the origin first and Y an independent walk from x_n.
EstimatorResult estimate_one_point_factored(unsigned n, const std::array<double, 3>& x, std::uint64_t samples,
                                            const RunConfig& cfg, const OracleOptions& opts = {});

struct LengthMoments {
  double radius = 0.0;
  std::uint64_t n_samples = 0;
  double mean = 0.0;
  double variance = 0.0;
  double std_error = 0.0;  ///< of the mean
  double median = 0.0;
  double q90 = 0.0;
  double q95 = 0.0;
  SeedManifest seeds;
};

LengthMoments length_moments(double radius, const std::vector<std::uint32_t>& lengths, SeedManifest seeds);
LengthMoments estimate_length(double radius, std::uint64_t samples, const RunConfig& cfg);

/// num / den with the delta-method stderr b * sqrt((s1/a1)^2 + (s2/a2)^2).
/// Throws std::domain_error unless den.estimate >= 5 den.std_error > 0.
EstimatorResult ratio_result(std::string quantity, const EstimatorResult& num, const EstimatorResult& den);

/// Stream offset reserved for runs at a given radius, so runs at different
/// radii never share streams: n << 40 for r = 2^n, a hashed slot above 2^46
/// otherwise.
std::uint64_t radius_stream_offset(double radius);
constexpr std::uint64_t level_stream_offset(unsigned n) { return std::uint64_t{n} << 40; }

/// b_n = Es(2^n) / Es(2^(n-1)) from independent runs.
EstimatorResult estimate_bn(unsigned n, std::uint64_t samples, const RunConfig& cfg);

struct SeriesPoint {
  double n = 0.0;
  double es = 0.0;
  double std_error = 0.0;
};

struct AlphaFit {
  double alpha = 0.0;
  double intercept = 0.0;  ///< log2 c in Es(2^n) ~ c 2^{-alpha n}
  double alpha_std_error = 0.0;  ///< after inflation
  double ci_low = 0.0;
  double ci_high = 0.0;
  double reduced_chi2 = 0.0;
  std::size_t points = 0;
};

/// Weighted least squares of log2 Es against n; slope = -alpha. The 95% CI
/// uses the regression covariance, inflated by sqrt(reduced chi^2) when that
/// exceeds 1. Needs at least 3 points with positive finite stderr.
AlphaFit fit_alpha(const std::vector<SeriesPoint>& series);

struct ScalingRow {
  unsigned n = 0;
  double radius = 0.0;
  double es = 0.0;
  double es_std_error = 0.0;
  std::optional<double> bn;
  std::optional<double> bn_std_error;
  double length_mean = 0.0;
  double length_std_error = 0.0;
  double es_normalized = 0.0;      ///< es * 2^{alpha n}
  double length_normalized = 0.0;  ///< length_mean / r^{2 - alpha}
  double alpha = 0.0;
};

/// Rows from precomputed runs, one per level; levels must be consecutive for
/// b_n to be filled.
std::vector<ScalingRow> scaling_rows(const std::vector<std::pair<unsigned, EsRun>>& runs, double alpha_hat);

std::vector<ScalingRow> scaling_table(unsigned n_min, unsigned n_max, std::uint64_t samples, double alpha_hat,
                                      const RunConfig& cfg);

}  // namespace lerw
