#include "lerw/stats.hpp"

#include <gsl/gsl_cdf.h>

#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace lerw {

double chi_square_upper(double statistic, double dof) {
  if (dof <= 0.0) return 1.0;
  return gsl_cdf_chisq_Q(statistic, dof);
}

ChiSquare chi_square_gof(const std::vector<std::uint64_t>& observed, const std::vector<double>& probabilities,
                         double min_expected) {
  if (observed.size() != probabilities.size()) throw std::invalid_argument("chi_square_gof: size mismatch");
  const double n = static_cast<double>(std::accumulate(observed.begin(), observed.end(), std::uint64_t{0}));
  ChiSquare out;
  double pooled_obs = 0.0, pooled_exp = 0.0;
  std::size_t bins = 0;
  for (std::size_t i = 0; i < observed.size(); ++i) {
    const double e = n * probabilities[i];
    const double o = static_cast<double>(observed[i]);
    if (e < min_expected) {
      pooled_obs += o;
      pooled_exp += e;
      continue;
    }
    out.statistic += (o - e) * (o - e) / e;
    ++bins;
  }
  if (pooled_exp >= min_expected || (pooled_obs > 0.0 && pooled_exp > 0.0)) {
    out.statistic += (pooled_obs - pooled_exp) * (pooled_obs - pooled_exp) / pooled_exp;
    ++bins;
  } else if (pooled_obs > 0.0) {
    out.statistic = std::numeric_limits<double>::infinity();
  }
  out.dof = bins > 0 ? static_cast<double>(bins - 1) : 0.0;
  out.p_value = chi_square_upper(out.statistic, out.dof);
  return out;
}

ChiSquare chi_square_two_sample(const std::vector<std::uint64_t>& a, const std::vector<std::uint64_t>& b,
                                double min_count) {
  if (a.size() != b.size()) throw std::invalid_argument("chi_square_two_sample: size mismatch");
  std::vector<double> ra, rb;
  double pa = 0.0, pb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double x = static_cast<double>(a[i]), y = static_cast<double>(b[i]);
    if (x + y < min_count) {
      pa += x;
      pb += y;
    } else {
      ra.push_back(x);
      rb.push_back(y);
    }
  }
  if (pa + pb > 0.0) {
    ra.push_back(pa);
    rb.push_back(pb);
  }
  const double na = std::accumulate(ra.begin(), ra.end(), 0.0), nb = std::accumulate(rb.begin(), rb.end(), 0.0);
  ChiSquare out;
  if (na == 0.0 || nb == 0.0) return out;
  const double ka = std::sqrt(nb / na), kb = std::sqrt(na / nb);
  for (std::size_t i = 0; i < ra.size(); ++i) {
    const double d = ka * ra[i] - kb * rb[i];
    out.statistic += d * d / (ra[i] + rb[i]);
  }
  out.dof = static_cast<double>(ra.size()) - 1.0;
  out.p_value = chi_square_upper(out.statistic, out.dof);
  return out;
}

double z_score(double estimate, double reference, double std_error) {
  const double d = std::abs(estimate - reference);
  if (std_error > 0.0) return d / std_error;
  return d == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
}

}  // namespace lerw
