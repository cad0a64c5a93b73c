// Goodness-of-fit helpers shared by the validation suites and the tests.
#pragma once

#include <cstdint>
#include <vector>

namespace lerw {

struct ChiSquare {
  double statistic = 0.0;
  double dof = 0.0;
  double p_value = 1.0;
};

/// Upper tail of the chi-square distribution.
double chi_square_upper(double statistic, double dof);

/// Observed counts against expected probabilities. Bins whose expected count
/// is below `min_expected` are pooled into one extra bin (dropped if that bin
/// is still below the threshold and holds no observations).
ChiSquare chi_square_gof(const std::vector<std::uint64_t>& observed, const std::vector<double>& probabilities,
                         double min_expected = 5.0);

/// Two-sample chi-square homogeneity test on paired histograms, pooling bins
/// with combined count below `min_count` together.
ChiSquare chi_square_two_sample(const std::vector<std::uint64_t>& a, const std::vector<std::uint64_t>& b,
                                double min_count = 10.0);

/// |estimate - reference| in units of the standard error (0 if both agree
/// exactly and the error is 0).
double z_score(double estimate, double reference, double std_error);

}  // namespace lerw
