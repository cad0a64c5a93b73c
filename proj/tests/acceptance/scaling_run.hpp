// The shared Monte Carlo run behind the exponent, ratio and length criteria:
// Es(2^n) with the erased lengths of the same samples, for n in a range.
// Levels are cached in a json file keyed by seed and sample count.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "lerw/estimators.hpp"

namespace acceptance {

struct Level {
  unsigned n = 0;
  lerw::EstimatorResult es;
  lerw::LengthMoments length;
  double seconds = 0.0;
};

struct ScalingRun {
  std::uint64_t seed = 0;
  std::uint64_t samples = 0;
  std::vector<Level> levels;
  bool from_cache = false;
};

/// Runs (or loads) levels n_min..n_max. Each finished level is written to the
/// cache immediately, so an interrupted run resumes where it stopped.
ScalingRun load_or_run_scaling(const std::string& cache_path, std::uint64_t seed, std::uint64_t samples,
                               unsigned n_min, unsigned n_max);

}  // namespace acceptance
