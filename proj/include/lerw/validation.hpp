// Validation suites run by `lerwlab validate`.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "lerw/exact_oracle.hpp"
#include "lerw/report.hpp"

namespace lerw {

struct Check {
  std::string name;
  bool passed = false;
  std::string detail;
};

/// Exact-oracle cross-checks: normalisation, dual solvers, identities.
std::vector<Check> oracle_suite(const OracleOptions& opts = {});

/// Monte Carlo estimators against exact values on B(1) and B(2).
std::vector<Check> statistical_suite(std::uint64_t seed, std::uint64_t samples, unsigned workers,
                                     const OracleOptions& opts = {});

/// Agreement (3 combined standard errors) of matching results in two result
/// files. Refuses files whose manifests carry different convention flags.
std::vector<Check> compare_suite(const std::string& path_a, const std::string& path_b);

}  // namespace lerw
