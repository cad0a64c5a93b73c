// Exact values of the estimator targets on small balls, by summing the exact
// LERW law over every exit path.
#pragma once

#include <vector>

#include "lerw/exact_oracle.hpp"
#include "lerw/lattice.hpp"

namespace lerw {

/// P^start(S[1, T_D] misses `obstacles`); obstacles outside D count when S
/// leaves D through them.
double avoid_probability_exact(const FiniteDomain& domain, const Point& start, const std::vector<Point>& obstacles,
                               const OracleOptions& opts = {});

/// Es(r) for a ball small enough to enumerate.
double exact_es(double radius, const OracleOptions& opts = {});

/// Es(m, n) for an outer ball small enough to enumerate.
double exact_es_annulus(double m, double n, const OracleOptions& opts = {});

/// E len LE(S[0, T_r]).
double exact_mean_lerw_length(double radius, const OracleOptions& opts = {});

/// P(x lies on LE(S[0, T_r])).
double exact_one_point(double radius, const Point& x, const OracleOptions& opts = {});

}  // namespace lerw
