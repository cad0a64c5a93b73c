// Exact linear algebra on small finite domains: Green's matrices, escape and
// hitting probabilities, the exact LERW law and loop-measure masses.
//
// Everything here solves systems in the killed operator I - P_D, where P_D
// is the simple random walk transition matrix restricted to D. The operator
// is symmetric positive definite, so dense Cholesky and conjugate gradients
// both apply.
#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <memory>
#include <span>
#include <vector>

#include "lerw/domain.hpp"
#include "lerw/errors.hpp"
#include "lerw/lattice.hpp"
#include "lerw/path.hpp"

namespace lerw {

inline constexpr std::size_t kDefaultCapSites = 200000;
inline constexpr std::size_t kDenseSolveLimit = 2000;

/// kDefaultCapSites unless LERWLAB_CAP_SITES holds a positive integer.
std::size_t default_cap_sites();

enum class SolverKind { Auto, Dense, Iterative };

struct OracleOptions {
  std::size_t cap_sites = default_cap_sites();
  SolverKind solver = SolverKind::Auto;
  double cg_tolerance = 1e-12;
  std::size_t cg_max_iterations = 100000;
  double residual_tolerance = 1e-10;
};

/// Throws CapExceeded if the domain is larger than the cap.
void check_cap(const FiniteDomain& domain, const OracleOptions& opts);

/// y = (I - P_D) x.
void apply_killed_operator(const FiniteDomain& domain, std::span<const double> x, std::span<double> y);

/// Solves (I - P_D) x = rhs. Throws SolveFailure if the infinity-norm
/// residual exceeds opts.residual_tolerance * max(1, |rhs|_inf).
std::vector<double> solve_killed(const FiniteDomain& domain, std::span<const double> rhs,
                                 const OracleOptions& opts = {});

/// Preconditioned conjugate gradients on I - P_D with a Jacobi
/// preconditioner. Returns the iteration count; throws SolveFailure when the
/// relative residual does not reach `tolerance` within `max_iterations`.
std::size_t conjugate_gradient(const FiniteDomain& domain, std::span<const double> rhs, std::span<double> x,
                               double tolerance, std::size_t max_iterations);

/// Dense |D| x |D| Green's matrix G_D(x, y), row-major.
class GreenTable {
 public:
  static constexpr char kMagic[8] = {'L', 'E', 'R', 'W', 'G', 'R', 'N', '1'};

  GreenTable(std::shared_ptr<const FiniteDomain> domain, std::vector<double> values);

  [[nodiscard]] const FiniteDomain& domain() const { return *domain_; }
  [[nodiscard]] const std::shared_ptr<const FiniteDomain>& domain_ptr() const { return domain_; }
  [[nodiscard]] std::size_t size() const { return domain_->size(); }
  [[nodiscard]] double operator()(std::size_t i, std::size_t j) const { return values_[i * size() + j]; }
  /// G_D(x, y); zero when either point lies outside D.
  [[nodiscard]] double at(const Point& x, const Point& y) const;
  [[nodiscard]] const std::vector<double>& values() const { return values_; }

  /// max_x sum_y |((I - P_D) G - I)(x, y)|.
  [[nodiscard]] double residual() const;

  /// Binary export: magic, u64 site count, the sites as int64 triples, then
  /// the matrix as row-major float64. All little-endian.
  void write(std::ostream& out) const;
  static GreenTable read(std::istream& in);

 private:
  std::shared_ptr<const FiniteDomain> domain_;
  std::vector<double> values_;
};

/// Solves (I - P_D) G = I. Dense Cholesky up to kDenseSolveLimit sites,
/// column-by-column conjugate gradients above (or as forced by opts.solver).
GreenTable green_matrix(std::shared_ptr<const FiniteDomain> domain, const OracleOptions& opts = {});
GreenTable green_matrix(const FiniteDomain& domain, const OracleOptions& opts = {});

/// G_D(., y) indexed like domain.sites(). Zero vector if y is not in D.
std::vector<double> green_column(const FiniteDomain& domain, const Point& y, const OracleOptions& opts = {});

/// Esc_{eta,D}(tau) = P^tau(S[1, T_D] misses eta), 1 when tau is outside D.
double escape_exact(const SelfAvoidingPath& eta, const FiniteDomain& domain, const Point& tau,
                    const OracleOptions& opts = {});

/// F_eta(D) = prod_j G_{A_j}(eta_j, eta_j), A_j = D \ eta[0, j-1], over the
/// points of eta that lie in D. Built from G_D[eta, eta] by Schur
/// complements.
double f_eta(const SelfAvoidingPath& eta, const FiniteDomain& domain, const OracleOptions& opts = {});

/// Same product, with one fresh solve on each shrinking domain A_j.
double f_eta_recompute(const SelfAvoidingPath& eta, const FiniteDomain& domain, const OracleOptions& opts = {});

/// 6^-n F_eta(D) Esc_{eta,D}(eta(n)). With eta(n) outside D this is the
/// probability that the loop erasure of a walk from eta(0) stopped on
/// leaving D equals eta; with eta(n) inside D it is the probability that its
/// first n steps do. Requires eta[0, n-1] inside D and eta(n) in D or its
/// outer boundary.
double lerw_law_exact(const SelfAvoidingPath& eta, const FiniteDomain& domain, const OracleOptions& opts = {});

/// h(v) = P^v(hit target before leaving D). The target must lie in D.
HittingTable hitting_table(std::shared_ptr<const FiniteDomain> domain, const Point& target,
                           const OracleOptions& opts = {});

struct ExitLaw {
  std::vector<Point> sites;  ///< outer boundary, sorted
  std::vector<double> probabilities;

  [[nodiscard]] double at(const Point& p) const;
};

/// Harmonic measure on the outer boundary of D seen from `start` in D.
ExitLaw srw_exit_law_exact(const FiniteDomain& domain, const Point& start, const OracleOptions& opts = {});

/// Loop-measure mass of loops in D touching the union of `targets`:
/// sum_j log G_{D_j}(v_j, v_j) with D_j = D \ {v_0, ..., v_{j-1}}, where v
/// runs over the union's points in D in order of first appearance.
double loop_mass_touching(const std::vector<std::vector<Point>>& targets, const FiniteDomain& domain,
                          const OracleOptions& opts = {});

/// Mass of loops in D touching both paths: M(g1) + M(g2) - M(g1 u g2).
double loop_term_LN(const SelfAvoidingPath& gamma1, const SelfAvoidingPath& gamma2, const FiniteDomain& domain,
                    const OracleOptions& opts = {});

/// Green's function of simple random walk on all of Z^3, G(0, x).
double lattice_green_z3(const Point& x);

}  // namespace lerw
