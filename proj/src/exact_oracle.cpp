#include "lerw/exact_oracle.hpp"

#include <gsl/gsl_errno.h>
#include <gsl/gsl_integration.h>
#include <gsl/gsl_sf_bessel.h>

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdlib>
#include <cstring>
#include <istream>
#include <map>
#include <mutex>
#include <numeric>
#include <ostream>
#include <string>
#include <unordered_map>

namespace lerw {

std::size_t default_cap_sites() {
  if (const char* env = std::getenv("LERWLAB_CAP_SITES")) {
    char* end = nullptr;
    const unsigned long long v = std::strtoull(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<std::size_t>(v);
  }
  return kDefaultCapSites;
}

void check_cap(const FiniteDomain& domain, const OracleOptions& opts) {
  if (domain.size() > opts.cap_sites) throw CapExceeded(domain.size(), opts.cap_sites);
}

void apply_killed_operator(const FiniteDomain& domain, std::span<const double> x, std::span<double> y) {
  const std::size_t n = domain.size();
  for (std::size_t i = 0; i < n; ++i) {
    double s = 0.0;
    for (std::size_t d = 0; d < 6; ++d) {
      const auto j = domain.neighbor(i, d);
      if (j != FiniteDomain::npos) s += x[j];
    }
    y[i] = x[i] - s / 6.0;
  }
}

namespace {

double inf_norm(std::span<const double> v) {
  double m = 0.0;
  for (double a : v) m = std::max(m, std::abs(a));
  return m;
}

Eigen::MatrixXd killed_dense(const FiniteDomain& domain) {
  const auto n = static_cast<Eigen::Index>(domain.size());
  Eigen::MatrixXd a = Eigen::MatrixXd::Identity(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (std::size_t d = 0; d < 6; ++d) {
      const auto j = domain.neighbor(static_cast<std::size_t>(i), d);
      if (j != FiniteDomain::npos) a(i, j) -= 1.0 / 6.0;
    }
  return a;
}

bool use_dense(const FiniteDomain& domain, const OracleOptions& opts) {
  if (opts.solver == SolverKind::Dense) return true;
  if (opts.solver == SolverKind::Iterative) return false;
  return domain.size() <= kDenseSolveLimit;
}

void check_residual(const FiniteDomain& domain, std::span<const double> rhs, std::span<const double> x,
                    const OracleOptions& opts) {
  std::vector<double> r(domain.size());
  apply_killed_operator(domain, x, r);
  for (std::size_t i = 0; i < r.size(); ++i) r[i] -= rhs[i];
  const double res = inf_norm(r);
  if (!(res <= opts.residual_tolerance * std::max(1.0, inf_norm(rhs))))
    throw SolveFailure("killed-walk solve residual " + std::to_string(res) + " above tolerance");
}

// Columns of the solution of (I - P_D) X = B for each right-hand side, sharing
// one factorisation on the dense path.
std::vector<std::vector<double>> solve_many(const FiniteDomain& domain, const std::vector<std::vector<double>>& rhs,
                                            const OracleOptions& opts) {
  check_cap(domain, opts);
  std::vector<std::vector<double>> out(rhs.size(), std::vector<double>(domain.size(), 0.0));
  if (domain.empty()) return out;
  if (use_dense(domain, opts)) {
    const Eigen::LLT<Eigen::MatrixXd> llt(killed_dense(domain));
    if (llt.info() != Eigen::Success) throw SolveFailure("Cholesky factorisation of I - P failed");
    for (std::size_t k = 0; k < rhs.size(); ++k) {
      const Eigen::Map<const Eigen::VectorXd> b(rhs[k].data(), static_cast<Eigen::Index>(rhs[k].size()));
      Eigen::Map<Eigen::VectorXd>(out[k].data(), static_cast<Eigen::Index>(out[k].size())) = llt.solve(b);
    }
  } else {
    for (std::size_t k = 0; k < rhs.size(); ++k)
      conjugate_gradient(domain, rhs[k], out[k], opts.cg_tolerance, opts.cg_max_iterations);
  }
  for (std::size_t k = 0; k < rhs.size(); ++k) check_residual(domain, rhs[k], out[k], opts);
  return out;
}

std::vector<double> unit_vector(std::size_t n, std::size_t i) {
  std::vector<double> e(n, 0.0);
  e[i] = 1.0;
  return e;
}

// G_D[v, v] for the listed domain indices.
std::vector<double> green_block(const FiniteDomain& domain, const std::vector<std::uint32_t>& idx,
                                const OracleOptions& opts) {
  std::vector<std::vector<double>> rhs;
  rhs.reserve(idx.size());
  for (auto i : idx) rhs.push_back(unit_vector(domain.size(), i));
  const auto cols = solve_many(domain, rhs, opts);
  const std::size_t k = idx.size();
  std::vector<double> g(k * k);
  for (std::size_t a = 0; a < k; ++a)
    for (std::size_t b = 0; b < k; ++b) g[a * k + b] = cols[b][idx[a]];
  return g;
}

// Successive pivots of Gaussian elimination on a symmetric positive definite
// k x k block: pivot j is G_{D_j}(v_j, v_j) with v_0..v_{j-1} removed.
std::vector<double> schur_pivots(std::vector<double> g, std::size_t k) {
  std::vector<double> piv(k);
  for (std::size_t j = 0; j < k; ++j) {
    const double p = g[j * k + j];
    piv[j] = p;
    for (std::size_t a = j + 1; a < k; ++a) {
      const double f = g[a * k + j] / p;
      for (std::size_t b = j + 1; b < k; ++b) g[a * k + b] -= f * g[j * k + b];
    }
  }
  return piv;
}

std::vector<std::uint32_t> indices_in_domain(const std::vector<Point>& pts, const FiniteDomain& domain) {
  std::vector<std::uint32_t> idx;
  for (const auto& p : pts) {
    const auto i = domain.index_of(p);
    if (i != FiniteDomain::npos && std::find(idx.begin(), idx.end(), i) == idx.end()) idx.push_back(i);
  }
  return idx;
}

void require_lerw_shape(const SelfAvoidingPath& eta, const FiniteDomain& domain) {
  for (std::size_t j = 0; j + 1 < eta.size(); ++j)
    if (!domain.contains(eta[j])) throw std::invalid_argument("eta[0, n-1] must lie in the domain");
  if (!domain.contains(eta.back()) && !domain.in_outer_boundary(eta.back()))
    throw std::invalid_argument("eta(n) must lie in the domain or its outer boundary");
}

}  // namespace

std::size_t conjugate_gradient(const FiniteDomain& domain, std::span<const double> rhs, std::span<double> x,
                               double tolerance, std::size_t max_iterations) {
  // The diagonal of I - P_D is identically 1, so the Jacobi preconditioner is
  // the identity and z = r throughout.
  const std::size_t n = domain.size();
  std::vector<double> r(n), p(n), ap(n);
  apply_killed_operator(domain, x, ap);
  for (std::size_t i = 0; i < n; ++i) r[i] = rhs[i] - ap[i];
  const double bnorm = std::sqrt(std::inner_product(rhs.begin(), rhs.end(), rhs.begin(), 0.0));
  if (bnorm == 0.0) {
    std::fill(x.begin(), x.end(), 0.0);
    return 0;
  }
  p = r;
  double rr = std::inner_product(r.begin(), r.end(), r.begin(), 0.0);
  for (std::size_t it = 0; it < max_iterations; ++it) {
    if (std::sqrt(rr) <= tolerance * bnorm) return it;
    apply_killed_operator(domain, p, ap);
    const double alpha = rr / std::inner_product(p.begin(), p.end(), ap.begin(), 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      x[i] += alpha * p[i];
      r[i] -= alpha * ap[i];
    }
    const double rr_new = std::inner_product(r.begin(), r.end(), r.begin(), 0.0);
    const double beta = rr_new / rr;
    rr = rr_new;
    for (std::size_t i = 0; i < n; ++i) p[i] = r[i] + beta * p[i];
  }
  if (std::sqrt(rr) <= tolerance * bnorm) return max_iterations;
  throw SolveFailure("conjugate gradients did not converge in " + std::to_string(max_iterations) + " iterations");
}

std::vector<double> solve_killed(const FiniteDomain& domain, std::span<const double> rhs, const OracleOptions& opts) {
  if (rhs.size() != domain.size()) throw std::invalid_argument("solve_killed: right-hand side size mismatch");
  return solve_many(domain, {std::vector<double>(rhs.begin(), rhs.end())}, opts).front();
}

GreenTable::GreenTable(std::shared_ptr<const FiniteDomain> domain, std::vector<double> values)
    : domain_(std::move(domain)), values_(std::move(values)) {
  if (values_.size() != domain_->size() * domain_->size())
    throw std::invalid_argument("GreenTable: value count does not match domain size");
}

double GreenTable::at(const Point& x, const Point& y) const {
  const auto i = domain_->index_of(x), j = domain_->index_of(y);
  if (i == FiniteDomain::npos || j == FiniteDomain::npos) return 0.0;
  return (*this)(i, j);
}

double GreenTable::residual() const {
  const std::size_t n = size();
  double worst = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double row = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      double s = 0.0;
      for (std::size_t d = 0; d < 6; ++d) {
        const auto k = domain_->neighbor(i, d);
        if (k != FiniteDomain::npos) s += (*this)(k, j);
      }
      row += std::abs((*this)(i, j) - s / 6.0 - (i == j ? 1.0 : 0.0));
    }
    worst = std::max(worst, row);
  }
  return worst;
}

namespace {

template <class T>
void put(std::ostream& out, T v) {
  static_assert(std::endian::native == std::endian::little, "binary export assumes a little-endian host");
  out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

template <class T>
T get(std::istream& in) {
  T v{};
  in.read(reinterpret_cast<char*>(&v), sizeof v);
  if (!in) throw std::runtime_error("GreenTable::read: truncated input");
  return v;
}

}  // namespace

void GreenTable::write(std::ostream& out) const {
  out.write(kMagic, sizeof kMagic);
  put<std::uint64_t>(out, size());
  for (const auto& p : domain_->sites()) {
    put<std::int64_t>(out, p.x);
    put<std::int64_t>(out, p.y);
    put<std::int64_t>(out, p.z);
  }
  out.write(reinterpret_cast<const char*>(values_.data()), static_cast<std::streamsize>(values_.size() * sizeof(double)));
  if (!out) throw std::runtime_error("GreenTable::write: output stream failed");
}

GreenTable GreenTable::read(std::istream& in) {
  char magic[8];
  in.read(magic, sizeof magic);
  if (!in || std::memcmp(magic, kMagic, sizeof magic) != 0) throw std::runtime_error("GreenTable::read: bad magic");
  const auto n = get<std::uint64_t>(in);
  std::vector<Point> sites(n);
  for (auto& p : sites) {
    p.x = get<std::int64_t>(in);
    p.y = get<std::int64_t>(in);
    p.z = get<std::int64_t>(in);
  }
  std::vector<double> values(n * n);
  in.read(reinterpret_cast<char*>(values.data()), static_cast<std::streamsize>(values.size() * sizeof(double)));
  if (!in) throw std::runtime_error("GreenTable::read: truncated matrix");
  return GreenTable(std::make_shared<const FiniteDomain>(std::move(sites)), std::move(values));
}

GreenTable green_matrix(std::shared_ptr<const FiniteDomain> domain, const OracleOptions& opts) {
  check_cap(*domain, opts);
  const std::size_t n = domain->size();
  std::vector<double> values(n * n);
  if (use_dense(*domain, opts)) {
    const Eigen::LLT<Eigen::MatrixXd> llt(killed_dense(*domain));
    if (llt.info() != Eigen::Success) throw SolveFailure("Cholesky factorisation of I - P failed");
    const Eigen::MatrixXd g = llt.solve(Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n)));
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) values[i * n + j] = g(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
  } else {
    std::vector<double> col(n);
    for (std::size_t j = 0; j < n; ++j) {
      const auto e = unit_vector(n, j);
      std::fill(col.begin(), col.end(), 0.0);
      conjugate_gradient(*domain, e, col, opts.cg_tolerance, opts.cg_max_iterations);
      for (std::size_t i = 0; i < n; ++i) values[i * n + j] = col[i];
    }
  }
  GreenTable table(std::move(domain), std::move(values));
  const double res = table.residual();
  if (!(res < opts.residual_tolerance)) throw SolveFailure("Green's matrix residual " + std::to_string(res) + " above tolerance");
  return table;
}

GreenTable green_matrix(const FiniteDomain& domain, const OracleOptions& opts) {
  return green_matrix(std::make_shared<const FiniteDomain>(domain), opts);
}

std::vector<double> green_column(const FiniteDomain& domain, const Point& y, const OracleOptions& opts) {
  const auto j = domain.index_of(y);
  if (j == FiniteDomain::npos) return std::vector<double>(domain.size(), 0.0);
  return solve_many(domain, {unit_vector(domain.size(), j)}, opts).front();
}

double escape_exact(const SelfAvoidingPath& eta, const FiniteDomain& domain, const Point& tau,
                    const OracleOptions& opts) {
  if (!domain.contains(tau)) return 1.0;
  check_cap(domain, opts);
  // u(w) = P^w(leave D before hitting eta): harmonic on D \ eta, 1 outside D,
  // 0 on eta. Esc(tau) is its average over the first step.
  const FiniteDomain rest = domain.without(eta.points());
  std::vector<double> rhs(rest.size(), 0.0);
  for (std::size_t i = 0; i < rest.size(); ++i)
    for (const auto& q : neighbors(rest.site(i)))
      if (!domain.contains(q)) rhs[i] += 1.0 / 6.0;
  const auto u = solve_many(rest, {rhs}, opts).front();
  double esc = 0.0;
  for (const auto& w : neighbors(tau)) {
    if (!domain.contains(w)) {
      esc += 1.0;
    } else {
      const auto i = rest.index_of(w);
      if (i != FiniteDomain::npos) esc += u[i];
    }
  }
  return esc / 6.0;
}

double f_eta(const SelfAvoidingPath& eta, const FiniteDomain& domain, const OracleOptions& opts) {
  const auto idx = indices_in_domain(eta.points(), domain);
  if (idx.empty()) return 1.0;
  const auto piv = schur_pivots(green_block(domain, idx, opts), idx.size());
  double f = 1.0;
  for (double p : piv) f *= p;
  return f;
}

double f_eta_recompute(const SelfAvoidingPath& eta, const FiniteDomain& domain, const OracleOptions& opts) {
  double f = 1.0;
  std::vector<Point> removed;
  for (const auto& p : eta) {
    if (domain.contains(p)) {
      const FiniteDomain a = domain.without(removed);
      f *= green_column(a, p, opts)[a.index_of(p)];
    }
    removed.push_back(p);
  }
  return f;
}

double lerw_law_exact(const SelfAvoidingPath& eta, const FiniteDomain& domain, const OracleOptions& opts) {
  require_lerw_shape(eta, domain);
  const double esc = escape_exact(eta, domain, eta.back(), opts);
  return std::pow(6.0, -static_cast<double>(eta.length())) * f_eta(eta, domain, opts) * esc;
}

HittingTable hitting_table(std::shared_ptr<const FiniteDomain> domain, const Point& target, const OracleOptions& opts) {
  const auto t = domain->index_of(target);
  if (t == FiniteDomain::npos) throw std::invalid_argument("hitting_table: target outside the domain");
  // G(v, t) / G(t, t), by symmetry of G.
  auto g = green_column(*domain, target, opts);
  const double gtt = g[t];
  for (double& v : g) v /= gtt;
  g[t] = 1.0;
  return HittingTable{std::move(domain), target, std::move(g)};
}

double ExitLaw::at(const Point& p) const {
  const auto it = std::lower_bound(sites.begin(), sites.end(), p);
  return (it != sites.end() && *it == p) ? probabilities[static_cast<std::size_t>(it - sites.begin())] : 0.0;
}

ExitLaw srw_exit_law_exact(const FiniteDomain& domain, const Point& start, const OracleOptions& opts) {
  if (!domain.contains(start)) throw std::invalid_argument("srw_exit_law_exact: start outside the domain");
  const auto g = green_column(domain, start, opts);
  ExitLaw law;
  law.sites = domain.outer_boundary();
  law.probabilities.assign(law.sites.size(), 0.0);
  for (std::size_t k = 0; k < law.sites.size(); ++k)
    for (const auto& x : neighbors(law.sites[k])) {
      const auto i = domain.index_of(x);
      if (i != FiniteDomain::npos) law.probabilities[k] += g[i] / 6.0;
    }
  return law;
}

double loop_mass_touching(const std::vector<std::vector<Point>>& targets, const FiniteDomain& domain,
                          const OracleOptions& opts) {
  std::vector<Point> all;
  for (const auto& t : targets) all.insert(all.end(), t.begin(), t.end());
  const auto idx = indices_in_domain(all, domain);
  if (idx.empty()) return 0.0;
  double mass = 0.0;
  for (double p : schur_pivots(green_block(domain, idx, opts), idx.size())) mass += std::log(p);
  return mass;
}

double loop_term_LN(const SelfAvoidingPath& gamma1, const SelfAvoidingPath& gamma2, const FiniteDomain& domain,
                    const OracleOptions& opts) {
  const double m1 = loop_mass_touching({gamma1.points()}, domain, opts);
  const double m2 = loop_mass_touching({gamma2.points()}, domain, opts);
  const double m12 = loop_mass_touching({gamma1.points(), gamma2.points()}, domain, opts);
  return m1 + m2 - m12;
}

namespace {

struct BesselTriple {
  int a, b, c;
};

double green_integrand(double t, void* params) {
  const auto* n = static_cast<const BesselTriple*>(params);
  const double s = t / 3.0;
  return gsl_sf_bessel_In_scaled(n->a, s) * gsl_sf_bessel_In_scaled(n->b, s) * gsl_sf_bessel_In_scaled(n->c, s);
}

}  // namespace

double lattice_green_z3(const Point& x) {
  // G(x) = int_0^inf prod_i e^{-t/3} I_{x_i}(t/3) dt, the expected time at x of
  // the rate-one continuous-time walk, which equals the expected number of
  // visits of the discrete walk.
  std::array<std::int64_t, 3> c{std::abs(x.x), std::abs(x.y), std::abs(x.z)};
  std::sort(c.begin(), c.end());
  static std::mutex mu;
  static std::map<std::array<std::int64_t, 3>, double> cache;
  {
    const std::lock_guard lock(mu);
    if (const auto it = cache.find(c); it != cache.end()) return it->second;
  }
  BesselTriple n{static_cast<int>(c[0]), static_cast<int>(c[1]), static_cast<int>(c[2])};
  gsl_function f{&green_integrand, &n};
  gsl_integration_workspace* ws = gsl_integration_workspace_alloc(4000);
  gsl_error_handler_t* old = gsl_set_error_handler_off();
  double value = 0.0, err = 0.0;
  const int status = gsl_integration_qagiu(&f, 0.0, 0.0, 1e-11, 4000, ws, &value, &err);
  gsl_set_error_handler(old);
  gsl_integration_workspace_free(ws);
  if ((status != GSL_SUCCESS && status != GSL_EROUND) || !(err < 1e-8))
    throw SolveFailure("lattice Green's function quadrature failed at (" + std::to_string(c[0]) + "," +
                       std::to_string(c[1]) + "," + std::to_string(c[2]) + ")");
  const std::lock_guard lock(mu);
  cache.emplace(c, value);
  return value;
}

}  // namespace lerw
