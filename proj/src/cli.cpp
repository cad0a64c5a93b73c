#include "lerw/cli.hpp"

#include <unistd.h>

#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>

#include "CLI11.hpp"
#include "lerw/errors.hpp"
#include "lerw/estimators.hpp"
#include "lerw/report.hpp"
#include "lerw/validation.hpp"

namespace lerw {

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

std::vector<std::pair<std::string, std::string>> read_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open config file '" + path + "'");
  std::vector<std::pair<std::string, std::string>> out;
  std::string line;
  for (int lineno = 1; std::getline(in, line); ++lineno) {
    const std::string t = trim(line.substr(0, line.find('#')));
    if (t.empty()) continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) throw UsageError(path + ":" + std::to_string(lineno) + ": expected key = value");
    std::string key = trim(t.substr(0, eq)), value = trim(t.substr(eq + 1));
    if (value.size() >= 2 && value.front() == '"' && value.back() == '"') value = value.substr(1, value.size() - 2);
    if (key.rfind("--", 0) == 0) key = key.substr(2);
    out.emplace_back(key, value);
  }
  return out;
}

std::vector<std::string> merge_config(const std::vector<std::string>& args) {
  std::string config;
  std::set<std::string> given;
  for (std::size_t i = 0; i < args.size(); ++i) {
    const std::string& a = args[i];
    if (a.rfind("--", 0) != 0) continue;
    const auto eq = a.find('=');
    const std::string name = a.substr(2, eq == std::string::npos ? std::string::npos : eq - 2);
    given.insert(name);
    if (name == "config") {
      if (eq != std::string::npos)
        config = a.substr(eq + 1);
      else if (i + 1 < args.size())
        config = args[i + 1];
    }
  }
  std::vector<std::string> out = args;
  if (config.empty()) return out;
  for (const auto& [key, value] : read_config(config)) {
    if (given.contains(key)) continue;
    // Repeated keys (e.g. several `in` entries) all pass through.
    out.push_back("--" + key);
    out.push_back(value);
  }
  return out;
}

std::vector<double> parse_exponents(const std::string& text) {
  const auto colon = text.find(':');
  auto num = [&](const std::string& s) {
    try {
      std::size_t used = 0;
      const double v = std::stod(s, &used);
      if (used != s.size() || !std::isfinite(v)) throw std::invalid_argument(s);
      return v;
    } catch (const std::exception&) {
      throw UsageError("malformed exponent '" + s + "'");
    }
  };
  if (colon == std::string::npos) return {num(trim(text))};
  const double lo = num(trim(text.substr(0, colon))), hi = num(trim(text.substr(colon + 1)));
  if (lo != std::floor(lo) || hi != std::floor(hi) || lo > hi) throw UsageError("range '" + text + "' must be integer a:b with a <= b");
  std::vector<double> out;
  for (double v = lo; v <= hi; v += 1.0) out.push_back(v);
  return out;
}

std::array<double, 3> parse_point(const std::string& text) {
  std::array<double, 3> x{};
  std::stringstream ss(text);
  std::string part;
  std::size_t k = 0;
  while (std::getline(ss, part, ',')) {
    if (k == 3) throw UsageError("--x needs exactly three comma-separated values");
    try {
      std::size_t used = 0;
      const std::string t = trim(part);
      x[k] = std::stod(t, &used);
      if (used != t.size()) throw std::invalid_argument(t);
    } catch (const std::exception&) {
      throw UsageError("malformed --x component '" + part + "'");
    }
    ++k;
  }
  if (k != 3) throw UsageError("--x needs exactly three comma-separated values");
  return x;
}

namespace {

struct Common {
  std::string radius_exp;
  double radius = 0.0;
  std::string m_exp, n_exp;
  std::string x;
  std::uint64_t samples = 100000;
  std::uint64_t seed = 0;
  unsigned workers = 1;
  std::string format = "csv";
  std::string out;
  std::string config;
  std::uint64_t cap_sites = 0;
  std::string method = "direct";
  std::string suite = "oracle";
  std::vector<std::string> in;
  double alpha = std::numeric_limits<double>::quiet_NaN();
};

std::string hostname() {
  char buf[256] = {};
  if (gethostname(buf, sizeof buf - 1) != 0) return "";
  return buf;
}

class Runner {
 public:
  Runner(std::vector<std::string> argv, std::ostream& out, std::ostream& err)
      : argv_(std::move(argv)), out_(out), err_(err) {}

  int run();

 private:
  void add_io(CLI::App* cmd, bool with_samples);
  void add_radius(CLI::App* cmd);
  [[nodiscard]] OracleOptions oracle_options() const {
    OracleOptions o;
    if (c_.cap_sites > 0) o.cap_sites = c_.cap_sites;
    return o;
  }
  [[nodiscard]] std::vector<double> radii() const;
  void emit(const std::vector<EstimatorResult>& results);
  int report_checks(const std::vector<Check>& checks);

  int cmd_es();
  int cmd_es_annulus();
  int cmd_one_point();
  int cmd_length();
  int cmd_bn();
  int cmd_alpha_fit();
  int cmd_scaling_table();
  int cmd_validate();

  std::vector<std::string> argv_;
  std::ostream& out_;
  std::ostream& err_;
  Common c_;
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

void Runner::add_io(CLI::App* cmd, bool with_samples) {
  if (with_samples) {
    cmd->add_option("--samples", c_.samples, "Monte Carlo sample count")->capture_default_str();
    cmd->add_option("--seed", c_.seed, "master seed")->capture_default_str();
    cmd->add_option("--workers", c_.workers, "worker threads")->capture_default_str()->check(CLI::PositiveNumber);
  }
  cmd->add_option("--format", c_.format, "csv, json or tsv-plot")
      ->capture_default_str()
      ->check(CLI::IsMember({"csv", "json", "tsv-plot"}));
  cmd->add_option("--out", c_.out, "output path (default: stdout)");
  cmd->add_option("--config", c_.config, "flat key = value file; flags override it");
  cmd->add_option("--cap-sites", c_.cap_sites, "site cap for exact solves (default: LERWLAB_CAP_SITES or 200000)");
}

void Runner::add_radius(CLI::App* cmd) {
  auto* re = cmd->add_option("--radius-exp", c_.radius_exp, "radius 2^e; an integer range a:b runs each level");
  auto* r = cmd->add_option("--radius", c_.radius, "radius");
  re->excludes(r);
}

std::vector<double> Runner::radii() const {
  if (!c_.radius_exp.empty()) {
    std::vector<double> out;
    for (double e : parse_exponents(c_.radius_exp)) out.push_back(std::exp2(e));
    return out;
  }
  if (c_.radius > 0.0) return {c_.radius};
  throw UsageError("one of --radius-exp or --radius is required");
}

void Runner::emit(const std::vector<EstimatorResult>& results) {
  RunManifest m;
  m.command_line = argv_;
  m.master_seed = c_.seed;
  m.workers = c_.workers;
  const Format f = parse_format(c_.format);
  if (c_.out.empty()) {
    emit_results(results, f, out_, m);
    return;
  }
  emit_results_to_file(results, f, c_.out, m);
  m.wall_time_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  m.host = hostname();
  const std::string side = c_.out + ".manifest.json";
  std::ofstream s(side, std::ios::trunc);
  s << manifest_json(m, false).dump(2) << '\n';
  if (!s) throw std::runtime_error("cannot write manifest '" + side + "'");
}

int Runner::report_checks(const std::vector<Check>& checks) {
  bool ok = true;
  for (const auto& ch : checks) {
    out_ << (ch.passed ? "PASS  " : "FAIL  ") << ch.name;
    if (!ch.detail.empty()) out_ << "  (" << ch.detail << ")";
    out_ << '\n';
    ok = ok && ch.passed;
  }
  out_ << (ok ? "all checks passed" : "some checks failed") << '\n';
  return ok ? 0 : 2;
}

int Runner::cmd_es() {
  std::vector<EstimatorResult> results;
  for (double r : radii())
    results.push_back(estimate_es(r, c_.samples, {c_.seed, radius_stream_offset(r), c_.workers}));
  emit(results);
  return 0;
}

int Runner::cmd_es_annulus() {
  if (c_.m_exp.empty() || c_.n_exp.empty()) throw UsageError("es-annulus needs --m-exp and --n-exp");
  const double n = std::exp2(parse_exponents(c_.n_exp).at(0));
  std::vector<EstimatorResult> results;
  for (double me : parse_exponents(c_.m_exp)) {
    const double m = std::exp2(me);
    results.push_back(estimate_es_annulus(m, n, c_.samples, {c_.seed, radius_stream_offset(n), c_.workers}));
  }
  emit(results);
  return 0;
}

int Runner::cmd_one_point() {
  if (c_.n_exp.empty() || c_.x.empty()) throw UsageError("one-point needs --n-exp and --x");
  const auto x = parse_point(c_.x);
  std::vector<EstimatorResult> results;
  for (double ne : parse_exponents(c_.n_exp)) {
    if (ne < 0 || ne != std::floor(ne)) throw UsageError("one-point needs integer --n-exp");
    const auto n = static_cast<unsigned>(ne);
    const RunConfig cfg{c_.seed, radius_stream_offset(std::exp2(ne)), c_.workers};
    if (c_.method == "direct" || c_.method == "both") results.push_back(estimate_one_point_direct(n, x, c_.samples, cfg));
    if (c_.method == "factored" || c_.method == "both")
      results.push_back(estimate_one_point_factored(n, x, c_.samples, cfg, oracle_options()));
  }
  emit(results);
  return 0;
}

int Runner::cmd_length() {
  std::vector<EstimatorResult> results;
  for (double r : radii()) {
    const auto m = estimate_length(r, c_.samples, {c_.seed, radius_stream_offset(r), c_.workers});
    EstimatorResult e;
    e.quantity = "length";
    e.estimate = m.mean;
    e.std_error = m.std_error;
    e.n_samples = m.n_samples;
    e.seeds = m.seeds;
    e.params = {{"radius", r}, {"variance", m.variance}, {"median", m.median}, {"q90", m.q90}, {"q95", m.q95}};
    results.push_back(e);
  }
  emit(results);
  return 0;
}

int Runner::cmd_bn() {
  if (c_.n_exp.empty()) throw UsageError("bn needs --n-exp");
  std::vector<EstimatorResult> results;
  for (double ne : parse_exponents(c_.n_exp)) {
    if (ne < 1 || ne != std::floor(ne)) throw UsageError("bn needs integer --n-exp >= 1");
    results.push_back(estimate_bn(static_cast<unsigned>(ne), c_.samples, {c_.seed, 0, c_.workers}));
  }
  emit(results);
  return 0;
}

EstimatorResult alpha_result(const AlphaFit& fit) {
  EstimatorResult r;
  r.quantity = "alpha";
  r.estimate = fit.alpha;
  r.std_error = fit.alpha_std_error;
  r.n_samples = fit.points;
  r.params = {{"ci_low", fit.ci_low},
              {"ci_high", fit.ci_high},
              {"intercept", fit.intercept},
              {"reduced_chi2", fit.reduced_chi2}};
  return r;
}

int Runner::cmd_alpha_fit() {
  if (c_.in.size() != 1) throw UsageError("alpha-fit needs exactly one --in file");
  std::vector<SeriesPoint> series;
  for (const auto& r : read_results(c_.in.front())) {
    if (r.quantity != "es") continue;
    const auto it = r.params.find("radius");
    if (it == r.params.end()) continue;
    series.push_back({std::log2(it->second), r.estimate, r.std_error});
  }
  emit({alpha_result(fit_alpha(series))});
  return 0;
}

int Runner::cmd_scaling_table() {
  if (c_.n_exp.empty()) throw UsageError("scaling-table needs --n-exp a:b");
  const auto ns = parse_exponents(c_.n_exp);
  std::vector<std::pair<unsigned, EsRun>> runs;
  for (double ne : ns) {
    if (ne < 0 || ne != std::floor(ne)) throw UsageError("scaling-table needs integer levels");
    const double r = std::exp2(ne);
    runs.emplace_back(static_cast<unsigned>(ne), run_es(r, c_.samples, {c_.seed, radius_stream_offset(r), c_.workers}));
  }
  double alpha = c_.alpha;
  std::vector<EstimatorResult> results;
  if (std::isnan(alpha)) {
    std::vector<SeriesPoint> series;
    for (const auto& [n, run] : runs) series.push_back({static_cast<double>(n), run.es.estimate, run.es.std_error});
    const auto fit = fit_alpha(series);
    alpha = fit.alpha;
    results.push_back(alpha_result(fit));
  }
  for (const auto& row : scaling_rows(runs, alpha)) {
    EstimatorResult e;
    e.quantity = "scaling-row";
    e.estimate = row.es;
    e.std_error = row.es_std_error;
    e.n_samples = c_.samples;
    e.seeds = {c_.seed, radius_stream_offset(row.radius), 2 * c_.samples};
    e.params = {{"n", row.n},
                {"radius", row.radius},
                {"alpha", row.alpha},
                {"length_mean", row.length_mean},
                {"length_stderr", row.length_std_error},
                {"es_normalized", row.es_normalized},
                {"length_normalized", row.length_normalized}};
    if (row.bn) {
      e.params["bn"] = *row.bn;
      e.params["bn_stderr"] = *row.bn_std_error;
    }
    results.push_back(e);
  }
  emit(results);
  return 0;
}

int Runner::cmd_validate() {
  if (c_.suite == "oracle") return report_checks(oracle_suite(oracle_options()));
  if (c_.suite == "statistical") return report_checks(statistical_suite(c_.seed, c_.samples, c_.workers, oracle_options()));
  if (c_.in.size() != 2) throw UsageError("validate --suite compare needs two --in files");
  return report_checks(compare_suite(c_.in[0], c_.in[1]));
}

int Runner::run() {
  CLI::App app{"Loop-erased random walk in Z^3: escape probabilities, one-point function, lengths and exponent fits"};
  app.name(kToolName);
  app.set_version_flag("--version", std::string(kToolName) + " " + kToolVersion);
  app.require_subcommand(1);

  auto* es = app.add_subcommand("es", "Es(r): LERW and an independent walk do not intersect");
  add_radius(es);
  add_io(es, true);

  auto* ann = app.add_subcommand("es-annulus", "Es(m, n): non-intersection after the last visit to B(m)");
  ann->add_option("--m-exp", c_.m_exp, "inner radius 2^m (or integer range)")->required();
  ann->add_option("--n-exp", c_.n_exp, "outer radius 2^n")->required();
  add_io(ann, true);

  auto* op = app.add_subcommand("one-point", "a_{n,x}: probability that x_n lies on the LERW to exit B(2^n)");
  op->add_option("--n-exp", c_.n_exp, "level n (or integer range)")->required();
  op->add_option("--x", c_.x, "point of the unit ball, \"x1,x2,x3\"")->required();
  op->add_option("--method", c_.method, "direct, factored or both")
      ->capture_default_str()
      ->check(CLI::IsMember({"direct", "factored", "both"}));
  add_io(op, true);

  auto* len = app.add_subcommand("length", "moments of the LERW length M");
  add_radius(len);
  add_io(len, true);

  auto* bn = app.add_subcommand("bn", "b_n = Es(2^n) / Es(2^(n-1))");
  bn->add_option("--n-exp", c_.n_exp, "level n (or integer range)")->required();
  add_io(bn, true);

  auto* af = app.add_subcommand("alpha-fit", "weighted fit of log2 Es(2^n) against n");
  af->add_option("--in", c_.in, "csv or json file of es results")->required();
  add_io(af, false);

  auto* st = app.add_subcommand("scaling-table", "Es, b_n and E(M) with normalised columns");
  st->add_option("--n-exp", c_.n_exp, "integer range a:b")->required();
  st->add_option("--alpha", c_.alpha, "exponent for the normalised columns (default: fitted)");
  add_io(st, true);

  auto* va = app.add_subcommand("validate", "run a validation suite; exit 2 on failure");
  va->add_option("--suite", c_.suite, "oracle, statistical or compare")
      ->capture_default_str()
      ->check(CLI::IsMember({"oracle", "statistical", "compare"}));
  va->add_option("--in", c_.in, "result files for the compare suite");
  add_io(va, true);

  std::vector<std::string> args;
  try {
    args = merge_config(argv_);
  } catch (const UsageError& e) {
    err_ << "error: " << e.what() << '\n';
    return 1;
  }
  std::vector<std::string> rev(args.rbegin(), args.rend() - 1);
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    out_ << app.help();
    return 0;
  } catch (const CLI::CallForVersion&) {
    out_ << kToolName << ' ' << kToolVersion << '\n';
    return 0;
  } catch (const CLI::ParseError& e) {
    err_ << "error: " << e.what() << '\n' << "run with --help for usage\n";
    return 1;
  }

  try {
    if (*es) return cmd_es();
    if (*ann) return cmd_es_annulus();
    if (*op) return cmd_one_point();
    if (*len) return cmd_length();
    if (*bn) return cmd_bn();
    if (*af) return cmd_alpha_fit();
    if (*st) return cmd_scaling_table();
    if (*va) return cmd_validate();
  } catch (const UsageError& e) {
    err_ << "error: " << e.what() << '\n';
    return 1;
  } catch (const CapExceeded& e) {
    err_ << "error: " << e.what() << " (raise it with --cap-sites or LERWLAB_CAP_SITES)\n";
    return 1;
  } catch (const std::exception& e) {
    err_ << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}

}  // namespace

int run_cli(const std::vector<std::string>& argv, std::ostream& out, std::ostream& err) {
  return Runner(argv, out, err).run();
}

}  // namespace lerw
