#include "lerw/report.hpp"

#include <charconv>
#include <fstream>
#include <locale>
#include <sstream>
#include <stdexcept>

#include "lerw/rng.hpp"

namespace lerw {

std::map<std::string, std::string> RunManifest::default_conventions() {
  return {{"radius", kRadiusConvention},
          {"annulus", kAnnulusConvention},
          {"second_walk", kSecondWalkConvention},
          {"rng", kRngAlgorithm}};
}

Format parse_format(const std::string& name) {
  if (name == "csv") return Format::Csv;
  if (name == "json") return Format::Json;
  if (name == "tsv-plot") return Format::TsvPlot;
  throw std::invalid_argument("unknown format '" + name + "' (expected csv, json or tsv-plot)");
}

std::string format_number(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string param_label(const EstimatorResult& r) {
  std::string s = r.quantity;
  char sep = '/';
  for (const auto& [k, v] : r.params) {
    s += sep;
    s += k + "=" + format_number(v);
    sep = ';';
  }
  return s;
}

double plot_abscissa(const EstimatorResult& r) {
  for (const char* key : {"radius", "n", "m"})
    if (const auto it = r.params.find(key); it != r.params.end()) return it->second;
  return 0.0;
}

nlohmann::ordered_json manifest_json(const RunManifest& m, bool deterministic_only) {
  nlohmann::ordered_json j;
  j["tool_version"] = m.tool_version;
  j["command_line"] = m.command_line;
  j["master_seed"] = m.master_seed;
  j["workers"] = m.workers;
  j["conventions"] = m.conventions;
  if (!deterministic_only) {
    if (m.wall_time_seconds) j["wall_time_seconds"] = *m.wall_time_seconds;
    if (m.host) j["host"] = *m.host;
  }
  return j;
}

RunManifest manifest_from_json(const nlohmann::json& j) {
  RunManifest m;
  m.tool_version = j.at("tool_version").get<std::string>();
  m.command_line = j.at("command_line").get<std::vector<std::string>>();
  m.master_seed = j.at("master_seed").get<std::uint64_t>();
  m.workers = j.at("workers").get<unsigned>();
  m.conventions = j.at("conventions").get<std::map<std::string, std::string>>();
  if (j.contains("wall_time_seconds")) m.wall_time_seconds = j["wall_time_seconds"].get<double>();
  if (j.contains("host")) m.host = j["host"].get<std::string>();
  return m;
}

nlohmann::ordered_json result_json(const EstimatorResult& r) {
  nlohmann::ordered_json j;
  j["quantity"] = r.quantity;
  j["estimate"] = r.estimate;
  j["stderr"] = r.std_error;
  j["n_samples"] = r.n_samples;
  j["params"] = r.params;
  j["seed_manifest"] = {{"master_seed", r.seeds.master_seed},
                        {"first_stream", r.seeds.first_stream},
                        {"stream_count", r.seeds.stream_count}};
  return j;
}

EstimatorResult result_from_json(const nlohmann::json& j) {
  EstimatorResult r;
  r.quantity = j.at("quantity").get<std::string>();
  r.estimate = j.at("estimate").get<double>();
  r.std_error = j.at("stderr").get<double>();
  r.n_samples = j.at("n_samples").get<std::uint64_t>();
  r.params = j.at("params").get<std::map<std::string, double>>();
  const auto& s = j.at("seed_manifest");
  r.seeds = {s.at("master_seed").get<std::uint64_t>(), s.at("first_stream").get<std::uint64_t>(),
             s.at("stream_count").get<std::uint64_t>()};
  return r;
}

std::size_t emit_results(const std::vector<EstimatorResult>& results, Format format, std::ostream& out,
                         const RunManifest& manifest) {
  std::ostringstream buf;
  buf.imbue(std::locale::classic());
  switch (format) {
    case Format::Csv:
      buf << "param,estimate,stderr,n_samples,seed\n";
      for (const auto& r : results)
        buf << param_label(r) << ',' << format_number(r.estimate) << ',' << format_number(r.std_error) << ','
            << r.n_samples << ',' << r.seeds.master_seed << '\n';
      break;
    case Format::Json: {
      auto arr = nlohmann::ordered_json::array();
      const auto man = manifest_json(manifest, true);
      for (const auto& r : results) {
        auto j = result_json(r);
        j["manifest"] = man;
        arr.push_back(std::move(j));
      }
      buf << arr.dump(2) << '\n';
      break;
    }
    case Format::TsvPlot:
      for (const auto& r : results)
        buf << format_number(plot_abscissa(r)) << '\t' << format_number(r.estimate) << '\t'
            << format_number(r.std_error) << '\n';
      break;
  }
  const std::string s = buf.str();
  out << s;
  return s.size();
}

std::size_t emit_results_to_file(const std::vector<EstimatorResult>& results, Format format, const std::string& path,
                                 const RunManifest& manifest) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  const std::size_t n = emit_results(results, format, out, manifest);
  out.flush();
  if (!out) throw std::runtime_error("write to '" + path + "' failed");
  return n;
}

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path + "' for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

double parse_double(const std::string& s, const std::string& path) {
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size())
    throw std::runtime_error("'" + path + "': malformed number '" + s + "'");
  return v;
}

EstimatorResult parse_csv_row(const std::string& line, const std::string& path) {
  std::vector<std::string> cols;
  std::stringstream ss(line);
  for (std::string c; std::getline(ss, c, ',');) cols.push_back(c);
  if (cols.size() != 5) throw std::runtime_error("'" + path + "': expected 5 csv columns in '" + line + "'");
  EstimatorResult r;
  const auto slash = cols[0].find('/');
  r.quantity = cols[0].substr(0, slash);
  if (slash != std::string::npos) {
    std::stringstream ps(cols[0].substr(slash + 1));
    for (std::string kv; std::getline(ps, kv, ';');) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos) throw std::runtime_error("'" + path + "': malformed parameter '" + kv + "'");
      r.params[kv.substr(0, eq)] = parse_double(kv.substr(eq + 1), path);
    }
  }
  r.estimate = parse_double(cols[1], path);
  r.std_error = parse_double(cols[2], path);
  r.n_samples = std::stoull(cols[3]);
  r.seeds.master_seed = std::stoull(cols[4]);
  return r;
}

}  // namespace

std::vector<EstimatorResult> read_results(const std::string& path) {
  const std::string text = slurp(path);
  const auto first = text.find_first_not_of(" \t\r\n");
  std::vector<EstimatorResult> out;
  if (first != std::string::npos && (text[first] == '[' || text[first] == '{')) {
    const auto j = nlohmann::json::parse(text);
    if (j.is_array())
      for (const auto& e : j) out.push_back(result_from_json(e));
    else
      out.push_back(result_from_json(j));
    return out;
  }
  std::stringstream ss(text);
  std::string line;
  if (!std::getline(ss, line) || line.rfind("param,estimate,stderr,n_samples,seed", 0) != 0)
    throw std::runtime_error("'" + path + "': missing csv header");
  while (std::getline(ss, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty()) out.push_back(parse_csv_row(line, path));
  }
  return out;
}

std::vector<RunManifest> read_manifests(const std::string& path) {
  const auto j = nlohmann::json::parse(slurp(path));
  std::vector<RunManifest> out;
  if (j.is_array()) {
    for (const auto& e : j)
      if (e.contains("manifest")) out.push_back(manifest_from_json(e["manifest"]));
  } else if (j.contains("manifest")) {
    out.push_back(manifest_from_json(j["manifest"]));
  } else if (j.contains("tool_version")) {
    out.push_back(manifest_from_json(j));
  }
  return out;
}

}  // namespace lerw
