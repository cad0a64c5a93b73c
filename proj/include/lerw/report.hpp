// Result serialisation: csv, json and tsv-plot emitters plus the run manifest.
#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "lerw/estimators.hpp"

namespace lerw {

inline constexpr const char* kToolName = "lerwlab";
inline constexpr const char* kToolVersion = "1.0.0";

struct RunManifest {
  std::string tool_version = std::string(kToolName) + " " + kToolVersion;
  std::vector<std::string> command_line;
  std::uint64_t master_seed = 0;
  unsigned workers = 1;
  std::map<std::string, std::string> conventions = default_conventions();
  std::optional<double> wall_time_seconds;
  std::optional<std::string> host;

  static std::map<std::string, std::string> default_conventions();
  friend bool operator==(const RunManifest&, const RunManifest&) = default;
};

enum class Format { Csv, Json, TsvPlot };

Format parse_format(const std::string& name);

/// Shortest decimal text that reads back to the same double; locale-free.
std::string format_number(double v);

/// "quantity/key=value;key=value" with keys in sorted order.
std::string param_label(const EstimatorResult& r);

/// The abscissa used by tsv-plot: radius, else n, else m, else 0.
double plot_abscissa(const EstimatorResult& r);

/// Manifest fields that are a function of the inputs only (no wall time or
/// host), so embedding them keeps result files reproducible byte for byte.
nlohmann::ordered_json manifest_json(const RunManifest& m, bool deterministic_only);
RunManifest manifest_from_json(const nlohmann::json& j);

nlohmann::ordered_json result_json(const EstimatorResult& r);
EstimatorResult result_from_json(const nlohmann::json& j);

/// Writes the results in the given format and returns the byte count.
/// csv: header `param,estimate,stderr,n_samples,seed` and one row per result;
/// json: an array with one object per result, each embedding the manifest;
/// tsv-plot: `x<TAB>y<TAB>yerr` rows without a header.
std::size_t emit_results(const std::vector<EstimatorResult>& results, Format format, std::ostream& out,
                         const RunManifest& manifest);

/// Writes to `path`, surfacing I/O failures with the path in the message.
std::size_t emit_results_to_file(const std::vector<EstimatorResult>& results, Format format, const std::string& path,
                                 const RunManifest& manifest);

/// Reads results written in csv or json (chosen by content).
std::vector<EstimatorResult> read_results(const std::string& path);

/// Manifests embedded in a json result file (one per result).
std::vector<RunManifest> read_manifests(const std::string& path);

}  // namespace lerw
