#include <unistd.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "json.hpp"
#include "lerw/cli.hpp"
#include "lerw/exact_values.hpp"
#include "lerw/report.hpp"

using namespace lerw;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out, err;
};

Run lerwlab(std::vector<std::string> args) {
  args.insert(args.begin(), "lerwlab");
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

struct TempDir {
  fs::path path;
  TempDir() : path(fs::temp_directory_path() / ("lerw_cli_" + std::to_string(::getpid()))) {
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string operator/(const std::string& name) const { return (path / name).string(); }
};

void write_file(const std::string& path, const std::string& text) { std::ofstream(path) << text; }

}  // namespace

TEST_CASE("help and version") {
  const auto h = lerwlab({"--help"});
  CHECK(h.code == 0);
  for (const char* sub : {"es", "es-annulus", "one-point", "length", "bn", "alpha-fit", "scaling-table", "validate"})
    CHECK(h.out.find(sub) != std::string::npos);
  const auto v = lerwlab({"--version"});
  CHECK(v.code == 0);
  CHECK(v.out == "lerwlab 1.0.0\n");
}

TEST_CASE("usage errors exit 1") {
  CHECK(lerwlab({}).code == 1);
  CHECK(lerwlab({"frobnicate"}).code == 1);
  CHECK(lerwlab({"es", "--radius", "4", "--bogus"}).code == 1);
  const auto both = lerwlab({"es", "--radius", "4", "--radius-exp", "2"});
  CHECK(both.code == 1);
  CHECK_FALSE(both.err.empty());
  CHECK(lerwlab({"es"}).code == 1);
  CHECK(lerwlab({"es", "--radius", "4", "--format", "xml"}).code == 1);
  CHECK(lerwlab({"es", "--radius", "4", "--workers", "0"}).code == 1);
  CHECK(lerwlab({"bn", "--n-exp", "1.5"}).code == 1);
}

TEST_CASE("es run with json output and sidecar manifest") {
  TempDir dir;
  const auto path = dir / "es1.json";
  const auto r = lerwlab({"es", "--radius-exp", "1", "--samples", "1000000", "--seed", "42", "--workers", "4",
                          "--format", "json", "--out", path});
  REQUIRE(r.code == 0);
  const auto results = read_results(path);
  REQUIRE(results.size() == 1);
  CHECK(results[0].quantity == "es");
  CHECK(results[0].params.at("radius") == 2.0);
  CHECK(results[0].seeds.master_seed == 42);

  CHECK(std::abs(results[0].estimate - exact_es(2.0)) <= 3.0 * results[0].std_error);

  REQUIRE(fs::exists(path + ".manifest.json"));
  std::ifstream side(path + ".manifest.json");
  const auto m = nlohmann::json::parse(side);
  CHECK(m.contains("wall_time_seconds"));
  CHECK(m.contains("host"));
  CHECK(m["master_seed"] == 42);
  CHECK(m["workers"] == 4);

  const auto path1 = dir / "es1-w1.json";
  REQUIRE(lerwlab({"es", "--radius-exp", "1", "--samples", "1000000", "--seed", "42", "--workers", "1", "--format",
                   "json", "--out", path1})
              .code == 0);
  CHECK(read_results(path1)[0].estimate == results[0].estimate);
}

TEST_CASE("es at radius 1") {
  const auto r = lerwlab({"es", "--radius", "1", "--samples", "200000", "--seed", "42"});
  REQUIRE(r.code == 0);
  std::stringstream ss(r.out);
  std::string header, row;
  std::getline(ss, header);
  std::getline(ss, row);
  CHECK(header == "param,estimate,stderr,n_samples,seed");
  const auto c1 = row.find(','), c2 = row.find(',', c1 + 1);
  const double est = std::stod(row.substr(c1 + 1, c2 - c1 - 1));
  const double se = std::stod(row.substr(c2 + 1));
  CHECK(std::abs(est - 5.0 / 6.0) <= 3.0 * se);
}

TEST_CASE("ranges produce one row per level") {
  const auto r = lerwlab({"es", "--radius-exp", "0:3", "--samples", "200"});
  REQUIRE(r.code == 0);
  CHECK(std::count(r.out.begin(), r.out.end(), '\n') == 5);
  const auto l = lerwlab({"length", "--radius-exp", "1:2", "--samples", "200", "--format", "tsv-plot"});
  REQUIRE(l.code == 0);
  CHECK(std::count(l.out.begin(), l.out.end(), '\n') == 2);
}

TEST_CASE("oracle validation suite passes") {
  const auto r = lerwlab({"validate", "--suite", "oracle", "--seed", "7"});
  CHECK(r.code == 0);
  CHECK(r.out.find("FAIL") == std::string::npos);
}

TEST_CASE("alpha-fit reads an es file") {
  TempDir dir;
  const auto path = dir / "series.csv";
  REQUIRE(lerwlab({"es", "--radius-exp", "1:4", "--samples", "4000", "--out", path}).code == 0);
  const auto r = lerwlab({"alpha-fit", "--in", path, "--format", "json"});
  REQUIRE(r.code == 0);
  const auto j = nlohmann::json::parse(r.out);
  REQUIRE(j.size() == 1);
  CHECK(j[0]["quantity"] == "alpha");
  for (const char* key : {"ci_low", "ci_high", "intercept", "reduced_chi2"}) CHECK(j[0]["params"].contains(key));
  CHECK(j[0]["n_samples"] == 4);
  CHECK(lerwlab({"alpha-fit"}).code == 1);
}

TEST_CASE("config files") {
  TempDir dir;
  const auto cfg = dir / "run.cfg";
  write_file(cfg, "# defaults\nradius = 1\nsamples = 1000\nseed = \"5\"\n--format = json\n");
  const auto a = lerwlab({"es", "--config", cfg});
  REQUIRE(a.code == 0);
  const auto ja = nlohmann::json::parse(a.out);
  CHECK(ja[0]["n_samples"] == 1000);
  CHECK(ja[0]["seed_manifest"]["master_seed"] == 5);

  const auto b = lerwlab({"es", "--config", cfg, "--samples", "500"});
  REQUIRE(b.code == 0);
  CHECK(nlohmann::json::parse(b.out)[0]["n_samples"] == 500);

  const auto pairs = read_config(cfg);
  REQUIRE(pairs.size() == 4);
  CHECK(pairs[2] == std::pair<std::string, std::string>{"seed", "5"});
  CHECK(pairs[3].first == "format");

  write_file(cfg, "radius = 1\nsamplez = 10\n");
  CHECK(lerwlab({"es", "--config", cfg}).code == 1);
  write_file(cfg, "radius 1\n");
  CHECK(lerwlab({"es", "--config", cfg}).code == 1);
  CHECK(lerwlab({"es", "--config", dir / "missing.cfg"}).code == 1);
}

TEST_CASE("site cap errors name the cap") {
  const auto r = lerwlab({"one-point", "--n-exp", "4", "--x", "0.5,0,0", "--method", "factored", "--samples", "10",
                          "--cap-sites", "100"});
  CHECK(r.code == 1);
  CHECK(r.err.find("100") != std::string::npos);
  CHECK(r.err.find("--cap-sites") != std::string::npos);
}

TEST_CASE("compare suite") {
  TempDir dir;
  const auto a = dir / "a.json", b = dir / "b.json", c = dir / "c.json";
  REQUIRE(lerwlab({"es", "--radius", "4", "--samples", "20000", "--seed", "1", "--format", "json", "--out", a}).code == 0);
  REQUIRE(lerwlab({"es", "--radius", "4", "--samples", "20000", "--seed", "2", "--format", "json", "--out", b}).code == 0);
  CHECK(lerwlab({"validate", "--suite", "compare", "--in", a, "--in", b}).code == 0);
  CHECK(lerwlab({"validate", "--suite", "compare", "--in", a}).code == 1);

  // Different convention flags are refused.
  std::ifstream in(b);
  auto j = nlohmann::json::parse(in);
  in.close();
  j[0]["manifest"]["conventions"]["annulus"] = "u=first-exit";
  std::ofstream(c) << j.dump();
  const auto refused = lerwlab({"validate", "--suite", "compare", "--in", a, "--in", c});
  CHECK(refused.code == 2);
  CHECK(refused.out.find("convention") != std::string::npos);

  // Inconsistent estimates fail.
  std::ifstream in2(b);
  auto k = nlohmann::json::parse(in2);
  k[0]["estimate"] = k[0]["estimate"].get<double>() + 0.2;
  std::ofstream(c, std::ios::trunc) << k.dump();
  CHECK(lerwlab({"validate", "--suite", "compare", "--in", a, "--in", c}).code == 2);
}

TEST_CASE("exponent and point parsing") {
  CHECK(parse_exponents("3") == std::vector<double>{3.0});
  CHECK(parse_exponents("2.5") == std::vector<double>{2.5});
  CHECK(parse_exponents("2:5") == std::vector<double>{2, 3, 4, 5});
  CHECK_THROWS(parse_exponents("5:2"));
  CHECK_THROWS(parse_exponents("a"));
  CHECK_THROWS(parse_exponents("1.5:3"));
  CHECK(parse_point("0.5,-0.25,0") == std::array<double, 3>{0.5, -0.25, 0.0});
  CHECK_THROWS(parse_point("0.5,0"));
  CHECK_THROWS(parse_point("0.5,0,x"));
}
