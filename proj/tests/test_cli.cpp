#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "pcw/cli.hpp"
#include "pcw/config.hpp"

using namespace pcw;
namespace fs = std::filesystem;

namespace {

struct CliRun {
  int code = 0;
  std::string out, err;
};

CliRun run(std::vector<std::string> args) {
  args.insert(args.begin(), "pcwsim");
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  std::ostringstream out, err;
  CliRun r;
  r.code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

fs::path scratch(const std::string& name) {
  fs::path p = fs::temp_directory_path() / ("pcw_cli_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

void write(const fs::path& p, const std::string& s) { std::ofstream(p) << s; }

}  // namespace

TEST_CASE("configuration round trip and defaults") {
  RunConfig def;
  CHECK(parse_config("") == def);
  CHECK(parse_config(serialize_config(def)) == def);

  RunConfig c;
  c.geometry.r = 0.31;
  c.solver.resolution = 24;
  c.study.ng_targets = {7.5, 33.3};
  c.study.position = {0.1, 0.2};
  c.study.phc.scan = {0.1, 0.123456789012345};
  c.output.formats = {"csv"};
  RunConfig back = parse_config(serialize_config(c));
  CHECK(back == c);
  CHECK(config_hash(back) == config_hash(c));
  CHECK(config_hash(c) != config_hash(def));
}

TEST_CASE("configuration errors name the key and line") {
  try {
    parse_config("geometry:\n  radius: 0.3\n");
    FAIL("unknown key accepted");
  } catch (const ConfigError& e) {
    std::string msg = e.what();
    CHECK(msg.find("geometry.radius") != std::string::npos);
    CHECK(msg.find("line 2") != std::string::npos);
  }
  CHECK_THROWS_AS(parse_config("solver:\n  resolution: many\n"), ConfigError);
  RunConfig bad;
  bad.geometry.r = 0.6;
  CHECK_THROWS(bad.validate());
  bad = RunConfig{};
  bad.solver.boundary_mode = "open";
  CHECK_THROWS(bad.validate());
}

TEST_CASE("version prints the configuration hash") {
  CliRun r = run({"--version"});
  CHECK(r.code == 0);
  CHECK(r.out.find(kVersion) != std::string::npos);
  CHECK(r.out.find(config_hash(RunConfig{})) != std::string::npos);
}

TEST_CASE("usage errors exit with code 1") {
  fs::path dir = scratch("usage");
  CHECK(run({"frobnicate"}).code == 1);
  CHECK(run({"emit", "--orientation", "z"}).code == 1);
  write(dir / "bad.yaml", "geometry:\n  radius: 0.3\n");
  CliRun r = run({"--config", (dir / "bad.yaml").string(), "bands"});
  CHECK(r.code == 1);
  CHECK(r.err.find("geometry.radius") != std::string::npos);
  CHECK(run({"--output", dir.string(), "emit", "--x", "0.1"}).code == 1);
  fs::remove_all(dir);
}

TEST_CASE("bands of a uniform medium follow the light line") {
  fs::path dir = scratch("bands");
  write(dir / "u.yaml",
        "geometry:\n  defect: uniform\n  n: 2.0\nstudy:\n  k_list: [0.1, 0.2, 0.4]\n  n_bands: 3\n"
        "output:\n  directory: " + dir.string() + "\n");
  CliRun r = run({"--config", (dir / "u.yaml").string(), "bands"});
  REQUIRE(r.code == 0);
  std::ifstream in(dir / "bands.csv");
  std::string line;
  std::getline(in, line);
  CHECK(line == "k,band_index,omega,n_g,parity");
  int checked = 0;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    double k, w;
    int b;
    char c;
    std::istringstream ls(line);
    ls >> k >> c >> b >> c >> w;
    if (b == 0) {
      CHECK(w == doctest::Approx(k / 2.0).epsilon(1e-8));
      ++checked;
    }
  }
  CHECK(checked == 3);
  CHECK(fs::exists(dir / "bands.pgm"));
  CHECK(fs::exists(dir / "manifest.txt"));
  RunConfig saved = load_config((dir / "config.yaml").string());
  CHECK(saved.geometry.defect == "uniform");
  for (auto& e : fs::directory_iterator(dir)) CHECK(e.path().string().find(".tmp") == std::string::npos);
  fs::remove_all(dir);
}

TEST_CASE("emitter inside a hole is rejected") {
  fs::path dir = scratch("hole");
  CliRun r = run({"--output", dir.string(), "--resolution", "16", "emit", "--ng", "20", "--x",
                  "0.5", "--y", "0.8660254037844386"});
  CHECK(r.code == 1);
  CHECK(r.err.find("hole") != std::string::npos);
  fs::remove_all(dir);
}

TEST_CASE("small end-to-end runs") {
  fs::path dir = scratch("e2e");
  write(dir / "small.yaml",
        "geometry:\n  m: 2\n  l_periods: 13\nsolver:\n  resolution: 16\n  pml_cells: 16\n"
        "study:\n  phc:\n    scan: [0.15, 0.24]\n  map_samples: [2, 4]\n"
        "output:\n  directory: " + dir.string() + "\n");
  std::string cfg = (dir / "small.yaml").string();

  CliRun phc = run({"--config", cfg, "phc-rad", "--scan-frequency"});
  CHECK(phc.code == 0);
  CHECK(fs::exists(dir / "phc_scan.csv"));

  CliRun emit = run({"--config", cfg, "emit", "--ng", "20"});
  CHECK(emit.code == 0);
  CHECK(emit.err.empty());
  std::ifstream in(dir / "emission.csv");
  std::string header, row;
  std::getline(in, header);
  std::getline(in, row);
  CHECK(header.rfind("omega,n_g,", 0) == 0);
  CHECK_FALSE(row.empty());
  CHECK(fs::exists(dir / "field.pgm"));
  for (auto& e : fs::directory_iterator(dir)) CHECK(e.path().string().find(".tmp") == std::string::npos);
  fs::remove_all(dir);
}
