#pragma once

#include <array>
#include <string>
#include <vector>

#include "pcw/sweeps.hpp"

namespace pcw {

struct GeometryConfig {
  double a = 1.0;
  double r = 0.3;
  double n = 3.5;
  int m = 4;
  int l_periods = 33;
  std::string defect = "w1";  // w1 | none | uniform
  bool operator==(const GeometryConfig&) const = default;
};

struct SolverConfig {
  int resolution = 32;
  int pml_cells = 32;
  double pml_order = 3.0;
  double pml_r0 = 1e-8;
  std::string boundary_mode = "active";
  double air_pad = 4.0;
  double overhang = 2.0;
  bool operator==(const SolverConfig&) const = default;
};

struct PweConfig {
  int cutoff = 9;
  double air_pad = 1.5;
  double concentration_threshold = 0.5;
  double concentration_halfwidth = 1.0;
  int band_samples = 33;
  bool operator==(const PweConfig&) const = default;
};

struct ConvergenceConfig {
  std::string param = "l_b";
  std::vector<double> values{5, 9, 13, 17, 21, 25, 29, 31};
  double ng = 58.0;
  std::string orientation = "y";
  double tolerance = 0.05;
  bool operator==(const ConvergenceConfig&) const = default;
};

struct PhcConfig {
  double omega = 0.0;  // 0 selects mid-gap
  std::vector<double> scan{0.12, 0.15, 0.18, 0.2, 0.22, 0.24, 0.26, 0.28, 0.3, 0.33};
  std::vector<std::array<double, 2>> scan_positions{{0.5, 0.0}, {0.0, 0.5}};
  std::vector<std::string> scan_orientations{"y", "x"};
  bool operator==(const PhcConfig&) const = default;
};

struct StudyConfig {
  std::vector<double> k_list;  // empty selects 21 points over [0, 0.5]
  int n_bands = 8;
  std::vector<double> ng_targets{5.0, 20.0, 58.0, 120.0};
  double ng = 58.0;
  std::vector<double> position;  // [x, y]; empty selects the Ey antinode
  std::string orientation = "y";
  std::string quantity = "beta";
  std::vector<std::string> orientations{"x", "y"};
  std::array<int, 2> map_samples{16, 28};
  std::vector<double> contour_levels{0.8, 0.96};
  double rad_margin = 2.0;
  double box_length = 0.0;
  ConvergenceConfig convergence;
  PhcConfig phc;
  bool operator==(const StudyConfig&) const = default;
};

struct OutputConfig {
  std::string directory = "out";
  std::vector<std::string> formats{"csv", "pgm"};
  double saturation = 0.995;
  bool operator==(const OutputConfig&) const = default;
};

struct RunConfig {
  GeometryConfig geometry;
  SolverConfig solver;
  PweConfig pwe;
  StudyConfig study;
  OutputConfig output;
  bool operator==(const RunConfig&) const = default;

  void validate() const;
  CrystalGeometry crystal() const;
  StudySettings settings() const;
  MapSpec map_spec() const;
};

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Unknown keys and malformed values raise ConfigError naming key and line.
RunConfig parse_config(const std::string& yaml_text);
RunConfig load_config(const std::string& path);
std::string serialize_config(const RunConfig& c);
// Hash of the canonical serialization.
std::string config_hash(const RunConfig& c);

}  // namespace pcw
