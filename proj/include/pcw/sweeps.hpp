#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "pcw/active_bc.hpp"
#include "pcw/emission.hpp"
#include "pcw/grid_mode.hpp"
#include "pcw/io.hpp"
#include "pcw/pwe.hpp"

namespace pcw {

struct StudySettings {
  CrystalGeometry geometry = build_w1(1.0, 0.3, 3.5, 4, 33);
  DomainLayout layout;
  PweOptions pwe;
  double rad_margin = 2.0;  // distance of the radiation faces beyond the slab edge
  double box_length = 0.0;  // l_b; 0 selects l - 2
};

// Radiation box of a layout: x extent l_b centred on the dipole column, y
// faces rad_margin outside the slab, snapped outward to grid lines.
FluxBox radiation_box(const StudySettings& s, double box_length, double margin);
FluxBox radiation_box(const StudySettings& s);

struct EmitExtras {
  bool reflection = false;
  FieldSolution* field = nullptr;  // receives the solved fields
};

// Emission study on a W1 waveguide: grid-matched guided modes, shared
// factorizations per operating point, one FDFD solve per dipole.
class W1Study {
 public:
  explicit W1Study(StudySettings s);

  const StudySettings& settings() const { return s_; }
  std::shared_ptr<const RasterGrid> grid() const { return grid_; }
  const GuidedModeSolver& pwe() const;
  const GridModeSolver& grid_modes() const;

  // Right-going grid mode with group index n_g (cached).
  const BlochMode& mode(double n_g) const;
  double p0(double n_g, Axis o) const;
  // Strongest Ey sample on the waveguide axis within one period.
  std::pair<double, double> antinode(double n_g) const;

  // Throws std::invalid_argument when the snapped dipole sits in a hole.
  EmissionReport emit(double n_g, double x, double y, Axis o,
                      BoundaryMode bm = BoundaryMode::active, const EmitExtras& ex = EmitExtras()) const;
  bool in_dielectric(double x, double y, Axis o) const;
  // Drops cached factorizations (modes stay).
  void release_solvers() const;

 private:
  StudySettings s_;
  std::shared_ptr<const RasterGrid> grid_;
  mutable std::mutex mu_;
  mutable std::unique_ptr<GuidedModeSolver> pwe_;
  mutable std::unique_ptr<GridModeSolver> gm_;
  mutable std::map<double, std::unique_ptr<BlochMode>> modes_;
  mutable std::map<std::pair<double, int>, std::shared_ptr<FdfdSolver>> solvers_;
  std::shared_ptr<FdfdSolver> solver(double n_g, BoundaryMode bm) const;
};

// Defect-free crystal with PML on all sides.
class CrystalStudy {
 public:
  explicit CrystalStudy(StudySettings s);
  const StudySettings& settings() const { return s_; }
  std::shared_ptr<const RasterGrid> grid() const { return grid_; }
  // F_rad from the closed box; p_rad holds the y-face flux of the same solution.
  EmissionReport emit(double omega, double x, double y, Axis o,
                      FieldSolution* keep = nullptr) const;
  bool in_dielectric(double x, double y, Axis o) const;
  void release_solvers() const;

 private:
  StudySettings s_;
  std::shared_ptr<const RasterGrid> grid_;
  mutable std::mutex mu_;
  mutable std::map<double, std::shared_ptr<FdfdSolver>> solvers_;
  std::shared_ptr<FdfdSolver> solver(double omega) const;
};

// ---- maps ----

enum class Quantity { f_wg, f_rad, beta };
std::string to_string(Quantity q);
Quantity quantity_from_string(const std::string& s);

struct MapSpec {
  Quantity quantity = Quantity::beta;
  std::vector<Axis> orientations{Axis::x, Axis::y};
  std::vector<double> ng_targets{5.0, 20.0, 58.0, 120.0};
  int samples_x = 16;
  int samples_y = 28;
  double y_extent = 2.0 * kRowPitch;  // samples cover y in [-y_extent, y_extent]
  std::vector<double> contour_levels{0.8, 0.96};
  BoundaryMode boundary = BoundaryMode::active;
};

// Sample position at the centre of map cell (ix, iy).
std::pair<double, double> map_position(const MapSpec& spec, int ix, int iy);

enum class CellStatus { ok, missing, failed };

struct MapRecord {
  double target = 0.0;  // n_g for waveguide maps, omega for crystal maps
  Axis orientation = Axis::y;
  int ix = 0, iy = 0;
  double x = 0.0, y = 0.0;  // requested position
  CellStatus status = CellStatus::ok;
  std::string error;
  EmissionReport report;
  std::string key() const;
  double value(Quantity q) const;
};

std::string to_json_line(const MapRecord& r);
MapRecord record_from_json(const std::string& line);

struct RunOptions {
  int jobs = 1;
  std::string record_path;  // empty disables persistence and resume
};

struct MapResult {
  std::vector<MapRecord> records;  // sorted by (target, orientation, iy, ix)
  int computed = 0;
  int resumed = 0;
  int failed = 0;
};

// Either study type can drive a map; `omega` replaces n_g for crystal maps.
MapResult run_map(const W1Study& study, const MapSpec& spec, const RunOptions& opt);
MapResult run_crystal_map(const CrystalStudy& study, double omega, const MapSpec& spec,
                          const RunOptions& opt);

// Long-format table of a map.
std::string map_csv(const MapResult& m);
// Raster (one pixel per map cell, rows top to bottom in decreasing y), the
// sidecar scale text and, for beta, a colour overlay with contour cells.
struct MapImages {
  Gray8 gray;
  std::string scale;
  std::optional<Rgb8> contours;
};
MapImages map_images(const MapResult& m, const MapSpec& spec, double target, Axis o);

// ---- convergence ----

enum class ConvParam { l_b, w_b, l, w, resolution, pml };
std::string to_string(ConvParam p);
ConvParam conv_param_from_string(const std::string& s);

struct ConvergenceSpec {
  ConvParam param = ConvParam::l_b;
  std::vector<double> values;
  double n_g = 58.0;
  Axis orientation = Axis::y;
  double tolerance = 0.05;
};

struct ConvergenceResult {
  std::vector<double> values;
  std::vector<double> gamma;  // radiated power over P0
  bool converged = false;
  double plateau_start = 0.0;  // smallest value beyond which the spread stays below tolerance
  double plateau_value = 0.0;
  double spread = 0.0;         // (max - min) / mean over the plateau
  std::string note;
};

// Smallest index whose tail (at least two points) has relative spread below tol.
ConvergenceResult detect_plateau(const std::vector<double>& values, const std::vector<double>& gamma,
                                 double tol);
ConvergenceResult convergence_sweep(const StudySettings& base, const ConvergenceSpec& spec,
                                    const RunOptions& opt = {});
std::string convergence_csv(const ConvergenceResult& r, ConvParam p);

// ---- crystal frequency scan ----

struct ScanPoint {
  double omega = 0.0;
  double x = 0.0, y = 0.0;
  Axis orientation = Axis::y;
  double f_rad = 0.0;   // closed box
  double f_side = 0.0;  // y faces only
};
std::vector<ScanPoint> phc_frequency_scan(const StudySettings& s, const std::vector<double>& omegas,
                                          const std::vector<std::pair<double, double>>& positions,
                                          const std::vector<Axis>& orientations);
std::string scan_csv(const std::vector<ScanPoint>& v);

}  // namespace pcw
