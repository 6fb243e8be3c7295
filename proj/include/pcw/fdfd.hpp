#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Sparse>

#include "pcw/bloch_mode.hpp"
#include "pcw/geometry.hpp"

namespace pcw {

struct PmlSpec {
  int cells = 32;
  double order = 3.0;
  double r0 = 1e-8;
};

enum class BoundaryMode { active, pml_only };
std::string to_string(BoundaryMode m);
BoundaryMode boundary_from_string(const std::string& s);

struct Dipole {
  double x = 0.0;
  double y = 0.0;
  Axis orientation = Axis::y;
  cd current = 1.0;
};

// Dirichlet values of Ey on the two termination planes, one per grid row.
// Rows outside |y| < y_half are not constrained.
struct ActiveBc {
  double x_minus = 0.0;
  double x_plus = 0.0;
  double y_half = 0.0;
  std::vector<cd> ey_minus;
  std::vector<cd> ey_plus;
  double a0 = 0.0;
  double phi = 0.0;
  cd coef_right = 0.0;
  cd coef_left = 0.0;
  double mode_omega = 0.0;
  double mode_k = 0.0;
};

// Computational domain for W1 and crystal runs: crystal of l_periods along x
// terminated at |x| = (l_periods - 1)/2, air padding above and below the slab,
// PML of pml.cells on every side.
struct DomainLayout {
  int resolution = 32;
  int l_periods = 33;
  double air_pad = 4.0;
  double overhang = 2.0;
  PmlSpec pml;

  double plane_x() const { return 0.5 * (l_periods - 1); }
  double d() const { return 1.0 / resolution; }
  double physical_half_height(const CrystalGeometry& g) const;
  int nx() const;
  int ny(const CrystalGeometry& g) const;
  RasterGrid raster(const CrystalGeometry& g) const;
  // One lattice period with the same rows as raster().
  RasterGrid cell_raster(const CrystalGeometry& g) const;
  CellSampling sampling(const CrystalGeometry& g) const;
};

struct FdfdProblem {
  std::shared_ptr<const RasterGrid> grid;
  double omega = 0.0;  // a / lambda
  PmlSpec pml;
  Dipole source;
  BoundaryMode boundary_mode = BoundaryMode::pml_only;
  std::optional<ActiveBc> active_bc;

  void validate() const;
};

// Complex coordinate stretching factors at cell centres and edges.
struct Stretch {
  std::vector<cd> sx_c, sx_e, sy_c, sy_e;
};
Stretch make_stretch(const RasterGrid& g, const PmlSpec& pml, double omega, bool along_x = true,
                     bool along_y = true);

struct LinearSystem {
  Eigen::SparseMatrix<cd> A;
  Eigen::VectorXcd b;
  std::vector<int> unknown_of_cell;  // -1 for cells removed behind active planes
  std::vector<int> cell_of_unknown;
};

LinearSystem assemble(const FdfdProblem& p);
// Right-hand side for an already assembled operator.
Eigen::VectorXcd assemble_rhs(const FdfdProblem& p, const LinearSystem& sys);

struct FieldSolution {
  std::shared_ptr<const RasterGrid> grid;
  double omega = 0.0;
  int pml_cells = 0;
  PmlSpec pml;
  Dipole source;
  BoundaryMode boundary_mode = BoundaryMode::pml_only;
  std::optional<ActiveBc> active_bc;
  std::vector<unsigned char> dead;  // per cell
  std::vector<cd> hz;               // nx * ny
  std::vector<cd> ey;               // (nx + 1) * ny
  std::vector<cd> ex;               // nx * (ny + 1)
  double residual = 0.0;

  int nx() const { return grid->nx; }
  int ny() const { return grid->ny; }
  cd H(int i, int j) const { return hz[i + grid->nx * j]; }
  cd Ey(int i, int j) const { return ey[i + (grid->nx + 1) * j]; }
  cd Ex(int i, int j) const { return ex[i + grid->nx * j]; }
  bool in_pml_cell(int i, int j) const;
  double max_abs_e() const;
};

// Sparse LU factorization of one operator, reusable across right-hand sides.
class FdfdSolver {
 public:
  explicit FdfdSolver(const FdfdProblem& structure);
  ~FdfdSolver();
  FdfdSolver(const FdfdSolver&) = delete;
  FdfdSolver& operator=(const FdfdSolver&) = delete;

  // Solves a problem that shares grid, frequency, PML and boundary layout.
  FieldSolution solve(const FdfdProblem& p) const;
  int unknowns() const { return static_cast<int>(sys_.cell_of_unknown.size()); }
  double factor_seconds() const { return factor_seconds_; }

 private:
  FdfdProblem structure_;
  LinearSystem sys_;
  std::vector<int> ap_, ai_;
  std::vector<double> ax_;
  void* numeric_ = nullptr;
  double factor_seconds_ = 0.0;
  bool compatible(const FdfdProblem& p) const;
};

FieldSolution solve(const FdfdProblem& p);

// Electric and magnetic fields from Hz and the source.
void reconstruct_fields(FieldSolution& s, const Stretch& st);

// Dipole edge nearest to (x, y) for the given orientation.
Dipole snap_dipole(const RasterGrid& g, double x, double y, Axis o, cd current = 1.0);

// Standing-wave contrast of the guided wave on both sides of the source.
struct ReflectionResult {
  double contrast = 0.0;
  double contrast_left = 0.0;
  double contrast_right = 0.0;
  std::vector<double> amp_out_right, amp_in_right, amp_out_left, amp_in_left;
};
ReflectionResult reflection_metric(const FieldSolution& s, const BlochMode& mode,
                                   int exclude_periods = 3, int min_periods = 5);

// Field dumps.
void write_field_csv(const FieldSolution& s, const std::string& path);
void write_field_pgm(const FieldSolution& s, const std::string& path, double saturation = 0.995);

}  // namespace pcw
