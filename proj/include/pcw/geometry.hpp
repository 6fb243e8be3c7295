#pragma once

#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

namespace pcw {

using cd = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;
inline const double kRowPitch = std::sqrt(3.0) / 2.0;

enum class Axis { x, y };
enum class Defect { none, w1 };

std::string to_string(Axis a);
Axis axis_from_string(const std::string& s);

struct Hole {
  int col;
  int row;
  double x;
  double y;
};

// Triangular lattice of air holes in a dielectric slab of index n.
// Lengths are in units of the lattice constant. Rows sit at y = j*sqrt(3)/2,
// odd rows are shifted by half a period. The slab ends half a row pitch
// beyond the outermost hole row and is surrounded by air.
struct CrystalGeometry {
  double lattice_constant = 1.0;
  double hole_radius = 0.3;
  double background_index = 3.5;
  Defect defect = Defect::w1;
  int n_rows_half = 4;
  int n_periods = 33;
  bool has_holes = true;
  bool bounded = true;

  void validate() const;
  double eps_background() const { return background_index * background_index; }
  double slab_half_width() const;
  double hole_x(int col, int row) const;
  double hole_y(int row) const { return row * kRowPitch; }
  bool row_present(int row) const;
  bool in_hole(double x, double y) const;
  double eps_at(double x, double y) const;
  std::vector<Hole> holes_in(double x0, double x1, double y0, double y1) const;
};

CrystalGeometry build_w1(double a, double r, double n, int m, int l_periods);
CrystalGeometry build_crystal(double a, double r, double n, int m, int l_periods);
CrystalGeometry uniform_medium(double n);

// Area of the intersection of a disk (center cx, cy; radius r) with the
// rectangle [x0, x1] x [y0, y1].
double disk_rect_area(double cx, double cy, double r, double x0, double x1, double y0,
                      double y1);

// Staggered Yee grid. Hz lives at cell centers (i+1/2, j+1/2), Ey on vertical
// edges (i, j+1/2), Ex on horizontal edges (i+1/2, j). Arrays are row-major
// in x: index = i + nx_of_array * j.
struct RasterGrid {
  int resolution = 0;
  int nx = 0;
  int ny = 0;
  double x0 = 0.0;
  double y0 = 0.0;
  std::vector<double> eps_c;   // nx * ny
  std::vector<double> eps_ey;  // (nx + 1) * ny
  std::vector<double> eps_ex;  // nx * (ny + 1)

  double d() const { return 1.0 / resolution; }
  double xc(int i) const { return x0 + (i + 0.5) * d(); }
  double yc(int j) const { return y0 + (j + 0.5) * d(); }
  double xe(int i) const { return x0 + i * d(); }
  double ye(int j) const { return y0 + j * d(); }
  double x_max() const { return x0 + nx * d(); }
  double y_max() const { return y0 + ny * d(); }
  double ec(int i, int j) const { return eps_c[i + nx * j]; }
  double eey(int i, int j) const { return eps_ey[i + (nx + 1) * j]; }
  double eex(int i, int j) const { return eps_ex[i + nx * j]; }
};

// Grid with nx x ny cells centred on the origin.
RasterGrid rasterize(const CrystalGeometry& g, int resolution, int nx, int ny);

// Grid with an explicit lower-left corner. x0 and y0 must be multiples of half a
// cell so that hole centres land on half-integer grid coordinates.
RasterGrid rasterize_at(const CrystalGeometry& g, int resolution, int nx, int ny, double x0,
                        double y0);

}  // namespace pcw
