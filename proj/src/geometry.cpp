#include "pcw/geometry.hpp"

#include <algorithm>
#include <limits>

namespace pcw {

std::string to_string(Axis a) { return a == Axis::x ? "x" : "y"; }

Axis axis_from_string(const std::string& s) {
  if (s == "x") return Axis::x;
  if (s == "y") return Axis::y;
  throw std::invalid_argument("orientation must be x or y, got '" + s + "'");
}

void CrystalGeometry::validate() const {
  if (!(lattice_constant > 0.0)) throw std::invalid_argument("lattice constant must be positive");
  if (!(background_index > 1.0)) throw std::invalid_argument("background index must exceed 1");
  if (has_holes) {
    if (!(hole_radius > 0.0) || !(hole_radius < 0.5))
      throw std::invalid_argument("hole radius must satisfy 0 < r < a/2");
    if (n_rows_half < 1) throw std::invalid_argument("need at least one row of holes per side");
  }
  if (n_periods < 1) throw std::invalid_argument("need at least one period along x");
}

double CrystalGeometry::slab_half_width() const {
  if (!bounded) return std::numeric_limits<double>::infinity();
  return (n_rows_half + 0.5) * kRowPitch;
}

double CrystalGeometry::hole_x(int col, int row) const {
  return col + ((row & 1) ? 0.5 : 0.0);
}

bool CrystalGeometry::row_present(int row) const {
  if (!has_holes) return false;
  if (bounded && std::abs(row) > n_rows_half) return false;
  if (row == 0 && defect == Defect::w1) return false;
  return true;
}

bool CrystalGeometry::in_hole(double x, double y) const {
  if (!has_holes) return false;
  int jc = static_cast<int>(std::lround(y / kRowPitch));
  for (int j = jc - 1; j <= jc + 1; ++j) {
    if (!row_present(j)) continue;
    double off = (j & 1) ? 0.5 : 0.0;
    int ic = static_cast<int>(std::lround(x - off));
    for (int i = ic - 1; i <= ic + 1; ++i) {
      double dx = x - hole_x(i, j), dy = y - hole_y(j);
      if (dx * dx + dy * dy < hole_radius * hole_radius) return true;
    }
  }
  return false;
}

double CrystalGeometry::eps_at(double x, double y) const {
  if (std::abs(y) > slab_half_width()) return 1.0;
  if (in_hole(x, y)) return 1.0;
  return eps_background();
}

std::vector<Hole> CrystalGeometry::holes_in(double x0, double x1, double y0, double y1) const {
  std::vector<Hole> out;
  if (!has_holes) return out;
  int j0 = static_cast<int>(std::floor(y0 / kRowPitch)) - 1;
  int j1 = static_cast<int>(std::ceil(y1 / kRowPitch)) + 1;
  for (int j = j0; j <= j1; ++j) {
    if (!row_present(j)) continue;
    double y = hole_y(j);
    if (y < y0 || y > y1) continue;
    for (int i = static_cast<int>(std::floor(x0)) - 1; i <= static_cast<int>(std::ceil(x1)) + 1;
         ++i) {
      double x = hole_x(i, j);
      if (x >= x0 && x <= x1) out.push_back({i, j, x, y});
    }
  }
  return out;
}

CrystalGeometry build_w1(double a, double r, double n, int m, int l_periods) {
  CrystalGeometry g;
  g.lattice_constant = a;
  g.hole_radius = r;
  g.background_index = n;
  g.defect = Defect::w1;
  g.n_rows_half = m;
  g.n_periods = l_periods;
  g.validate();
  return g;
}

CrystalGeometry build_crystal(double a, double r, double n, int m, int l_periods) {
  CrystalGeometry g = build_w1(a, r, n, m, l_periods);
  g.defect = Defect::none;
  return g;
}

CrystalGeometry uniform_medium(double n) {
  CrystalGeometry g;
  g.background_index = n;
  g.has_holes = false;
  g.bounded = false;
  g.defect = Defect::none;
  g.n_rows_half = 0;
  g.validate();
  return g;
}

namespace {

// Antiderivative of sqrt(r^2 - x^2).
double chord_prim(double x, double r) {
  double t = std::clamp(x / r, -1.0, 1.0);
  double s = std::sqrt(std::max(0.0, r * r - x * x));
  return 0.5 * (x * s + r * r * std::asin(t));
}

double chord_int(double a, double b, double r) {
  if (b <= a) return 0.0;
  return chord_prim(b, r) - chord_prim(a, r);
}

// Area of the disk of radius r at the origin intersected with {x <= X, y <= Y}.
double quadrant_area(double X, double Y, double r) {
  if (X <= -r || Y <= -r) return 0.0;
  X = std::min(X, r);
  if (Y >= r) return 2.0 * chord_int(-r, X, r);
  double xb = std::sqrt(std::max(0.0, r * r - Y * Y));
  double inner = 0.0;
  double lo = -xb, hi = std::min(X, xb);
  if (hi > lo) inner = Y * (hi - lo) + chord_int(lo, hi, r);
  if (Y < 0.0) return inner;
  double left = 2.0 * chord_int(-r, std::min(X, -xb), r);
  double right = X > xb ? 2.0 * chord_int(xb, X, r) : 0.0;
  return left + inner + right;
}

}  // namespace

double disk_rect_area(double cx, double cy, double r, double x0, double x1, double y0,
                      double y1) {
  x0 -= cx;
  x1 -= cx;
  y0 -= cy;
  y1 -= cy;
  if (x1 <= x0 || y1 <= y0) return 0.0;
  // Canonical orientation so that mirrored inputs give bitwise identical results.
  if (x0 + x1 < 0.0) {
    double t = x0;
    x0 = -x1;
    x1 = -t;
  }
  if (y0 + y1 < 0.0) {
    double t = y0;
    y0 = -y1;
    y1 = -t;
  }
  double nx = std::clamp(0.0, x0, x1), ny = std::clamp(0.0, y0, y1);
  if (nx * nx + ny * ny >= r * r) return 0.0;
  double fx = std::max(std::abs(x0), std::abs(x1)), fy = std::max(std::abs(y0), std::abs(y1));
  if (fx * fx + fy * fy <= r * r) return (x1 - x0) * (y1 - y0);
  return quadrant_area(x1, y1, r) - quadrant_area(x0, y1, r) - quadrant_area(x1, y0, r) +
         quadrant_area(x0, y0, r);
}

namespace {

long long half_units(double v, int res, const char* what) {
  double h = v * 2.0 * res;
  double rh = std::round(h);
  if (std::abs(h - rh) > 1e-9) throw std::invalid_argument(std::string(what) +
                                                          " must be a multiple of half a cell");
  return static_cast<long long>(rh);
}

// Average permittivity over the square cell of side d centred at half-unit
// coordinates (X, Y) relative to the grid origin (X0, Y0).
double cell_eps(const CrystalGeometry& g, int res, long long X, long long Y, long long X0,
                long long Y0) {
  const double d = 1.0 / res;
  const double two_res = 2.0 * res;
  const double eb = g.eps_background();
  double ys = static_cast<double>(Y + Y0) / two_res;
  double ylo = ys - 0.5 * d, yhi = ys + 0.5 * d;
  double yc = g.slab_half_width();
  double slo = std::max(ylo, -yc), shi = std::min(yhi, yc);
  if (shi <= slo) return 1.0;
  double slab_frac = (shi - slo) / d;
  if (!g.has_holes) return 1.0 + (eb - 1.0) * slab_frac;

  const double r = g.hole_radius;
  double areas[8];
  int na = 0;
  int j0 = static_cast<int>(std::floor((ys - r - d) / kRowPitch));
  int j1 = static_cast<int>(std::ceil((ys + r + d) / kRowPitch));
  double xs_abs = static_cast<double>(X + X0) / two_res;
  for (int j = j0; j <= j1; ++j) {
    if (!g.row_present(j)) continue;
    double dy = ys - g.hole_y(j);
    if (std::abs(dy) > r + d) continue;
    long long off = (j & 1) ? res : 0;  // half-period shift in half units
    int i0 = static_cast<int>(std::floor(xs_abs - r - d)) - 1;
    int i1 = static_cast<int>(std::ceil(xs_abs + r + d)) + 1;
    for (int i = i0; i <= i1; ++i) {
      long long hx = 2LL * res * i + off - X0;
      double dx = static_cast<double>(X - hx) / two_res;
      if (std::abs(dx) > r + d) continue;
      double hy = g.hole_y(j);
      double a = disk_rect_area(0.0, 0.0, r, dx - 0.5 * d, dx + 0.5 * d, slo - hy, shi - hy);
      if (a > 0.0 && na < 8) areas[na++] = a;
    }
  }
  std::sort(areas, areas + na);
  double air = 0.0;
  for (int k = 0; k < na; ++k) air += areas[k];
  double frac = slab_frac - air / (d * d);
  return std::clamp(1.0 + (eb - 1.0) * frac, 1.0, eb);
}

}  // namespace

RasterGrid rasterize_at(const CrystalGeometry& g, int resolution, int nx, int ny, double x0,
                        double y0) {
  g.validate();
  if (resolution < 8) throw std::invalid_argument("resolution below 8 points per a");
  if (nx < 1 || ny < 1) throw std::invalid_argument("grid must have at least one cell");
  RasterGrid rg;
  rg.resolution = resolution;
  rg.nx = nx;
  rg.ny = ny;
  rg.x0 = x0;
  rg.y0 = y0;
  long long X0 = half_units(x0, resolution, "grid origin x");
  long long Y0 = half_units(y0, resolution, "grid origin y");
  rg.eps_c.resize(static_cast<size_t>(nx) * ny);
  rg.eps_ey.resize(static_cast<size_t>(nx + 1) * ny);
  rg.eps_ex.resize(static_cast<size_t>(nx) * (ny + 1));
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i)
      rg.eps_c[i + nx * j] = cell_eps(g, resolution, 2 * i + 1, 2 * j + 1, X0, Y0);
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i <= nx; ++i)
      rg.eps_ey[i + (nx + 1) * j] = cell_eps(g, resolution, 2 * i, 2 * j + 1, X0, Y0);
  for (int j = 0; j <= ny; ++j)
    for (int i = 0; i < nx; ++i)
      rg.eps_ex[i + nx * j] = cell_eps(g, resolution, 2 * i + 1, 2 * j, X0, Y0);
  return rg;
}

RasterGrid rasterize(const CrystalGeometry& g, int resolution, int nx, int ny) {
  return rasterize_at(g, resolution, nx, ny, -0.5 * nx / resolution, -0.5 * ny / resolution);
}

}  // namespace pcw
