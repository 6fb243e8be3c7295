#include "pcw/fdfd.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include <umfpack.h>

#include "pcw/io.hpp"

namespace pcw {

std::string to_string(BoundaryMode m) { return m == BoundaryMode::active ? "active" : "pml_only"; }

BoundaryMode boundary_from_string(const std::string& s) {
  if (s == "active") return BoundaryMode::active;
  if (s == "pml_only") return BoundaryMode::pml_only;
  throw std::invalid_argument("boundary mode must be active or pml_only, got '" + s + "'");
}

namespace {

int exact_cells(double v, int res, const char* what) {
  double c = v * res;
  double r = std::round(c);
  if (std::abs(c - r) > 1e-9)
    throw std::invalid_argument(std::string(what) + " is not a whole number of cells");
  return static_cast<int>(r);
}

}  // namespace

double DomainLayout::physical_half_height(const CrystalGeometry& g) const {
  double yc = g.bounded ? g.slab_half_width() : 0.0;
  return std::ceil((yc + air_pad) * resolution - 1e-9) / resolution;
}

int DomainLayout::nx() const {
  return 2 * (exact_cells(plane_x(), resolution, "termination plane") + pml.cells);
}

int DomainLayout::ny(const CrystalGeometry& g) const {
  return 2 * (static_cast<int>(std::lround(physical_half_height(g) * resolution)) + pml.cells);
}

RasterGrid DomainLayout::raster(const CrystalGeometry& g) const {
  if (resolution < 8) throw std::invalid_argument("resolution below 8 points per a");
  if (l_periods < 3) throw std::invalid_argument("domain needs at least three periods");
  return rasterize(g, resolution, nx(), ny(g));
}

RasterGrid DomainLayout::cell_raster(const CrystalGeometry& g) const {
  int n = ny(g);
  return rasterize_at(g, resolution, resolution, n, 0.0, -0.5 * n / resolution);
}

CellSampling DomainLayout::sampling(const CrystalGeometry& g) const {
  CellSampling s;
  s.resolution = resolution;
  s.ny = ny(g);
  s.y0 = -0.5 * s.ny / resolution;
  return s;
}

Stretch make_stretch(const RasterGrid& g, const PmlSpec& pml, double omega, bool along_x,
                     bool along_y) {
  Stretch st;
  const double d = g.d();
  const double w = 2.0 * kPi * omega;
  const double L = pml.cells * d;
  const double smax = pml.cells > 0 ? -(pml.order + 1.0) * std::log(pml.r0) / (2.0 * L) : 0.0;
  auto s_of = [&](double u) {
    if (pml.cells <= 0 || u <= 0.0) return cd(1.0);
    double sig = smax * std::pow(std::min(u / L, 1.0), pml.order);
    return cd(1.0, sig / w);
  };
  auto depth = [&](double v, double lo, double hi) {
    return std::max({lo + L - v, v - (hi - L), 0.0});
  };
  st.sx_c.resize(g.nx);
  st.sx_e.resize(g.nx + 1);
  st.sy_c.resize(g.ny);
  st.sy_e.resize(g.ny + 1);
  for (int i = 0; i < g.nx; ++i) st.sx_c[i] = along_x ? s_of(depth(g.xc(i), g.x0, g.x_max())) : 1.0;
  for (int i = 0; i <= g.nx; ++i) st.sx_e[i] = along_x ? s_of(depth(g.xe(i), g.x0, g.x_max())) : 1.0;
  for (int j = 0; j < g.ny; ++j) st.sy_c[j] = along_y ? s_of(depth(g.yc(j), g.y0, g.y_max())) : 1.0;
  for (int j = 0; j <= g.ny; ++j) st.sy_e[j] = along_y ? s_of(depth(g.ye(j), g.y0, g.y_max())) : 1.0;
  return st;
}

namespace {

struct PlaneLayout {
  bool active = false;
  int i_minus = 0, i_plus = 0;  // edge columns
  int j_lo = 0, j_hi = 0;       // constrained rows [j_lo, j_hi)
};

PlaneLayout plane_layout(const FdfdProblem& p) {
  PlaneLayout pl;
  if (p.boundary_mode != BoundaryMode::active) return pl;
  const RasterGrid& g = *p.grid;
  const ActiveBc& bc = *p.active_bc;
  pl.active = true;
  pl.i_minus = static_cast<int>(std::lround((bc.x_minus - g.x0) / g.d()));
  pl.i_plus = static_cast<int>(std::lround((bc.x_plus - g.x0) / g.d()));
  pl.j_lo = g.ny;
  pl.j_hi = 0;
  for (int j = 0; j < g.ny; ++j)
    if (std::abs(g.yc(j)) < bc.y_half) {
      pl.j_lo = std::min(pl.j_lo, j);
      pl.j_hi = std::max(pl.j_hi, j + 1);
    }
  return pl;
}

bool is_dead(const PlaneLayout& pl, int i, int j) {
  return pl.active && j >= pl.j_lo && j < pl.j_hi && (i < pl.i_minus || i >= pl.i_plus);
}

struct SourceEdge {
  Axis o;
  int i, j;
};

SourceEdge source_edge(const RasterGrid& g, const Dipole& s) {
  const double d = g.d();
  SourceEdge e{s.orientation, 0, 0};
  double fx = (s.x - g.x0) / d, fy = (s.y - g.y0) / d;
  if (s.orientation == Axis::y) {
    e.i = static_cast<int>(std::lround(fx));
    e.j = static_cast<int>(std::lround(fy - 0.5));
    if (std::abs(fx - e.i) > 1e-6 || std::abs(fy - 0.5 - e.j) > 1e-6)
      throw std::invalid_argument("y dipole is not on a vertical grid edge");
  } else {
    e.i = static_cast<int>(std::lround(fx - 0.5));
    e.j = static_cast<int>(std::lround(fy));
    if (std::abs(fx - 0.5 - e.i) > 1e-6 || std::abs(fy - e.j) > 1e-6)
      throw std::invalid_argument("x dipole is not on a horizontal grid edge");
  }
  return e;
}

}  // namespace

void FdfdProblem::validate() const {
  if (!grid) throw std::invalid_argument("problem has no grid");
  if (!(omega > 0.0)) throw std::invalid_argument("frequency must be positive");
  if (pml.cells < 0 || 2 * pml.cells >= std::min(grid->nx, grid->ny))
    throw std::invalid_argument("PML does not fit the grid");
  if (pml.cells > 0 && !(pml.r0 > 0.0 && pml.r0 < 1.0))
    throw std::invalid_argument("PML target reflection must lie in (0, 1)");
  SourceEdge e = source_edge(*grid, source);
  int ci = e.o == Axis::y ? e.i : e.i;
  int cj = e.j;
  if (ci <= pml.cells || ci >= grid->nx - pml.cells || cj <= pml.cells ||
      cj >= grid->ny - pml.cells)
    throw std::invalid_argument("dipole lies inside the PML");
  if (boundary_mode == BoundaryMode::active) {
    if (!active_bc) throw std::invalid_argument("active boundaries need boundary data");
    if (std::abs(active_bc->mode_omega - omega) > 1e-10)
      throw std::invalid_argument("boundary mode frequency differs from problem frequency");
    if (static_cast<int>(active_bc->ey_plus.size()) != grid->ny ||
        static_cast<int>(active_bc->ey_minus.size()) != grid->ny)
      throw std::invalid_argument("boundary data does not match the grid rows");
    if (!(source.x > active_bc->x_minus && source.x < active_bc->x_plus))
      throw std::invalid_argument("dipole lies outside the termination planes");
  }
}

LinearSystem assemble(const FdfdProblem& p) {
  p.validate();
  const RasterGrid& g = *p.grid;
  const int nx = g.nx, ny = g.ny;
  const double d = g.d(), d2 = d * d;
  const double w = 2.0 * kPi * p.omega;
  Stretch st = make_stretch(g, p.pml, p.omega);
  PlaneLayout pl = plane_layout(p);

  LinearSystem sys;
  sys.unknown_of_cell.assign(static_cast<size_t>(nx) * ny, -1);
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i)
      if (!is_dead(pl, i, j)) {
        sys.unknown_of_cell[i + nx * j] = static_cast<int>(sys.cell_of_unknown.size());
        sys.cell_of_unknown.push_back(i + nx * j);
      }
  const int n = static_cast<int>(sys.cell_of_unknown.size());
  std::vector<Eigen::Triplet<cd>> trip;
  trip.reserve(static_cast<size_t>(n) * 5);
  for (int u = 0; u < n; ++u) {
    int c = sys.cell_of_unknown[u];
    int i = c % nx, j = c / nx;
    cd diag = w * w * st.sx_c[i] * st.sy_c[j];
    auto couple = [&](int ni, int nj, cd coef) {
      if (ni < 0 || ni >= nx || nj < 0 || nj >= ny) {
        diag -= coef;  // Hz = 0 beyond the outer boundary
        return;
      }
      if (is_dead(pl, ni, nj)) return;  // plane edge or PEC wall
      diag -= coef;
      trip.emplace_back(u, sys.unknown_of_cell[ni + nx * nj], coef);
    };
    cd cl = st.sy_c[j] / (g.eey(i, j) * st.sx_e[i] * d2);
    cd cr = st.sy_c[j] / (g.eey(i + 1, j) * st.sx_e[i + 1] * d2);
    cd cb = st.sx_c[i] / (g.eex(i, j) * st.sy_e[j] * d2);
    cd ct = st.sx_c[i] / (g.eex(i, j + 1) * st.sy_e[j + 1] * d2);
    couple(i - 1, j, cl);
    couple(i + 1, j, cr);
    couple(i, j - 1, cb);
    couple(i, j + 1, ct);
    trip.emplace_back(u, u, diag);
  }
  sys.A.resize(n, n);
  sys.A.setFromTriplets(trip.begin(), trip.end());
  sys.A.makeCompressed();
  sys.b = assemble_rhs(p, sys);
  return sys;
}

Eigen::VectorXcd assemble_rhs(const FdfdProblem& p, const LinearSystem& sys) {
  p.validate();
  const RasterGrid& g = *p.grid;
  const int nx = g.nx;
  const double d = g.d();
  const double w = 2.0 * kPi * p.omega;
  Stretch st = make_stretch(g, p.pml, p.omega);
  PlaneLayout pl = plane_layout(p);
  Eigen::VectorXcd b = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(sys.cell_of_unknown.size()));
  auto add = [&](int i, int j, cd v) {
    int u = sys.unknown_of_cell[i + nx * j];
    if (u < 0) throw std::invalid_argument("source touches a removed cell");
    b(u) += v;
  };
  SourceEdge e = source_edge(g, p.source);
  const cd J = p.source.current / (d * d);
  if (e.o == Axis::y) {
    double eps = g.eey(e.i, e.j);
    add(e.i, e.j, st.sy_c[e.j] * J / (eps * d));
    add(e.i - 1, e.j, -st.sy_c[e.j] * J / (eps * d));
  } else {
    double eps = g.eex(e.i, e.j);
    add(e.i, e.j, -st.sx_c[e.i] * J / (eps * d));
    add(e.i, e.j - 1, st.sx_c[e.i] * J / (eps * d));
  }
  if (pl.active) {
    const ActiveBc& bc = *p.active_bc;
    const cd iw(0.0, w);
    for (int j = pl.j_lo; j < pl.j_hi; ++j) {
      add(pl.i_minus, j, st.sy_c[j] * iw * bc.ey_minus[j] / d);
      add(pl.i_plus - 1, j, -st.sy_c[j] * iw * bc.ey_plus[j] / d);
    }
  }
  return b;
}

bool FieldSolution::in_pml_cell(int i, int j) const {
  return i < pml_cells || i >= grid->nx - pml_cells || j < pml_cells || j >= grid->ny - pml_cells;
}

double FieldSolution::max_abs_e() const {
  double m = 0.0;
  for (auto& z : ex) m = std::max(m, std::abs(z));
  for (auto& z : ey) m = std::max(m, std::abs(z));
  return m;
}

void reconstruct_fields(FieldSolution& s, const Stretch& st) {
  const RasterGrid& g = *s.grid;
  const int nx = g.nx, ny = g.ny;
  const double d = g.d();
  const cd iw(0.0, 2.0 * kPi * s.omega);
  PlaneLayout pl;
  if (s.boundary_mode == BoundaryMode::active && s.active_bc) {
    FdfdProblem tmp;
    tmp.grid = s.grid;
    tmp.boundary_mode = s.boundary_mode;
    tmp.active_bc = s.active_bc;
    pl = plane_layout(tmp);
  }
  auto dead = [&](int i, int j) { return s.dead[i + nx * j] != 0; };
  auto h = [&](int i, int j) -> cd {
    if (i < 0 || i >= nx || j < 0 || j >= ny) return 0.0;
    return s.hz[i + nx * j];
  };
  SourceEdge e = source_edge(g, s.source);
  const cd J = s.source.current / (d * d);
  s.ey.assign(static_cast<size_t>(nx + 1) * ny, 0.0);
  s.ex.assign(static_cast<size_t>(nx) * (ny + 1), 0.0);
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i <= nx; ++i) {
      bool dl = i > 0 && dead(i - 1, j), dr = i < nx && dead(i, j);
      cd val = 0.0;
      if (pl.active && j >= pl.j_lo && j < pl.j_hi && (i == pl.i_minus || i == pl.i_plus)) {
        val = i == pl.i_minus ? s.active_bc->ey_minus[j] : s.active_bc->ey_plus[j];
      } else if (!dl && !dr) {
        cd F = (h(i, j) - h(i - 1, j)) / (g.eey(i, j) * st.sx_e[i] * d);
        if (e.o == Axis::y && e.i == i && e.j == j) F += J / g.eey(i, j);
        val = F / iw;
      }
      s.ey[i + static_cast<size_t>(nx + 1) * j] = val;
    }
  for (int j = 0; j <= ny; ++j)
    for (int i = 0; i < nx; ++i) {
      bool db = j > 0 && dead(i, j - 1), dt = j < ny && dead(i, j);
      if (db || dt) continue;
      cd G = (h(i, j) - h(i, j - 1)) / (g.eex(i, j) * st.sy_e[j] * d);
      cd val = -G;
      if (e.o == Axis::x && e.i == i && e.j == j) val += J / g.eex(i, j);
      s.ex[i + static_cast<size_t>(nx) * j] = val / iw;
    }
}

namespace {

std::string operator_key(const FdfdProblem& p) {
  std::ostringstream os;
  os.precision(17);
  os << p.grid.get() << '|' << p.omega << '|' << p.pml.cells << '|' << p.pml.order << '|'
     << p.pml.r0 << '|' << static_cast<int>(p.boundary_mode);
  if (p.boundary_mode == BoundaryMode::active && p.active_bc)
    os << '|' << p.active_bc->x_minus << '|' << p.active_bc->x_plus << '|' << p.active_bc->y_half;
  return os.str();
}

}  // namespace

FdfdSolver::FdfdSolver(const FdfdProblem& structure) : structure_(structure) {
  auto t0 = std::chrono::steady_clock::now();
  sys_ = assemble(structure_);
  const int n = static_cast<int>(sys_.A.rows());
  ap_.assign(sys_.A.outerIndexPtr(), sys_.A.outerIndexPtr() + n + 1);
  ai_.assign(sys_.A.innerIndexPtr(), sys_.A.innerIndexPtr() + sys_.A.nonZeros());
  ax_.resize(2 * static_cast<size_t>(sys_.A.nonZeros()));
  for (Eigen::Index k = 0; k < sys_.A.nonZeros(); ++k) {
    ax_[2 * k] = sys_.A.valuePtr()[k].real();
    ax_[2 * k + 1] = sys_.A.valuePtr()[k].imag();
  }
  double control[UMFPACK_CONTROL], info[UMFPACK_INFO];
  umfpack_zi_defaults(control);
  void* symbolic = nullptr;
  int st = umfpack_zi_symbolic(n, n, ap_.data(), ai_.data(), ax_.data(), nullptr, &symbolic,
                               control, info);
  if (st != UMFPACK_OK)
    throw std::runtime_error("sparse symbolic factorization failed (status " + std::to_string(st) +
                             ", " + std::to_string(n) + " unknowns)");
  st = umfpack_zi_numeric(ap_.data(), ai_.data(), ax_.data(), nullptr, symbolic, &numeric_,
                          control, info);
  umfpack_zi_free_symbolic(&symbolic);
  if (st != UMFPACK_OK) {
    if (numeric_) umfpack_zi_free_numeric(&numeric_);
    std::string why = st == UMFPACK_ERROR_out_of_memory ? "out of memory"
                      : st == UMFPACK_WARNING_singular_matrix ? "singular operator"
                                                              : "status " + std::to_string(st);
    throw std::runtime_error("sparse LU factorization failed: " + why + " (" + std::to_string(n) +
                             " unknowns)");
  }
  factor_seconds_ =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

FdfdSolver::~FdfdSolver() {
  if (numeric_) umfpack_zi_free_numeric(&numeric_);
}

bool FdfdSolver::compatible(const FdfdProblem& p) const {
  return operator_key(p) == operator_key(structure_);
}

FieldSolution FdfdSolver::solve(const FdfdProblem& p) const {
  if (!compatible(p)) throw std::invalid_argument("problem does not match the factorized operator");
  Eigen::VectorXcd b = assemble_rhs(p, sys_);
  const int n = static_cast<int>(b.size());
  Eigen::VectorXcd x(n);
  double control[UMFPACK_CONTROL], info[UMFPACK_INFO];
  umfpack_zi_defaults(control);
  int st = umfpack_zi_solve(UMFPACK_A, ap_.data(), ai_.data(), ax_.data(), nullptr,
                            reinterpret_cast<double*>(x.data()), nullptr,
                            reinterpret_cast<const double*>(b.data()), nullptr, numeric_, control,
                            info);
  if (st != UMFPACK_OK) throw std::runtime_error("sparse triangular solve failed");
  FieldSolution s;
  s.grid = p.grid;
  s.omega = p.omega;
  s.pml_cells = p.pml.cells;
  s.pml = p.pml;
  s.source = p.source;
  s.boundary_mode = p.boundary_mode;
  s.active_bc = p.active_bc;
  double bn = b.norm();
  s.residual = bn > 0 ? (sys_.A * x - b).norm() / bn : 0.0;
  const RasterGrid& g = *p.grid;
  s.hz.assign(static_cast<size_t>(g.nx) * g.ny, 0.0);
  s.dead.assign(static_cast<size_t>(g.nx) * g.ny, 1);
  for (int u = 0; u < n; ++u) {
    s.hz[sys_.cell_of_unknown[u]] = x(u);
    s.dead[sys_.cell_of_unknown[u]] = 0;
  }
  reconstruct_fields(s, make_stretch(g, p.pml, p.omega));
  return s;
}

FieldSolution solve(const FdfdProblem& p) {
  FdfdSolver solver(p);
  return solver.solve(p);
}

Dipole snap_dipole(const RasterGrid& g, double x, double y, Axis o, cd current) {
  const double d = g.d();
  Dipole dp;
  dp.orientation = o;
  dp.current = current;
  if (o == Axis::y) {
    dp.x = g.x0 + std::lround((x - g.x0) / d) * d;
    dp.y = g.y0 + (std::floor((y - g.y0) / d) + 0.5) * d;
  } else {
    dp.x = g.x0 + (std::floor((x - g.x0) / d) + 0.5) * d;
    dp.y = g.y0 + std::lround((y - g.y0) / d) * d;
  }
  return dp;
}

namespace {

// Bilinear flux form across the vertical edge column e between two Hz fields
// given as functions of the cell index.
template <class U, class V>
cd wronskian(const FieldSolution& s, const Stretch& st, int e, U u, V v) {
  const RasterGrid& g = *s.grid;
  const double d2 = g.d() * g.d();
  cd acc = 0.0;
  for (int j = 0; j < g.ny; ++j) {
    cd c = st.sy_c[j] / (g.eey(e, j) * st.sx_e[e] * d2);
    acc += c * (u(e - 1, j) * v(e, j) - v(e - 1, j) * u(e, j));
  }
  return acc;
}

}  // namespace

ReflectionResult reflection_metric(const FieldSolution& s, const BlochMode& mode,
                                   int exclude_periods, int min_periods) {
  const RasterGrid& g = *s.grid;
  CellSampling gs{g.resolution, g.ny, g.y0};
  if (mode.sampling != gs) throw std::invalid_argument("mode sampling does not match the grid");
  const int res = g.resolution;
  Stretch st = make_stretch(g, s.pml, s.omega);
  auto field = [&](int i, int j) { return s.hz[i + g.nx * j]; };
  auto hp = [&](int i, int j) { return mode.hz_at(g.xc(i), g.yc(j)); };
  auto hm = [&](int i, int j) { return std::conj(mode.hz_at(g.xc(i), g.yc(j))); };

  // Usable columns: at least one cell clear of the planes or the x PML.
  double xlo, xhi;
  if (s.boundary_mode == BoundaryMode::active && s.active_bc) {
    xlo = s.active_bc->x_minus + 1.0;
    xhi = s.active_bc->x_plus - 1.0;
  } else {
    xlo = g.x0 + s.pml_cells * g.d() + 1.0;
    xhi = g.x_max() - s.pml_cells * g.d() - 1.0;
  }
  double xs = std::round(s.source.x);
  ReflectionResult r;
  auto amplitudes = [&](double x) {
    int e = static_cast<int>(std::lround((x - g.x0) * res));
    cd wmp = wronskian(s, st, e, hm, hp);
    cd wpm = -wmp;
    cd a_p = wronskian(s, st, e, hm, field) / wmp;
    cd a_m = wronskian(s, st, e, hp, field) / wpm;
    return std::pair<double, double>(std::abs(a_p), std::abs(a_m));
  };
  for (int p = exclude_periods; xs + p <= xhi; ++p) {
    auto [ap, am] = amplitudes(xs + p);
    r.amp_out_right.push_back(ap);
    r.amp_in_right.push_back(am);
  }
  for (int p = exclude_periods; xs - p >= xlo; ++p) {
    auto [ap, am] = amplitudes(xs - p);
    r.amp_in_left.push_back(ap);
    r.amp_out_left.push_back(am);
  }
  if (static_cast<int>(r.amp_out_right.size()) < min_periods ||
      static_cast<int>(r.amp_out_left.size()) < min_periods)
    throw std::invalid_argument("waveguide too short for the reflection sampling span");
  auto contrast = [](const std::vector<double>& out, const std::vector<double>& in) {
    double worst = 0.0;
    for (size_t i = 0; i < out.size(); ++i) {
      double a = out[i], b = in[i];
      double den = a * a + b * b;
      if (den > 0) worst = std::max(worst, 2.0 * a * b / den);
    }
    return worst;
  };
  r.contrast_right = contrast(r.amp_out_right, r.amp_in_right);
  r.contrast_left = contrast(r.amp_out_left, r.amp_in_left);
  r.contrast = std::max(r.contrast_left, r.contrast_right);
  return r;
}

void write_field_csv(const FieldSolution& s, const std::string& path) {
  const RasterGrid& g = *s.grid;
  std::ostringstream os;
  os << "x,y,re_hz,im_hz,re_ex,im_ex,re_ey,im_ey\n";
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      cd ex = 0.5 * (s.Ex(i, j) + s.Ex(i, j + 1));
      cd ey = 0.5 * (s.Ey(i, j) + s.Ey(i + 1, j));
      cd hz = s.H(i, j);
      os << sci(g.xc(i)) << ',' << sci(g.yc(j)) << ',' << sci(hz.real()) << ','
         << sci(hz.imag()) << ',' << sci(ex.real()) << ',' << sci(ex.imag()) << ','
         << sci(ey.real()) << ',' << sci(ey.imag()) << '\n';
    }
  atomic_write(path, os.str());
}

void write_field_pgm(const FieldSolution& s, const std::string& path, double saturation) {
  const RasterGrid& g = *s.grid;
  std::vector<double> mag(static_cast<size_t>(g.nx) * g.ny);
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      cd ex = 0.5 * (s.Ex(i, j) + s.Ex(i, j + 1));
      cd ey = 0.5 * (s.Ey(i, j) + s.Ey(i + 1, j));
      mag[i + static_cast<size_t>(g.nx) * j] = std::sqrt(std::norm(ex) + std::norm(ey));
    }
  atomic_write(path, encode_pgm(to_gray(mag, g.nx, g.ny, saturation)));
}

}  // namespace pcw
