#include "pcw/emission.hpp"

#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <sstream>
#include <tuple>

#include "pcw/io.hpp"

namespace pcw {

namespace {

int grid_line(double v, double origin, double d, const char* what) {
  double t = (v - origin) / d;
  double r = std::round(t);
  if (std::abs(t - r) > 1e-7) throw std::invalid_argument(std::string(what) + " is not on a grid line");
  return static_cast<int>(r);
}

struct BoxIndex {
  int i0, i1, j0, j1;
};

BoxIndex index_box(const FieldSolution& s, const FluxBox& b) {
  const RasterGrid& g = *s.grid;
  if (!(b.x_lo < b.x_hi && b.y_lo < b.y_hi)) throw std::invalid_argument("flux box is empty");
  BoxIndex k{grid_line(b.x_lo, g.x0, g.d(), "box x_lo"), grid_line(b.x_hi, g.x0, g.d(), "box x_hi"),
             grid_line(b.y_lo, g.y0, g.d(), "box y_lo"), grid_line(b.y_hi, g.y0, g.d(), "box y_hi")};
  if (k.i0 < 1 || k.i1 > g.nx - 1 || k.j0 < 1 || k.j1 > g.ny - 1)
    throw std::invalid_argument("flux box leaves the grid");
  return k;
}

void check_cell(const FieldSolution& s, int i, int j) {
  if (s.in_pml_cell(i, j)) throw std::invalid_argument("flux box intersects the PML");
  if (!s.dead.empty() && s.dead[i + s.nx() * j])
    throw std::invalid_argument("flux box crosses cells behind a termination plane");
}

// Source edge as (column or row line, cell index along the line).
std::pair<int, int> source_edge(const FieldSolution& s) {
  const RasterGrid& g = *s.grid;
  const double d = g.d();
  if (s.source.orientation == Axis::y)
    return {static_cast<int>(std::lround((s.source.x - g.x0) / d)),
            static_cast<int>(std::floor((s.source.y - g.y0) / d))};
  return {static_cast<int>(std::lround((s.source.y - g.y0) / d)),
          static_cast<int>(std::floor((s.source.x - g.x0) / d))};
}

double x_face(const FieldSolution& s, int I, int j0, int j1) {
  const double d = s.grid->d();
  auto [line, cell] = source_edge(s);
  double acc = 0.0;
  for (int j = j0; j < j1; ++j) {
    check_cell(s, I - 1, j);
    check_cell(s, I, j);
    if (s.source.orientation == Axis::y && line == I && cell == j)
      throw std::invalid_argument("flux box runs along the source edge");
    cd h = 0.5 * (s.H(I - 1, j) + s.H(I, j));
    acc += 0.5 * (s.Ey(I, j) * std::conj(h)).real() * d;
  }
  return acc;
}

double y_face(const FieldSolution& s, int J, int i0, int i1) {
  const double d = s.grid->d();
  auto [line, cell] = source_edge(s);
  double acc = 0.0;
  for (int i = i0; i < i1; ++i) {
    check_cell(s, i, J - 1);
    check_cell(s, i, J);
    if (s.source.orientation == Axis::x && line == J && cell == i)
      throw std::invalid_argument("flux box runs along the source edge");
    cd h = 0.5 * (s.H(i, J - 1) + s.H(i, J));
    acc -= 0.5 * (s.Ex(i, J) * std::conj(h)).real() * d;
  }
  return acc;
}

}  // namespace

FaceFlux face_flux(const FieldSolution& s, const FluxBox& box) {
  BoxIndex k = index_box(s, box);
  FaceFlux f;
  f.bottom = -y_face(s, k.j0, k.i0, k.i1);
  f.top = y_face(s, k.j1, k.i0, k.i1);
  if (box.faces == Faces::all) {
    f.left = -x_face(s, k.i0, k.j0, k.j1);
    f.right = x_face(s, k.i1, k.j0, k.j1);
  }
  return f;
}

double poynting_flux(const FieldSolution& s, const FluxBox& box) {
  FaceFlux f = face_flux(s, box);
  return box.faces == Faces::all ? f.total() : f.y_normal();
}

double radiated_power(const FieldSolution& s, const FluxBox& box, double slab_half_width) {
  if (box.faces != Faces::exclude_x_normal)
    throw std::invalid_argument("radiation box must exclude the x-normal faces");
  if (box.y_lo > -slab_half_width || box.y_hi < slab_half_width)
    throw std::invalid_argument("radiation box faces lie inside the crystal region");
  return poynting_flux(s, box);
}

namespace {

struct RefKey {
  double omega, n;
  int res;
  Axis o;
  bool operator<(const RefKey& b) const {
    return std::tie(omega, n, res, o) < std::tie(b.omega, b.n, b.res, b.o);
  }
};

double compute_reference(double omega, double n, int res, Axis o) {
  const int half = 2 * res;
  PmlSpec pml;
  pml.cells = res;
  const int N = 2 * (half + pml.cells);
  auto grid = std::make_shared<const RasterGrid>(rasterize(uniform_medium(n), res, N, N));
  FdfdProblem p;
  p.grid = grid;
  p.omega = omega;
  p.pml = pml;
  p.source = snap_dipole(*grid, 0.0, 0.0, o);
  p.boundary_mode = BoundaryMode::pml_only;
  FieldSolution s = solve(p);
  if (!(s.residual < 1e-10)) throw NumericalFailure("reference solve residual too large");
  double p0 = poynting_flux(s, FluxBox{-1.0, 1.0, -1.0, 1.0, Faces::all});
  if (!(p0 > 0.0)) throw NumericalFailure("reference power is not positive");
  return p0;
}

}  // namespace

double reference_power(double omega, double n, int resolution, Axis orientation) {
  static std::mutex mu;
  static std::map<RefKey, double> cache;
  RefKey key{omega, n, resolution, orientation};
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  double p0 = compute_reference(omega, n, resolution, orientation);
  cache.emplace(key, p0);
  return p0;
}

double guided_power(const BlochMode& m, double x, double y, Axis n_d, cd current) {
  if (!(m.norm > 0.0)) throw std::invalid_argument("mode flux must be positive");
  return std::norm(m.projection(x, y, n_d)) * std::norm(current) / (8.0 * m.norm);
}

double purcell_wg(const BlochMode& m, double x, double y, Axis n_d, double p0) {
  if (!(p0 > 0.0)) throw std::invalid_argument("reference power must be positive");
  return guided_power(m, x, y, n_d) / p0;
}

EmissionReport beta_factor(const EmissionInputs& in) {
  if (!(in.p0 > 0.0)) throw NumericalFailure("reference power is not positive");
  if (in.p_total < 0.0 || in.p_rad < 0.0 || in.f_wg < 0.0)
    throw NumericalFailure("negative emitted power");
  EmissionReport r;
  r.omega = in.omega;
  r.n_g = in.n_g;
  r.x = in.x;
  r.y = in.y;
  r.n_d = in.n_d;
  r.p_total = in.p_total;
  r.p_rad = in.p_rad;
  r.p0 = in.p0;
  r.f_wg = in.f_wg;
  r.f_rad = in.p_rad / in.p0;
  r.f_total = in.p_total / in.p0;
  double den = r.f_wg + r.f_rad;
  r.beta = den > 0.0 ? r.f_wg / den : 0.0;
  r.beta_prime = in.p_total > 0.0 ? 1.0 - in.p_rad / in.p_total : 0.0;
  r.beta_discrepancy = std::abs(r.beta - r.beta_prime);
  return r;
}

std::string report_csv_header() {
  return "omega,n_g,x,y,n_d,boundary,P_total,P_rad,P0,F_wg,F_rad,F_total,beta,beta_prime,"
         "beta_discrepancy,P_wg_flux,a0_closure,reflection,residual";
}

std::string report_csv_row(const EmissionReport& r) {
  std::ostringstream os;
  os << sci(r.omega) << ',' << sci(r.n_g) << ',' << sci(r.x) << ',' << sci(r.y) << ','
     << to_string(r.n_d) << ',' << r.boundary << ',' << sci(r.p_total) << ',' << sci(r.p_rad)
     << ',' << sci(r.p0) << ',' << sci(r.f_wg) << ',' << sci(r.f_rad) << ',' << sci(r.f_total)
     << ',' << sci(r.beta) << ',' << sci(r.beta_prime) << ',' << sci(r.beta_discrepancy) << ','
     << sci(r.p_wg_flux) << ',' << sci(r.a0_closure) << ',' << sci(r.reflection) << ','
     << sci(r.residual);
  return os.str();
}

}  // namespace pcw
