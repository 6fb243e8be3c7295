#include <cmath>
#include <complex>

#include "doctest.h"
#include "fixtures.hpp"
#include "pcw/active_bc.hpp"
#include "pcw/fdfd.hpp"

using namespace pcw;

namespace {

std::shared_ptr<const RasterGrid> uniform_grid(double n, int res, int nx, int ny) {
  return std::make_shared<RasterGrid>(rasterize(uniform_medium(n), res, nx, ny));
}

FdfdProblem uniform_problem(std::shared_ptr<const RasterGrid> g, double omega, int pml) {
  FdfdProblem p;
  p.grid = std::move(g);
  p.omega = omega;
  p.pml.cells = pml;
  p.source = snap_dipole(*p.grid, 0.0, 0.0, Axis::y);
  return p;
}

// Field with Hz equal to a combination of the mode and its time reverse.
FieldSolution synthetic_field(const W1Study& st, const BlochMode& m, cd fwd, cd bwd) {
  FieldSolution s;
  s.grid = st.grid();
  s.omega = m.omega;
  s.pml = st.settings().layout.pml;
  s.pml_cells = s.pml.cells;
  s.source = snap_dipole(*s.grid, 0.0, 0.0, Axis::y);
  const RasterGrid& g = *s.grid;
  s.hz.resize(static_cast<size_t>(g.nx) * g.ny);
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      cd h = m.hz_at(g.xc(i), g.yc(j));
      s.hz[i + g.nx * j] = fwd * h + bwd * std::conj(h);
    }
  return s;
}

}  // namespace

TEST_CASE("operator annihilates the discrete plane wave") {
  const double n = 1.5, f = 0.3;
  const int res = 16;
  auto g = uniform_grid(n, res, 64, 48);
  FdfdProblem p = uniform_problem(g, f, 0);
  LinearSystem sys = assemble(p);
  const double d = 1.0 / res, w = 2.0 * kPi * f;
  const double kx = 2.0 / d * std::asin(w * d * n / 2.0);
  Eigen::VectorXcd h(sys.A.rows());
  for (int u = 0; u < h.size(); ++u) {
    int c = sys.cell_of_unknown[u];
    h(u) = std::exp(cd(0.0, kx * g->xc(c % g->nx)));
  }
  Eigen::VectorXcd r = sys.A * h;
  double worst = 0.0, scale = w * w;
  for (int u = 0; u < h.size(); ++u) {
    int c = sys.cell_of_unknown[u];
    int i = c % g->nx, j = c / g->nx;
    if (i == 0 || i == g->nx - 1 || j == 0 || j == g->ny - 1) continue;
    worst = std::max(worst, std::abs(r(u)) / scale);
  }
  CHECK(worst < 1e-10);
}

TEST_CASE("operator structure") {
  auto g = uniform_grid(3.5, 16, 48, 48);
  SUBCASE("lossless operator is real and five-point") {
    LinearSystem sys = assemble(uniform_problem(g, 0.25, 0));
    CHECK(sys.A.imag().norm() == 0.0);
    for (int k = 0; k < sys.A.outerSize(); ++k) {
      int nnz = 0;
      for (Eigen::SparseMatrix<cd>::InnerIterator it(sys.A, k); it; ++it) ++nnz;
      CHECK(nnz <= 5);
    }
  }
  SUBCASE("operator is symmetric with PML") {
    LinearSystem sys = assemble(uniform_problem(g, 0.25, 12));
    Eigen::SparseMatrix<cd> at = sys.A.transpose();
    CHECK((sys.A - at).norm() < 1e-12 * sys.A.norm());
  }
  SUBCASE("invalid problems") {
    CHECK_THROWS_AS(assemble(uniform_problem(g, 0.0, 8)), std::invalid_argument);
    CHECK_THROWS_AS(assemble(uniform_problem(g, 0.25, 24)), std::invalid_argument);
    FdfdProblem p = uniform_problem(g, 0.25, 8);
    p.source = snap_dipole(*g, -1.3, 0.0, Axis::y);
    CHECK_THROWS_AS(assemble(p), std::invalid_argument);
    p = uniform_problem(g, 0.25, 8);
    p.boundary_mode = BoundaryMode::active;
    CHECK_THROWS_AS(assemble(p), std::invalid_argument);
  }
}

TEST_CASE("reciprocity between two edge dipoles in the crystal") {
  CrystalGeometry geo = build_crystal(1.0, 0.3, 3.5, 2, 9);
  DomainLayout lay;
  lay.resolution = 16;
  lay.l_periods = 9;
  lay.pml.cells = 16;
  auto g = std::make_shared<RasterGrid>(lay.raster(geo));
  auto run = [&](int i, int j) {
    FdfdProblem p;
    p.grid = g;
    p.omega = 0.23;
    p.pml = lay.pml;
    p.source = Dipole{g->xe(i), g->yc(j), Axis::y, 1.0};
    return solve(p);
  };
  const int ia = g->nx / 2 + 3, ja = g->ny / 2 + 2;
  const int ib = g->nx / 2 - 21, jb = g->ny / 2 - 13;
  FieldSolution a = run(ia, ja), b = run(ib, jb);
  cd ab = a.Ey(ib, jb), ba = b.Ey(ia, ja);
  CHECK(std::abs(ab) > 0.0);
  CHECK(std::abs(ab - ba) / std::abs(ab) < 1e-6);
  CHECK(a.residual < 1e-10);
}

TEST_CASE("PML reflection in a uniform medium") {
  // Field near the source on a small domain against a domain twice as large.
  const int res = 16, pml = 16;
  const double f = 0.25, n = 3.5;
  auto solve_on = [&](int half_cells) {
    int nx = 2 * half_cells + 2 * pml;
    FdfdProblem p = uniform_problem(uniform_grid(n, res, nx, nx), f, pml);
    return solve(p);
  };
  FieldSolution small = solve_on(3 * res), big = solve_on(6 * res);
  const int off = 3 * res;
  double num = 0.0, den = 0.0;
  for (int j = small.ny() / 2 - res; j < small.ny() / 2 + res; ++j)
    for (int i = small.nx() / 2 - res; i < small.nx() / 2 + res; ++i) {
      cd hs = small.H(i, j), hb = big.H(i + off, j + off);
      num += std::norm(hs - hb);
      den += std::norm(hb);
    }
  CHECK(std::sqrt(num / den) < 1e-4);
}

TEST_CASE("emitted power scales with the square of the current") {
  auto g = uniform_grid(3.5, 16, 96, 96);
  FdfdProblem p = uniform_problem(g, 0.25, 16);
  FdfdSolver solver(p);
  FieldSolution one = solver.solve(p);
  p.source.current = 2.0;
  FieldSolution two = solver.solve(p);
  FluxBox box{-1.0, 1.0, -1.0, 1.0};
  double p1 = poynting_flux(one, box), p2 = poynting_flux(two, box);
  CHECK(p1 > 0.0);
  CHECK(p2 / p1 == doctest::Approx(4.0).epsilon(1e-10));
}

TEST_CASE("active boundary phase and amplitude") {
  const W1Study& st = test::small_w1();
  const BlochMode& m = st.mode(58.0);
  auto [xa, ya] = st.antinode(58.0);
  BcAmplitude bc = bc_amplitude_phase(m, xa, ya, Axis::y);
  CHECK(bc.phi == doctest::Approx(-kPi / 2).epsilon(1e-9));
  CHECK(bc.a0 > 0.0);
  CHECK(bc.a0 * bc.a0 * m.norm * 2.0 == doctest::Approx(guided_power(m, xa, ya, Axis::y)).epsilon(1e-12));

  const RasterGrid& g = *st.grid();
  const double xp = st.settings().layout.plane_x();
  const double yh = 3.0;
  ActiveBc b0 = synthesize_active_bc(m, g, xa, ya, Axis::y, xp, -xp, yh);
  ActiveBc b1 = synthesize_active_bc(m, g, xa + 1.0, ya, Axis::y, xp, -xp, yh);
  CHECK(b1.a0 == doctest::Approx(b0.a0).epsilon(1e-12));
  const cd shift = std::exp(cd(0.0, -2.0 * kPi * m.k));
  double worst = 0.0, peak = 0.0;
  int rows = 0;
  for (int j = 0; j < g.ny; ++j) {
    if (std::abs(g.yc(j)) >= yh) {
      CHECK(b0.ey_plus[j] == cd(0.0));
      continue;
    }
    ++rows;
    peak = std::max(peak, std::abs(b0.ey_plus[j]));
    worst = std::max(worst, std::abs(b1.ey_plus[j] - b0.ey_plus[j] * shift));
    worst = std::max(worst, std::abs(b1.ey_minus[j] - b0.ey_minus[j] * std::conj(shift)));
  }
  CHECK(rows > 0);
  CHECK(worst < 1e-12 * peak);

  RasterGrid other = rasterize(st.settings().geometry, 32, 64, 64);
  CHECK_THROWS_AS(synthesize_active_bc(m, other, 0.0, 0.0, Axis::y, 1.0, -1.0, 1.0),
                  std::invalid_argument);
  CHECK_THROWS_AS(synthesize_active_bc(m, g, xp + 1.0, ya, Axis::y, xp, -xp, yh),
                  std::invalid_argument);
}

TEST_CASE("reflection metric on synthetic fields") {
  const W1Study& st = test::small_w1();
  const BlochMode& m = st.mode(20.0);
  FieldSolution travel = synthetic_field(st, m, 1.0, 0.0);
  CHECK(reflection_metric(travel, m).contrast < 1e-9);
  FieldSolution standing = synthetic_field(st, m, 1.0, 1.0);
  CHECK(reflection_metric(standing, m).contrast == doctest::Approx(1.0).epsilon(1e-9));
  FieldSolution partial = synthetic_field(st, m, 1.0, 0.5);
  CHECK(reflection_metric(partial, m).contrast == doctest::Approx(0.8).epsilon(1e-9));
  CHECK_THROWS_AS(reflection_metric(travel, m, 3, 40), std::invalid_argument);
}

TEST_CASE("active termination suppresses the standing wave") {
  const W1Study& st = test::small_w1();
  auto [xa, ya] = st.antinode(58.0);
  EmitExtras ex;
  ex.reflection = true;
  EmissionReport act = st.emit(58.0, xa, ya, Axis::y, BoundaryMode::active, ex);
  EmissionReport pml = st.emit(58.0, xa, ya, Axis::y, BoundaryMode::pml_only, ex);
  CHECK(act.residual < 1e-10);
  CHECK(act.reflection < 0.1);
  CHECK(act.reflection < pml.reflection);
  st.release_solvers();
}
