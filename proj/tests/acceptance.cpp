// Acceptance suite: one line per criterion, exit status 0 only when all pass.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "pcw/active_bc.hpp"
#include "pcw/emission.hpp"
#include "pcw/fdfd.hpp"
#include "pcw/pwe.hpp"
#include "pcw/sweeps.hpp"

using namespace pcw;

namespace {

// Pinned tolerances and budgets.
constexpr double kDispersionTol = 1e-8;
constexpr double kNestedTol = 0.01;
constexpr double kReciprocityTol = 1e-6;
constexpr double kContrastMax = 0.1;
constexpr double kClosureTol = 0.02;
constexpr double kLinearTol = 0.25;
constexpr double kBetaMin = 0.9;
constexpr double kPcMidgapMax = 0.1;
constexpr double kOutsideGapMin = 0.3;  // averaged F_rad of order one outside the gap
constexpr double kMinimaRatioMax = 2.0;
constexpr double kPlateauTol = 0.05;
constexpr double kDomainTol = 0.05;
constexpr double kBetaDiscrepancyMax = 0.02;
constexpr int kDefaultResolution = 32;
constexpr int kMapResolution = 24;
const std::vector<double> kTargets{5.0, 20.0, 58.0, 120.0};

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

StudySettings w1_settings(int res) {
  StudySettings s;
  s.layout.resolution = res;
  s.layout.pml.cells = res;
  return s;
}

// Edge field of the requested component at the edge a dipole of that
// orientation would occupy.
cd edge_field(const FieldSolution& s, const Dipole& at) {
  const RasterGrid& g = *s.grid;
  const double u = (at.x - g.x0) * g.resolution, v = (at.y - g.y0) * g.resolution;
  if (at.orientation == Axis::y)
    return s.Ey(static_cast<int>(std::lround(u)), static_cast<int>(std::lround(v - 0.5)));
  return s.Ex(static_cast<int>(std::lround(u - 0.5)), static_cast<int>(std::lround(v)));
}

Outcome c1_dispersion() {
  const double n = 3.5;
  auto bs = solve_bands(uniform_medium(n), {0.05, 0.15, 0.25, 0.35, 0.45, 0.5}, 4, 15);
  double worst = 0.0;
  for (size_t i = 0; i < bs.k_points.size(); ++i) {
    double k = bs.k_points[i];
    // Lowest |k + G| / n over the reciprocal lattice of the unit square cell.
    double best = INFINITY;
    for (int gx = -3; gx <= 3; ++gx)
      for (int gy = -3; gy <= 3; ++gy) best = std::min(best, std::hypot(k + gx, double(gy)) / n);
    worst = std::max(worst, std::abs(bs.bands[i][0] - best) / best);
  }
  return {worst <= kDispersionTol, "max relative error " + fmt("%.2e", worst)};
}

Outcome c2_nested_boxes() {
  const int res = kDefaultResolution, pml = kDefaultResolution;
  const double omega = 0.21, n = 3.5;
  const int half = 3 * res;
  FdfdProblem p;
  p.grid = std::make_shared<RasterGrid>(
      rasterize(uniform_medium(n), res, 2 * (half + pml), 2 * (half + pml)));
  p.omega = omega;
  p.pml.cells = pml;
  p.source = snap_dipole(*p.grid, 0.0, 0.0, Axis::y);
  FieldSolution s = solve(p);
  std::vector<double> flux;
  for (double h : {0.5, 1.0, 1.5, 2.0, 2.5}) flux.push_back(poynting_flux(s, FluxBox{-h, h, -h, h}));
  auto [lo, hi] = std::minmax_element(flux.begin(), flux.end());
  double mean = 0.0;
  for (double f : flux) mean += f / flux.size();
  double spread = (*hi - *lo) / mean;
  double analytic = 2.0 * kPi * omega / 16.0;
  return {spread < kNestedTol && *lo > 0.0,
          "spread " + fmt("%.2e", spread) + ", flux/analytic " + fmt("%.5f", mean / analytic)};
}

Outcome c3_reciprocity() {
  const int res = 16;
  CrystalGeometry geo = build_w1(1.0, 0.3, 3.5, 4, 13);
  FdfdProblem p;
  p.grid = std::make_shared<RasterGrid>(rasterize(geo, res, 200, 200));
  p.omega = 0.23;
  p.pml.cells = 16;
  const RasterGrid& g = *p.grid;
  std::vector<Dipole> src;
  for (auto [x, y] : std::vector<std::pair<double, double>>{{0.2, 0.1}, {-2.7, 1.9}, {3.1, -2.4}})
    for (Axis o : {Axis::x, Axis::y}) src.push_back(snap_dipole(g, x, y, o));
  p.source = src[0];
  FdfdSolver solver(p);
  std::vector<FieldSolution> fields;
  double res_max = 0.0;
  for (const Dipole& d : src) {
    p.source = d;
    fields.push_back(solver.solve(p));
    res_max = std::max(res_max, fields.back().residual);
  }
  double worst = 0.0;
  for (size_t a = 0; a < src.size(); ++a)
    for (size_t b = a + 1; b < src.size(); ++b) {
      cd gab = edge_field(fields[a], src[b]), gba = edge_field(fields[b], src[a]);
      double scale = std::max(std::abs(gab), std::abs(gba));
      if (scale > 0.0) worst = std::max(worst, std::abs(gab - gba) / scale);
    }
  return {worst < kReciprocityTol, "max asymmetry " + fmt("%.2e", worst) + " over 15 pairs, residual " +
                                       fmt("%.1e", res_max)};
}

struct ActiveRuns {
  std::vector<double> targets;
  std::vector<EmissionReport> active, pml;
};

ActiveRuns active_runs(const W1Study& st) {
  ActiveRuns r;
  EmitExtras ex;
  ex.reflection = true;
  for (double ng : {58.0, 120.0}) {
    auto [x, y] = st.antinode(ng);
    r.targets.push_back(ng);
    r.active.push_back(st.emit(ng, x, y, Axis::y, BoundaryMode::active, ex));
    r.pml.push_back(st.emit(ng, x, y, Axis::y, BoundaryMode::pml_only, ex));
    st.release_solvers();
  }
  return r;
}

Outcome c4_active_bc(const ActiveRuns& r) {
  Outcome o{true, ""};
  for (size_t i = 0; i < r.targets.size(); ++i) {
    double a = r.active[i].reflection, p = r.pml[i].reflection;
    o.pass = o.pass && a < kContrastMax && a < p;
    o.detail += "n_g " + fmt("%g", r.targets[i]) + ": active " + fmt("%.2e", a) + " pml_only " +
                fmt("%.3f", p) + "; ";
  }
  return o;
}

Outcome c5_closure(const ActiveRuns& r) {
  Outcome o{true, ""};
  for (size_t i = 0; i < r.targets.size(); ++i) {
    double c = r.active[i].a0_closure;
    o.pass = o.pass && c < kClosureTol;
    o.detail += "n_g " + fmt("%g", r.targets[i]) + ": closure " + fmt("%.2e", c) + "; ";
  }
  return o;
}

Outcome c6_linear(const W1Study& st) {
  std::vector<double> ratio;
  std::string detail;
  for (double ng : kTargets) {
    const BlochMode& m = st.mode(ng);
    auto [x, y] = st.antinode(ng);
    double f = purcell_wg(m, x, y, Axis::y, st.p0(ng, Axis::y));
    ratio.push_back(f / ng);
    detail += "F_wg(" + fmt("%g", ng) + ")=" + fmt("%.3f", f) + " ";
  }
  double mean = 0.0;
  for (double q : ratio) mean += q / ratio.size();
  double dev = 0.0;
  for (double q : ratio) dev = std::max(dev, std::abs(q / mean - 1.0));
  return {dev <= kLinearTol, detail + "max deviation from proportionality " + fmt("%.3f", dev)};
}

MapSpec coarse_map_spec() {
  MapSpec spec;
  spec.samples_x = 8;
  spec.samples_y = 14;
  spec.y_extent = 1.0;
  spec.orientations = {Axis::y, Axis::x};
  spec.ng_targets = {58.0};
  return spec;
}

Outcome c7_beta(const W1Study& st, MapResult& m) {
  std::vector<double> beta;
  std::string detail = "antinode beta";
  for (double ng : kTargets) {
    auto [x, y] = st.antinode(ng);
    beta.push_back(st.emit(ng, x, y, Axis::y).beta);
    detail += " " + fmt("%.6f", beta.back());
    st.release_solvers();
  }
  bool monotone = true;
  for (size_t i = 1; i < beta.size(); ++i) monotone = monotone && beta[i] > beta[i - 1];
  m = run_map(st, coarse_map_spec(), {});
  double min_y = INFINITY, min_x = INFINITY;
  int n_y = 0, above_x = 0, n_x = 0;
  for (const MapRecord& r : m.records) {
    if (r.status != CellStatus::ok) continue;
    if (r.orientation == Axis::y) {
      min_y = std::min(min_y, r.report.beta);
      ++n_y;
    } else {
      min_x = std::min(min_x, r.report.beta);
      above_x += r.report.beta >= kBetaMin;
      ++n_x;
    }
  }
  detail += "; map n_g 58: y-dipole min beta " + fmt("%.4f", min_y) + " over " + std::to_string(n_y) +
            " cells, x-dipole min " + fmt("%.4f", min_x) + " (" + std::to_string(above_x) + "/" +
            std::to_string(n_x) + " >= 0.9), failed " + std::to_string(m.failed);
  return {monotone && n_y > 0 && min_y >= kBetaMin && m.failed == 0, detail};
}

Outcome c8_suppression(const W1Study& w1, const MapResult& w1_map, int res) {
  StudySettings pc = w1_settings(res);
  pc.geometry = build_crystal(1.0, 0.3, 3.5, 4, 33);
  CrystalStudy cs(pc);
  GapEdges gap = bulk_gap(0.3, 3.5);
  MapSpec spec = coarse_map_spec();
  auto map_min = [&](const MapResult& m) {
    double best = INFINITY;
    for (const MapRecord& r : m.records)
      if (r.status == CellStatus::ok) best = std::min(best, r.report.f_rad);
    return best;
  };
  double pc_mid = map_min(run_crystal_map(cs, gap.mid(), spec, {}));
  double w_op = w1.mode(58.0).omega;
  double pc_op = map_min(run_crystal_map(cs, w_op, spec, {}));
  double w1_min = map_min(w1_map);

  // Orientation- and position-averaged F_rad outside the gap; a single
  // orientation can sit on a node of the projected density of states.
  std::vector<double> outside;
  const std::vector<std::pair<double, double>> probes{{0.5, 0.0}, {0.0, 0.5}, {0.25, 0.43}};
  for (double w : {0.12, 0.15, 0.30, 0.33}) {
    double sum = 0.0;
    for (auto [x, y] : probes)
      for (Axis o : {Axis::y, Axis::x}) sum += cs.emit(w, x, y, o).f_rad;
    outside.push_back(sum / (2.0 * probes.size()));
    cs.release_solvers();
  }
  double out_min = *std::min_element(outside.begin(), outside.end());
  double ratio = std::max(w1_min, pc_op) / std::min(w1_min, pc_op);
  bool pass = pc_mid < kPcMidgapMax && out_min > kOutsideGapMin && out_min > 10.0 * pc_mid &&
              ratio < kMinimaRatioMax;
  return {pass, "PC mid-gap min F_rad " + fmt("%.3e", pc_mid) + ", outside-gap mean F_rad >= " +
                    fmt("%.3f", out_min) + "; at omega " + fmt("%.4f", w_op) + ": PC min " +
                    fmt("%.3e", pc_op) + " W1 min " + fmt("%.3e", w1_min) + " (ratio " +
                    fmt("%.2f", ratio) + ")"};
}

Outcome c9_convergence(const StudySettings& base) {
  ConvergenceSpec spec;
  spec.param = ConvParam::l_b;
  spec.values = {5, 9, 13, 17, 21, 25, 29, 31};
  spec.tolerance = kPlateauTol;
  ConvergenceResult lb = convergence_sweep(base, spec);
  // Domain growth from the default length onward.
  spec.param = ConvParam::l;
  spec.values = {25, 33, 41, 49};
  spec.tolerance = kDomainTol;
  ConvergenceResult l = convergence_sweep(base, spec);
  const double l_default = base.layout.l_periods;
  std::string detail = "l_b plateau from " + fmt("%g", lb.plateau_start) + " spread " +
                       fmt("%.3f", lb.spread) + " gamma " + fmt("%.3e", lb.plateau_value) + "; l gamma";
  for (double g : l.gamma) detail += " " + fmt("%.3e", g);
  detail += ", plateau from l = " + fmt("%g", l.plateau_start) + " spread " + fmt("%.3f", l.spread);
  if (!lb.converged) detail += " (l_b: " + lb.note + ")";
  if (!l.converged) detail += " (l: " + l.note + ")";
  return {lb.converged && l.converged && l.plateau_start <= l_default, detail};
}

Outcome c10_consistency(const W1Study& st) {
  MapSpec spec;
  std::mt19937_64 rng(20240601);
  std::uniform_int_distribution<int> ux(0, spec.samples_x - 1), uy(0, spec.samples_y - 1),
      ut(0, static_cast<int>(kTargets.size()) - 1), uo(0, 1);
  struct Cell {
    double ng, x, y;
    Axis o;
  };
  std::vector<Cell> cells;
  while (cells.size() < 10) {
    auto [x, y] = map_position(spec, ux(rng), uy(rng));
    Cell c{kTargets[ut(rng)], x, y, uo(rng) ? Axis::x : Axis::y};
    if (st.in_dielectric(c.x, c.y, c.o)) cells.push_back(c);
  }
  std::stable_sort(cells.begin(), cells.end(), [](const Cell& a, const Cell& b) { return a.ng < b.ng; });
  double worst = 0.0;
  for (const Cell& c : cells) worst = std::max(worst, st.emit(c.ng, c.x, c.y, c.o).beta_discrepancy);
  st.release_solvers();
  return {worst < kBetaDiscrepancyMax, "max |beta - beta'| " + fmt("%.2e", worst) + " over 10 cells"};
}

}  // namespace

int main() {
  struct Row {
    int id;
    const char* name;
    double budget_s;
    double prior_s = 0.0;  // time already spent in a shared run
  };
  int failures = 0;
  auto report = [&](const Row& row, const std::function<Outcome()>& fn) {
    auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    double sec = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count() + row.prior_s;
    bool in_time = sec <= row.budget_s;
    bool pass = o.pass && in_time;
    failures += !pass;
    std::printf("[%s] %2d %-28s %s (%.1f s%s)\n", pass ? "PASS" : "FAIL", row.id, row.name, o.detail.c_str(),
                sec, in_time ? "" : ", over budget");
    std::fflush(stdout);
  };

  report({1, "analytic dispersion", 10}, c1_dispersion);
  report({2, "power conservation", 30}, c2_nested_boxes);
  report({3, "reciprocity", 60}, c3_reciprocity);

  {
    W1Study st(w1_settings(kDefaultResolution));
    ActiveRuns runs;
    auto t0 = std::chrono::steady_clock::now();
    std::string err;
    try {
      runs = active_runs(st);
    } catch (const std::exception& e) {
      err = e.what();
    }
    double shared = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    auto with_runs = [&](Outcome (*fn)(const ActiveRuns&)) {
      return [&, fn]() -> Outcome {
        if (!err.empty()) throw std::runtime_error(err);
        Outcome o = fn(runs);
        return o;
      };
    };
    report({4, "active boundary efficacy", 600, shared}, with_runs(c4_active_bc));
    report({5, "A0 closure", 600, shared}, with_runs(c5_closure));
    report({6, "linear F_wg scaling", 300}, [&] { return c6_linear(st); });
    report({10, "beta consistency", 1200}, [&] { return c10_consistency(st); });
  }
  {
    W1Study st(w1_settings(kMapResolution));
    MapResult w1_map;
    report({7, "beta trend and robustness", 7200}, [&] { return c7_beta(st, w1_map); });
    report({8, "radiation suppression", 3600},
           [&] { return c8_suppression(st, w1_map, kMapResolution); });
  }
  report({9, "convergence protocol", 3600}, [&] { return c9_convergence(w1_settings(kDefaultResolution)); });

  std::printf("%d of 10 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
