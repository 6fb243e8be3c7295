#include "pcw/sweeps.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <set>
#include <sstream>
#include <thread>

#include <json.hpp>

namespace pcw {

namespace {

const double kNaN = std::numeric_limits<double>::quiet_NaN();

double snap_up(double v, int res) { return std::ceil(v * res - 1e-9) / res; }

}  // namespace

FluxBox radiation_box(const StudySettings& s, double box_length, double margin) {
  const int res = s.layout.resolution;
  double yf = snap_up(s.geometry.slab_half_width() + margin, res);
  double xf = std::round(0.5 * box_length * res) / res;
  return FluxBox{-xf, xf, -yf, yf, Faces::exclude_x_normal};
}

FluxBox radiation_box(const StudySettings& s) {
  double lb = s.box_length > 0.0 ? s.box_length : s.layout.l_periods - 2.0;
  return radiation_box(s, lb, s.rad_margin);
}

// ---------------------------------------------------------------- W1Study

W1Study::W1Study(StudySettings s) : s_(std::move(s)) {
  if (s_.geometry.defect != Defect::w1) throw std::invalid_argument("W1 study needs a W1 geometry");
  s_.geometry.n_periods = s_.layout.l_periods;
  grid_ = std::make_shared<const RasterGrid>(s_.layout.raster(s_.geometry));
}

const GuidedModeSolver& W1Study::pwe() const {
  std::lock_guard<std::mutex> lock(mu_);
  if (!pwe_) pwe_ = std::make_unique<GuidedModeSolver>(s_.geometry, s_.pwe);
  return *pwe_;
}

const GridModeSolver& W1Study::grid_modes() const {
  const GuidedModeSolver& p = pwe();
  std::lock_guard<std::mutex> lock(mu_);
  if (!gm_)
    gm_ = std::make_unique<GridModeSolver>(
        s_.geometry, s_.layout, [&p](double k) { return p.omega_at(k); },
        s_.pwe.concentration_threshold, s_.pwe.concentration_halfwidth);
  return *gm_;
}

const BlochMode& W1Study::mode(double n_g) const {
  {
    std::lock_guard<std::mutex> lock(mu_);
    auto it = modes_.find(n_g);
    if (it != modes_.end()) return *it->second;
  }
  const GridModeSolver& gm = grid_modes();
  auto m = std::make_unique<BlochMode>(gm.mode_for_ng(n_g));
  std::lock_guard<std::mutex> lock(mu_);
  auto [it, inserted] = modes_.emplace(n_g, std::move(m));
  return *it->second;
}

double W1Study::p0(double n_g, Axis o) const {
  return reference_power(mode(n_g).omega, s_.geometry.background_index, s_.layout.resolution, o);
}

std::pair<double, double> W1Study::antinode(double n_g) const {
  const BlochMode& m = mode(n_g);
  const int res = m.sampling.resolution, j = m.sampling.ny / 2;
  const double d = m.sampling.d();
  const double y = m.sampling.y0 + (j + 0.5) * d;
  int best = 0;
  double amp = -1.0;
  for (int i = 0; i < res; ++i) {
    double a = std::abs(m.field(Axis::y, i * d, y));
    if (a > amp + 1e-12 * std::abs(amp)) {
      amp = a;
      best = i;
    }
  }
  return {best * d, y};
}

bool W1Study::in_dielectric(double x, double y, Axis o) const {
  Dipole dp = snap_dipole(*grid_, x, y, o);
  return !s_.geometry.in_hole(dp.x, dp.y);
}

namespace {

ActiveBc bc_for(const BlochMode& m, const StudySettings& s, const RasterGrid& g, const Dipole& dp) {
  double X = s.layout.plane_x();
  double yh = s.geometry.slab_half_width() + s.layout.overhang;
  return synthesize_active_bc(m, g, dp.x, dp.y, dp.orientation, X, -X, yh, dp.current);
}

}  // namespace

std::shared_ptr<FdfdSolver> W1Study::solver(double n_g, BoundaryMode bm) const {
  const BlochMode& m = mode(n_g);
  std::pair<double, int> key{n_g, static_cast<int>(bm)};
  std::lock_guard<std::mutex> lock(mu_);
  auto it = solvers_.find(key);
  if (it != solvers_.end()) return it->second;
  for (auto e = solvers_.begin(); e != solvers_.end();)
    e = e->first.first != n_g ? solvers_.erase(e) : std::next(e);
  FdfdProblem p;
  p.grid = grid_;
  p.omega = m.omega;
  p.pml = s_.layout.pml;
  p.source = snap_dipole(*grid_, 0.0, 0.5 * grid_->d(), Axis::y);
  p.boundary_mode = bm;
  if (bm == BoundaryMode::active) p.active_bc = bc_for(m, s_, *grid_, p.source);
  auto sv = std::make_shared<FdfdSolver>(p);
  solvers_.emplace(key, sv);
  return sv;
}

void W1Study::release_solvers() const {
  std::lock_guard<std::mutex> lock(mu_);
  solvers_.clear();
}

EmissionReport W1Study::emit(double n_g, double x, double y, Axis o, BoundaryMode bm,
                             const EmitExtras& ex) const {
  const BlochMode& m = mode(n_g);
  Dipole dp = snap_dipole(*grid_, x, y, o);
  if (s_.geometry.in_hole(dp.x, dp.y)) throw std::invalid_argument("dipole inside a hole");
  FdfdProblem p;
  p.grid = grid_;
  p.omega = m.omega;
  p.pml = s_.layout.pml;
  p.source = dp;
  p.boundary_mode = bm;
  if (bm == BoundaryMode::active) p.active_bc = bc_for(m, s_, *grid_, dp);
  FieldSolution sol = solver(n_g, bm)->solve(p);
  if (!(sol.residual < 1e-10)) throw NumericalFailure("linear solve residual above 1e-10");

  FluxBox rb = radiation_box(s_);
  FluxBox cb = rb;
  cb.faces = Faces::all;
  FaceFlux ff = face_flux(sol, cb);
  double p_rad = radiated_power(sol, rb, s_.geometry.slab_half_width());
  double p0v = p0(n_g, o);
  EmissionInputs in;
  in.omega = m.omega;
  in.n_g = m.n_g;
  in.x = dp.x;
  in.y = dp.y;
  in.n_d = o;
  in.p_total = ff.total();
  in.p_rad = p_rad;
  in.p0 = p0v;
  in.f_wg = guided_power(m, dp.x, dp.y, o) / p0v;
  double reflection = ex.reflection ? reflection_metric(sol, m).contrast : kNaN;
  double residual = sol.residual;
  if (ex.field) *ex.field = std::move(sol);
  EmissionReport r = beta_factor(in);
  r.p_wg_flux = ff.x_normal();
  r.residual = residual;
  r.boundary = to_string(bm);
  r.reflection = reflection;
  BcAmplitude a = bc_amplitude_phase(m, dp.x, dp.y, o);
  double side = a.a0 * a.a0 * m.norm;
  if (side > 0.0)
    r.a0_closure = std::max(std::abs(ff.right / side - 1.0), std::abs(ff.left / side - 1.0));
  return r;
}

// ----------------------------------------------------------- CrystalStudy

CrystalStudy::CrystalStudy(StudySettings s) : s_(std::move(s)) {
  if (s_.geometry.defect != Defect::none) throw std::invalid_argument("crystal study needs a defect-free geometry");
  s_.geometry.n_periods = s_.layout.l_periods;
  grid_ = std::make_shared<const RasterGrid>(s_.layout.raster(s_.geometry));
}

bool CrystalStudy::in_dielectric(double x, double y, Axis o) const {
  Dipole dp = snap_dipole(*grid_, x, y, o);
  return !s_.geometry.in_hole(dp.x, dp.y);
}

std::shared_ptr<FdfdSolver> CrystalStudy::solver(double omega) const {
  std::lock_guard<std::mutex> lock(mu_);
  auto it = solvers_.find(omega);
  if (it != solvers_.end()) return it->second;
  solvers_.clear();
  FdfdProblem p;
  p.grid = grid_;
  p.omega = omega;
  p.pml = s_.layout.pml;
  p.source = snap_dipole(*grid_, 0.0, 0.5 * grid_->d(), Axis::y);
  p.boundary_mode = BoundaryMode::pml_only;
  auto sv = std::make_shared<FdfdSolver>(p);
  solvers_.emplace(omega, sv);
  return sv;
}

void CrystalStudy::release_solvers() const {
  std::lock_guard<std::mutex> lock(mu_);
  solvers_.clear();
}

EmissionReport CrystalStudy::emit(double omega, double x, double y, Axis o, FieldSolution* keep) const {
  Dipole dp = snap_dipole(*grid_, x, y, o);
  if (s_.geometry.in_hole(dp.x, dp.y)) throw std::invalid_argument("dipole inside a hole");
  FdfdProblem p;
  p.grid = grid_;
  p.omega = omega;
  p.pml = s_.layout.pml;
  p.source = dp;
  p.boundary_mode = BoundaryMode::pml_only;
  FieldSolution sol = solver(omega)->solve(p);
  if (!(sol.residual < 1e-10)) throw NumericalFailure("linear solve residual above 1e-10");
  FluxBox cb = radiation_box(s_);
  cb.faces = Faces::all;
  FaceFlux ff = face_flux(sol, cb);
  EmissionInputs in;
  in.omega = omega;
  in.x = dp.x;
  in.y = dp.y;
  in.n_d = o;
  in.p_total = ff.total();
  in.p_rad = ff.total();
  in.p0 = reference_power(omega, s_.geometry.background_index, s_.layout.resolution, o);
  in.f_wg = 0.0;
  EmissionReport r = beta_factor(in);
  r.p_wg_flux = ff.x_normal();
  r.residual = sol.residual;
  r.boundary = to_string(BoundaryMode::pml_only);
  if (keep) *keep = std::move(sol);
  return r;
}

// ------------------------------------------------------------------- maps

std::string to_string(Quantity q) {
  switch (q) {
    case Quantity::f_wg: return "f_wg";
    case Quantity::f_rad: return "f_rad";
    case Quantity::beta: return "beta";
  }
  return "?";
}

Quantity quantity_from_string(const std::string& s) {
  if (s == "f_wg") return Quantity::f_wg;
  if (s == "f_rad") return Quantity::f_rad;
  if (s == "beta") return Quantity::beta;
  throw std::invalid_argument("unknown quantity '" + s + "' (f_wg, f_rad, beta)");
}

std::pair<double, double> map_position(const MapSpec& spec, int ix, int iy) {
  double x = (ix + 0.5) / spec.samples_x;
  double y = -spec.y_extent + (iy + 0.5) * 2.0 * spec.y_extent / spec.samples_y;
  return {x, y};
}

namespace {

const char* status_name(CellStatus s) {
  switch (s) {
    case CellStatus::ok: return "ok";
    case CellStatus::missing: return "missing";
    case CellStatus::failed: return "failed";
  }
  return "?";
}

CellStatus status_from(const std::string& s) {
  if (s == "ok") return CellStatus::ok;
  if (s == "missing") return CellStatus::missing;
  if (s == "failed") return CellStatus::failed;
  throw std::invalid_argument("unknown cell status " + s);
}

nlohmann::json num(double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(); }
double num(const nlohmann::json& j) { return j.is_null() ? kNaN : j.get<double>(); }

}  // namespace

std::string MapRecord::key() const {
  std::ostringstream os;
  os.precision(17);
  os << target << '|' << to_string(orientation) << '|' << ix << '|' << iy;
  return os.str();
}

double MapRecord::value(Quantity q) const {
  if (status != CellStatus::ok) return kNaN;
  switch (q) {
    case Quantity::f_wg: return report.f_wg;
    case Quantity::f_rad: return report.f_rad;
    case Quantity::beta: return report.beta;
  }
  return kNaN;
}

std::string to_json_line(const MapRecord& r) {
  nlohmann::json j;
  j["target"] = r.target;
  j["orientation"] = to_string(r.orientation);
  j["ix"] = r.ix;
  j["iy"] = r.iy;
  j["x"] = r.x;
  j["y"] = r.y;
  j["status"] = status_name(r.status);
  j["error"] = r.error;
  const EmissionReport& e = r.report;
  j["report"] = {{"omega", num(e.omega)},       {"n_g", num(e.n_g)},
                 {"x", num(e.x)},               {"y", num(e.y)},
                 {"n_d", to_string(e.n_d)},     {"boundary", e.boundary},
                 {"P_total", num(e.p_total)},   {"P_rad", num(e.p_rad)},
                 {"P0", num(e.p0)},             {"F_wg", num(e.f_wg)},
                 {"F_rad", num(e.f_rad)},       {"F_total", num(e.f_total)},
                 {"beta", num(e.beta)},         {"beta_prime", num(e.beta_prime)},
                 {"beta_discrepancy", num(e.beta_discrepancy)},
                 {"P_wg_flux", num(e.p_wg_flux)}, {"a0_closure", num(e.a0_closure)},
                 {"reflection", num(e.reflection)}, {"residual", num(e.residual)}};
  return j.dump();
}

MapRecord record_from_json(const std::string& line) {
  nlohmann::json j = nlohmann::json::parse(line);
  MapRecord r;
  r.target = j.at("target").get<double>();
  r.orientation = axis_from_string(j.at("orientation").get<std::string>());
  r.ix = j.at("ix").get<int>();
  r.iy = j.at("iy").get<int>();
  r.x = j.at("x").get<double>();
  r.y = j.at("y").get<double>();
  r.status = status_from(j.at("status").get<std::string>());
  r.error = j.at("error").get<std::string>();
  const nlohmann::json& e = j.at("report");
  EmissionReport& o = r.report;
  o.omega = num(e.at("omega"));
  o.n_g = num(e.at("n_g"));
  o.x = num(e.at("x"));
  o.y = num(e.at("y"));
  o.n_d = axis_from_string(e.at("n_d").get<std::string>());
  o.boundary = e.at("boundary").get<std::string>();
  o.p_total = num(e.at("P_total"));
  o.p_rad = num(e.at("P_rad"));
  o.p0 = num(e.at("P0"));
  o.f_wg = num(e.at("F_wg"));
  o.f_rad = num(e.at("F_rad"));
  o.f_total = num(e.at("F_total"));
  o.beta = num(e.at("beta"));
  o.beta_prime = num(e.at("beta_prime"));
  o.beta_discrepancy = num(e.at("beta_discrepancy"));
  o.p_wg_flux = num(e.at("P_wg_flux"));
  o.a0_closure = num(e.at("a0_closure"));
  o.reflection = num(e.at("reflection"));
  o.residual = num(e.at("residual"));
  return r;
}

namespace {

using Compute = std::function<EmissionReport(double target, double x, double y, Axis o)>;
using Dielectric = std::function<bool(double x, double y, Axis o)>;

std::map<std::string, MapRecord> load_records(const std::string& path) {
  std::map<std::string, MapRecord> out;
  if (path.empty()) return out;
  std::ifstream in(path);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    try {
      MapRecord r = record_from_json(line);
      if (r.status != CellStatus::failed) out[r.key()] = r;
    } catch (const std::exception&) {
      // a torn final line from an interrupted run is recomputed
    }
  }
  return out;
}

MapResult run_map_impl(const std::vector<double>& targets, const MapSpec& spec,
                       const RunOptions& opt, const Compute& compute, const Dielectric& dielectric,
                       const std::function<void(double)>& prepare, const std::function<void()>& release) {
  MapResult res;
  std::map<std::string, MapRecord> done = load_records(opt.record_path);
  std::ofstream log;
  if (!opt.record_path.empty()) {
    bool torn = false;
    {
      std::ifstream in(opt.record_path, std::ios::binary | std::ios::ate);
      if (in && in.tellg() > 0) {
        in.seekg(-1, std::ios::end);
        torn = in.get() != '\n';
      }
    }
    log.open(opt.record_path, std::ios::app);
    if (!log) throw std::runtime_error("cannot open record file " + opt.record_path);
    if (torn) log << '\n';
  }
  std::mutex write_mu;
  std::vector<MapRecord> all;

  for (double t : targets) {
    std::vector<MapRecord> todo;
    for (Axis o : spec.orientations)
      for (int iy = 0; iy < spec.samples_y; ++iy)
        for (int ix = 0; ix < spec.samples_x; ++ix) {
          MapRecord r;
          r.target = t;
          r.orientation = o;
          r.ix = ix;
          r.iy = iy;
          std::tie(r.x, r.y) = map_position(spec, ix, iy);
          auto it = done.find(r.key());
          if (it != done.end()) {
            all.push_back(it->second);
            ++res.resumed;
          } else {
            todo.push_back(r);
          }
        }
    if (todo.empty()) continue;
    bool prepared = false;
    std::string prep_error;
    try {
      prepare(t);
      prepared = true;
    } catch (const std::exception& e) {
      prep_error = e.what();
    }
    std::atomic<size_t> next{0};
    auto worker = [&] {
      for (size_t k = next++; k < todo.size(); k = next++) {
        MapRecord& r = todo[k];
        try {
          if (!prepared) throw std::runtime_error(prep_error);
          if (!dielectric(r.x, r.y, r.orientation)) {
            r.status = CellStatus::missing;
          } else {
            r.report = compute(t, r.x, r.y, r.orientation);
            r.status = CellStatus::ok;
          }
        } catch (const std::exception& e) {
          r.status = CellStatus::failed;
          r.error = e.what();
        }
        if (log.is_open()) {
          std::lock_guard<std::mutex> lock(write_mu);
          log << to_json_line(r) << '\n';
          log.flush();
        }
      }
    };
    int nj = std::max(1, opt.jobs);
    std::vector<std::thread> pool;
    for (int w = 1; w < nj; ++w) pool.emplace_back(worker);
    worker();
    for (auto& th : pool) th.join();
    release();
    for (auto& r : todo) {
      if (r.status == CellStatus::failed) ++res.failed;
      ++res.computed;
      all.push_back(std::move(r));
    }
  }
  std::sort(all.begin(), all.end(), [](const MapRecord& a, const MapRecord& b) {
    return std::make_tuple(a.target, static_cast<int>(a.orientation), a.iy, a.ix) <
           std::make_tuple(b.target, static_cast<int>(b.orientation), b.iy, b.ix);
  });
  res.records = std::move(all);
  return res;
}

}  // namespace

MapResult run_map(const W1Study& study, const MapSpec& spec, const RunOptions& opt) {
  return run_map_impl(
      spec.ng_targets, spec, opt,
      [&](double t, double x, double y, Axis o) { return study.emit(t, x, y, o, spec.boundary); },
      [&](double x, double y, Axis o) { return study.in_dielectric(x, y, o); },
      [&](double t) { study.mode(t); }, [&] { study.release_solvers(); });
}

MapResult run_crystal_map(const CrystalStudy& study, double omega, const MapSpec& spec,
                          const RunOptions& opt) {
  return run_map_impl(
      {omega}, spec, opt,
      [&](double t, double x, double y, Axis o) { return study.emit(t, x, y, o); },
      [&](double x, double y, Axis o) { return study.in_dielectric(x, y, o); },
      [](double) {}, [&] { study.release_solvers(); });
}

std::string map_csv(const MapResult& m) {
  CsvTable t;
  t.header = {"target", "ix", "iy", "status"};
  {
    std::string h = report_csv_header();
    std::stringstream ss(h);
    std::string col;
    while (std::getline(ss, col, ',')) t.header.push_back(col);
  }
  for (const MapRecord& r : m.records) {
    std::vector<std::string> row{sci(r.target), std::to_string(r.ix), std::to_string(r.iy),
                                 status_name(r.status)};
    EmissionReport e = r.report;
    if (r.status != CellStatus::ok) {
      e = EmissionReport{};
      e.x = r.x;
      e.y = r.y;
      e.n_d = r.orientation;
      e.omega = e.n_g = e.p_total = e.p_rad = e.p0 = e.f_wg = e.f_rad = e.f_total = kNaN;
      e.beta = e.beta_prime = e.beta_discrepancy = kNaN;
    }
    std::stringstream ss(report_csv_row(e));
    std::string col;
    while (std::getline(ss, col, ',')) row.push_back(col);
    t.add(std::move(row));
  }
  return t.str();
}

namespace {

double beta_scale(double b) { return -std::log10(std::max(1e-3, 1.0 - std::clamp(b, 0.0, 1.0))); }

}  // namespace

MapImages map_images(const MapResult& m, const MapSpec& spec, double target, Axis o) {
  const int W = spec.samples_x, H = spec.samples_y;
  std::vector<double> raw(static_cast<size_t>(W) * H, kNaN);
  for (const MapRecord& r : m.records)
    if (r.target == target && r.orientation == o) raw[r.ix + static_cast<size_t>(W) * r.iy] = r.value(spec.quantity);
  MapImages out;
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (double v : raw)
    if (std::isfinite(v)) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  if (!std::isfinite(lo)) lo = hi = 0.0;
  std::ostringstream sc;
  sc << "quantity " << to_string(spec.quantity) << "\ntarget " << sci(target) << "\norientation "
     << to_string(o) << "\nmin " << sci(lo) << "\nmax " << sci(hi) << "\ncolormap gray\n";
  if (spec.quantity == Quantity::beta) {
    std::vector<double> v(raw.size());
    for (size_t i = 0; i < raw.size(); ++i) v[i] = std::isfinite(raw[i]) ? beta_scale(raw[i]) : kNaN;
    out.gray.width = W;
    out.gray.height = H;
    out.gray.pixels.assign(v.size(), 255);
    for (int r = 0; r < H; ++r)
      for (int c = 0; c < W; ++c) {
        double x = v[c + static_cast<size_t>(W) * (H - 1 - r)];
        if (std::isfinite(x)) out.gray.pixels[c + static_cast<size_t>(W) * r] =
                                  static_cast<unsigned char>(std::lround(254.0 * x / 3.0));
      }
    sc << "nonlinear -log10(1-beta) over [0, 3]\ncontours";
    for (double l : spec.contour_levels) sc << ' ' << l;
    sc << '\n';
    Rgb8 rgb;
    rgb.width = W;
    rgb.height = H;
    rgb.pixels.resize(3 * v.size());
    const unsigned char colours[2][3] = {{0, 200, 0}, {0, 0, 255}};
    for (int r = 0; r < H; ++r)
      for (int c = 0; c < W; ++c) {
        size_t p = c + static_cast<size_t>(W) * r;
        int iy = H - 1 - r;
        unsigned char g = out.gray.pixels[p];
        unsigned char px[3] = {g, g, g};
        double b = raw[c + static_cast<size_t>(W) * iy];
        for (size_t li = 0; li < spec.contour_levels.size() && std::isfinite(b); ++li) {
          double lev = spec.contour_levels[li];
          if (b < lev) continue;
          bool edge = false;
          const int nb[4][2] = {{1, 0}, {-1, 0}, {0, 1}, {0, -1}};
          for (auto& d : nb) {
            int cx = c + d[0], cy = iy + d[1];
            if (cx < 0 || cx >= W || cy < 0 || cy >= H) continue;
            double q = raw[cx + static_cast<size_t>(W) * cy];
            if (std::isfinite(q) && q < lev) edge = true;
          }
          if (edge) std::copy(colours[li % 2], colours[li % 2] + 3, px);
        }
        std::copy(px, px + 3, rgb.pixels.begin() + 3 * p);
      }
    out.contours = rgb;
  } else {
    double top = 0.0;
    out.gray = to_gray(raw, W, H, 1.0, &top);
    sc << "nonlinear none\n";
  }
  out.scale = sc.str();
  return out;
}

// ------------------------------------------------------------ convergence

std::string to_string(ConvParam p) {
  switch (p) {
    case ConvParam::l_b: return "l_b";
    case ConvParam::w_b: return "w_b";
    case ConvParam::l: return "l";
    case ConvParam::w: return "w";
    case ConvParam::resolution: return "resolution";
    case ConvParam::pml: return "pml";
  }
  return "?";
}

ConvParam conv_param_from_string(const std::string& s) {
  for (ConvParam p : {ConvParam::l_b, ConvParam::w_b, ConvParam::l, ConvParam::w,
                      ConvParam::resolution, ConvParam::pml})
    if (to_string(p) == s) return p;
  throw std::invalid_argument("unknown convergence parameter '" + s + "'");
}

ConvergenceResult detect_plateau(const std::vector<double>& values, const std::vector<double>& gamma,
                                 double tol) {
  ConvergenceResult r;
  r.values = values;
  r.gamma = gamma;
  const int n = static_cast<int>(gamma.size());
  for (int i = 0; i + 1 < n; ++i) {
    double lo = std::numeric_limits<double>::infinity(), hi = -lo, sum = 0.0;
    bool finite = true;
    for (int j = i; j < n; ++j) {
      finite = finite && std::isfinite(gamma[j]);
      lo = std::min(lo, gamma[j]);
      hi = std::max(hi, gamma[j]);
      sum += gamma[j];
    }
    if (!finite) continue;
    double mean = sum / (n - i);
    double spread = mean != 0.0 ? (hi - lo) / std::abs(mean) : 0.0;
    if (spread < tol) {
      r.converged = true;
      r.plateau_start = values[i];
      r.plateau_value = mean;
      r.spread = spread;
      return r;
    }
  }
  r.note = "no plateau: tail spread never fell below tolerance; review the sweep";
  return r;
}

ConvergenceResult convergence_sweep(const StudySettings& base, const ConvergenceSpec& spec,
                                    const RunOptions&) {
  if (spec.values.empty()) throw std::invalid_argument("convergence sweep needs values");
  for (size_t i = 1; i < spec.values.size(); ++i)
    if (!(spec.values[i] > spec.values[i - 1]))
      throw std::invalid_argument("convergence values must be strictly increasing");
  std::vector<double> gamma;
  auto antinode_f_rad = [&](const StudySettings& s) {
    W1Study st(s);
    auto [x, y] = st.antinode(spec.n_g);
    return st.emit(spec.n_g, x, y, spec.orientation).f_rad;
  };
  if (spec.param == ConvParam::l_b || spec.param == ConvParam::w_b) {
    W1Study st(base);
    auto [x, y] = st.antinode(spec.n_g);
    EmitExtras ex;
    FieldSolution sol;
    ex.field = &sol;
    EmissionReport rep = st.emit(spec.n_g, x, y, spec.orientation, BoundaryMode::active, ex);
    double lb0 = base.box_length > 0.0 ? base.box_length : base.layout.l_periods - 2.0;
    for (double v : spec.values) {
      FluxBox b = spec.param == ConvParam::l_b ? radiation_box(base, v, base.rad_margin)
                                               : radiation_box(base, lb0, v);
      gamma.push_back(radiated_power(sol, b, base.geometry.slab_half_width()) / rep.p0);
    }
  } else {
    for (double v : spec.values) {
      StudySettings s = base;
      switch (spec.param) {
        case ConvParam::l:
          s.layout.l_periods = static_cast<int>(std::lround(v));
          break;
        case ConvParam::w: {
          int m = static_cast<int>(std::lround(v));
          s.geometry = build_w1(s.geometry.lattice_constant, s.geometry.hole_radius,
                                s.geometry.background_index, m, s.layout.l_periods);
          break;
        }
        case ConvParam::resolution: {
          int res = static_cast<int>(std::lround(v));
          s.layout.pml.cells = static_cast<int>(
              std::lround(static_cast<double>(base.layout.pml.cells) * res / base.layout.resolution));
          s.layout.resolution = res;
          break;
        }
        case ConvParam::pml:
          s.layout.pml.cells = static_cast<int>(std::lround(v));
          break;
        default:
          break;
      }
      try {
        gamma.push_back(antinode_f_rad(s));
      } catch (const std::exception&) {
        gamma.push_back(kNaN);
      }
    }
  }
  return detect_plateau(spec.values, gamma, spec.tolerance);
}

std::string convergence_csv(const ConvergenceResult& r, ConvParam p) {
  CsvTable t;
  t.header = {to_string(p), "gamma_rad_over_p0"};
  for (size_t i = 0; i < r.values.size(); ++i) t.add({sci(r.values[i]), sci(r.gamma[i])});
  std::string s = t.str();
  s += "# converged " + std::string(r.converged ? "yes" : "no") + " plateau_start " +
       sci(r.plateau_start) + " plateau_value " + sci(r.plateau_value) + " spread " +
       sci(r.spread) + "\n";
  if (!r.note.empty()) s += "# " + r.note + "\n";
  return s;
}

// ---------------------------------------------------------- crystal scan

std::vector<ScanPoint> phc_frequency_scan(const StudySettings& s, const std::vector<double>& omegas,
                                          const std::vector<std::pair<double, double>>& positions,
                                          const std::vector<Axis>& orientations) {
  CrystalStudy st(s);
  std::vector<ScanPoint> out;
  for (double w : omegas) {
    for (auto [x, y] : positions)
      for (Axis o : orientations) {
        EmissionReport r = st.emit(w, x, y, o);
        ScanPoint p;
        p.omega = w;
        p.x = r.x;
        p.y = r.y;
        p.orientation = o;
        p.f_rad = r.f_rad;
        p.f_side = (r.p_total - r.p_wg_flux) / r.p0;
        out.push_back(p);
      }
    st.release_solvers();
  }
  return out;
}

std::string scan_csv(const std::vector<ScanPoint>& v) {
  CsvTable t;
  t.header = {"omega", "x", "y", "n_d", "F_rad", "F_side"};
  for (auto& p : v)
    t.add({sci(p.omega), sci(p.x), sci(p.y), to_string(p.orientation), sci(p.f_rad), sci(p.f_side)});
  return t.str();
}

}  // namespace pcw
