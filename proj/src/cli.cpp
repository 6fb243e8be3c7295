#include "pcw/cli.hpp"

#include <cmath>
#include <filesystem>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "pcw/config.hpp"
#include "pcw/io.hpp"

namespace pcw {

namespace {

struct Budget {
  bool ok = true;
  std::vector<std::string> notes;
  void fail(const std::string& why) {
    ok = false;
    notes.push_back(why);
  }
};

std::string out_path(const RunConfig& c, const std::string& name) {
  return (std::filesystem::path(c.output.directory) / name).string();
}

bool wants(const RunConfig& c, const std::string& fmt) {
  return std::find(c.output.formats.begin(), c.output.formats.end(), fmt) != c.output.formats.end();
}

std::string tag(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

void write_manifest(const RunConfig& c, const std::string& command) {
  atomic_write(out_path(c, "config.yaml"), serialize_config(c));
  atomic_write(out_path(c, "manifest.txt"), "pcwsim " + std::string(kVersion) + "\ncommand " + command +
                                                "\nconfig_hash " + config_hash(c) + "\n");
}

// Energy-conservation check of one emission report.
void check_report(const EmissionReport& r, Budget& b) {
  if (!(r.residual < 1e-10)) b.fail("linear residual " + sci(r.residual));
  double sum = r.f_wg + r.f_rad;
  if (r.f_total > 0.0 && std::abs(r.f_total - sum) > 0.05 * r.f_total)
    b.fail("F_total differs from F_wg + F_rad by more than 5%");
}

Gray8 band_plot(const BandStructure& bs, const GapEdges* gap) {
  const int W = 320, H = 320;
  double top = 0.0;
  for (auto& b : bs.bands)
    for (double w : b) top = std::max(top, w);
  top = top > 0.0 ? 1.05 * top : 1.0;
  double kmin = bs.k_points.front(), kmax = bs.k_points.back();
  if (kmax <= kmin) kmax = kmin + 1.0;
  Gray8 img;
  img.width = W;
  img.height = H;
  img.pixels.assign(W * H, 255);
  if (gap && gap->open())
    for (int r = 0; r < H; ++r) {
      double w = top * (H - 1 - r) / (H - 1);
      if (w >= gap->lower && w <= gap->upper)
        for (int c = 0; c < W; ++c) img.pixels[c + W * r] = 220;
    }
  for (size_t i = 0; i < bs.k_points.size(); ++i)
    for (double w : bs.bands[i]) {
      int c = static_cast<int>(std::lround((bs.k_points[i] - kmin) / (kmax - kmin) * (W - 1)));
      int r = H - 1 - static_cast<int>(std::lround(w / top * (H - 1)));
      for (int dr = -1; dr <= 1; ++dr)
        for (int dc = -1; dc <= 1; ++dc) {
          int rr = r + dr, cc = c + dc;
          if (rr >= 0 && rr < H && cc >= 0 && cc < W) img.pixels[cc + W * rr] = 0;
        }
    }
  return img;
}

int cmd_bands(const RunConfig& c, std::ostream& out, Budget& budget) {
  CrystalGeometry g = c.crystal();
  std::vector<double> ks = c.study.k_list;
  if (ks.empty())
    for (int i = 0; i <= 20; ++i) ks.push_back(0.025 * i);
  StudySettings st = c.settings();
  BandStructure bs = solve_bands(g, ks, c.study.n_bands, c.pwe.cutoff, st.pwe);
  if (!(bs.max_residual < 1e-8)) budget.fail("eigen residual " + sci(bs.max_residual));
  CsvTable t;
  t.header = {"k", "band_index", "omega", "n_g", "parity"};
  for (size_t i = 0; i < ks.size(); ++i)
    for (size_t b = 0; b < bs.bands[i].size(); ++b)
      t.add({sci(ks[i]), std::to_string(b), sci(bs.bands[i][b]), sci(bs.n_g[i][b]),
             bs.parity[i][b] > 0 ? "even" : "odd"});
  std::string csv = t.str();
  std::ostringstream foot;
  std::optional<GapEdges> gap;
  if (g.has_holes) {
    gap = bulk_gap(g.hole_radius, g.background_index);
    foot << "# gap_lower " << sci(gap->lower) << "\n# gap_upper " << sci(gap->upper) << "\n";
  }
  if (g.defect == Defect::w1) {
    GuidedModeSolver gm(g, st.pwe);
    const GuidedBand& gb = gm.band();
    double lo = INFINITY, hi = -INFINITY;
    for (double w : gb.omega)
      if (std::isfinite(w)) {
        lo = std::min(lo, w);
        hi = std::max(hi, w);
      }
    foot << "# guided_band k " << sci(gb.k.front()) << ".." << sci(gb.k.back()) << " omega "
         << sci(lo) << ".." << sci(hi) << "\n";
  }
  csv += foot.str();
  atomic_write(out_path(c, "bands.csv"), csv);
  if (wants(c, "pgm"))
    atomic_write(out_path(c, "bands.pgm"), encode_pgm(band_plot(bs, gap ? &*gap : nullptr)));
  out << "bands: " << ks.size() << " k points, " << c.study.n_bands << " bands, max residual "
      << sci(bs.max_residual) << "\n" << foot.str();
  return 0;
}

std::pair<double, double> emitter_position(const RunConfig& c, const W1Study& st, double ng) {
  if (c.study.position.size() == 2) return {c.study.position[0], c.study.position[1]};
  return st.antinode(ng);
}

int cmd_mode(const RunConfig& c, std::ostream& out, Budget&) {
  W1Study st(c.settings());
  const double ng = c.study.ng;
  const BlochMode& m = st.mode(ng);
  auto [x, y] = st.antinode(ng);
  const CellSampling& s = m.sampling;
  CsvTable t;
  t.header = {"component", "x", "y", "re", "im"};
  const double d = s.d();
  for (int j = 0; j < s.ny; ++j)
    for (int i = 0; i < s.resolution; ++i) {
      double yc = s.y0 + (j + 0.5) * d;
      cd h = m.hz_at((i + 0.5) * d, yc), e = m.field(Axis::y, i * d, yc);
      t.add({"hz", sci((i + 0.5) * d), sci(yc), sci(h.real()), sci(h.imag())});
      t.add({"ey", sci(i * d), sci(yc), sci(e.real()), sci(e.imag())});
    }
  for (int j = 0; j <= s.ny; ++j)
    for (int i = 0; i < s.resolution; ++i) {
      double ye = s.y0 + j * d;
      cd e = m.field(Axis::x, (i + 0.5) * d, ye);
      t.add({"ex", sci((i + 0.5) * d), sci(ye), sci(e.real()), sci(e.imag())});
    }
  atomic_write(out_path(c, "mode.csv"), t.str());
  double p0 = st.p0(ng, Axis::y);
  out << "mode: omega " << sci(m.omega) << " k " << sci(m.k) << " n_g " << sci(m.n_g) << " flux "
      << sci(m.norm) << "\n"
      << "antinode x " << sci(x) << " y " << sci(y) << " F_wg(y) " << sci(purcell_wg(m, x, y, Axis::y, p0))
      << "\n";
  return 0;
}

int cmd_emit(const RunConfig& c, std::ostream& out, Budget& budget) {
  W1Study st(c.settings());
  const double ng = c.study.ng;
  auto [x, y] = emitter_position(c, st, ng);
  Axis o = axis_from_string(c.study.orientation);
  if (!st.in_dielectric(x, y, o)) throw std::invalid_argument("dipole inside a hole (no emitter in air)");
  EmitExtras ex;
  FieldSolution sol;
  ex.field = &sol;
  EmissionReport r = st.emit(ng, x, y, o, boundary_from_string(c.solver.boundary_mode), ex);
  check_report(r, budget);
  try {
    r.reflection = reflection_metric(sol, st.mode(ng)).contrast;
  } catch (const std::invalid_argument& e) {
    out << "reflection not measured: " << e.what() << "\n";
  }
  atomic_write(out_path(c, "emission.csv"), report_csv_header() + "\n" + report_csv_row(r) + "\n");
  if (wants(c, "csv")) write_field_csv(sol, out_path(c, "field.csv"));
  if (wants(c, "pgm")) write_field_pgm(sol, out_path(c, "field.pgm"), c.output.saturation);
  out << "emit: n_g " << sci(r.n_g) << " omega " << sci(r.omega) << " F_wg " << sci(r.f_wg)
      << " F_rad " << sci(r.f_rad) << " beta " << sci(r.beta) << " beta' " << sci(r.beta_prime)
      << " reflection " << sci(r.reflection) << " boundary " << r.boundary << "\n";
  return 0;
}

void write_map_outputs(const RunConfig& c, const MapResult& res, const MapSpec& spec,
                       const std::vector<double>& targets, const std::string& stem) {
  atomic_write(out_path(c, stem + "_long.csv"), map_csv(res));
  if (!wants(c, "pgm")) return;
  for (double t : targets)
    for (Axis o : spec.orientations) {
      MapImages im = map_images(res, spec, t, o);
      std::string base = stem + "_" + to_string(spec.quantity) + "_" + tag(t) + "_" + to_string(o);
      atomic_write(out_path(c, base + ".pgm"), encode_pgm(im.gray));
      atomic_write(out_path(c, base + ".scale.txt"), im.scale);
      if (im.contours) atomic_write(out_path(c, base + "_contours.ppm"), encode_ppm(*im.contours));
    }
}

int cmd_map(const RunConfig& c, int jobs, std::ostream& out, Budget& budget) {
  W1Study st(c.settings());
  MapSpec spec = c.map_spec();
  RunOptions opt;
  opt.jobs = jobs;
  std::filesystem::create_directories(c.output.directory);
  opt.record_path = out_path(c, "map_records.jsonl");
  MapResult res = run_map(st, spec, opt);
  for (auto& r : res.records)
    if (r.status == CellStatus::ok) check_report(r.report, budget);
  if (res.failed) budget.fail(std::to_string(res.failed) + " map cells failed");
  write_map_outputs(c, res, spec, spec.ng_targets, "map");
  out << "map: " << res.records.size() << " cells, " << res.computed << " computed, " << res.resumed
      << " resumed, " << res.failed << " failed\n";
  return 0;
}

int cmd_converge(const RunConfig& c, std::ostream& out, Budget&) {
  ConvergenceSpec spec;
  spec.param = conv_param_from_string(c.study.convergence.param);
  spec.values = c.study.convergence.values;
  spec.n_g = c.study.convergence.ng;
  spec.orientation = axis_from_string(c.study.convergence.orientation);
  spec.tolerance = c.study.convergence.tolerance;
  ConvergenceResult r = convergence_sweep(c.settings(), spec);
  atomic_write(out_path(c, "converge_" + to_string(spec.param) + ".csv"), convergence_csv(r, spec.param));
  out << "converge " << to_string(spec.param) << ": ";
  if (r.converged)
    out << "plateau from " << sci(r.plateau_start) << " at " << sci(r.plateau_value) << " (spread "
        << sci(r.spread) << ")\n";
  else
    out << "NOT CONVERGED, flagged for review: " << r.note << "\n";
  return 0;
}

int cmd_phc(const RunConfig& c, int jobs, bool scan, std::ostream& out, Budget& budget) {
  StudySettings s = c.settings();
  s.geometry = build_crystal(c.geometry.a, c.geometry.r, c.geometry.n, c.geometry.m, c.geometry.l_periods);
  GapEdges gap = bulk_gap(c.geometry.r, c.geometry.n);
  double omega = c.study.phc.omega > 0.0 ? c.study.phc.omega : gap.mid();
  std::filesystem::create_directories(c.output.directory);
  {
    CrystalStudy st(s);
    MapSpec spec = c.map_spec();
    spec.quantity = Quantity::f_rad;
    RunOptions opt;
    opt.jobs = jobs;
    opt.record_path = out_path(c, "phc_records.jsonl");
    MapResult res = run_crystal_map(st, omega, spec, opt);
    if (res.failed) budget.fail(std::to_string(res.failed) + " map cells failed");
    write_map_outputs(c, res, spec, {omega}, "phc");
    double best = INFINITY;
    for (auto& r : res.records)
      if (r.status == CellStatus::ok) best = std::min(best, r.report.f_rad);
    out << "phc-rad: omega " << sci(omega) << " (gap " << sci(gap.lower) << ".." << sci(gap.upper)
        << ") min F_rad " << sci(best) << "\n";
  }
  if (scan) {
    std::vector<std::pair<double, double>> pos;
    for (auto& p : c.study.phc.scan_positions) pos.emplace_back(p[0], p[1]);
    std::vector<Axis> ors;
    for (auto& o : c.study.phc.scan_orientations) ors.push_back(axis_from_string(o));
    auto pts = phc_frequency_scan(s, c.study.phc.scan, pos, ors);
    atomic_write(out_path(c, "phc_scan.csv"), scan_csv(pts));
    for (auto& p : pts)
      out << "scan omega " << sci(p.omega) << " " << to_string(p.orientation) << " (" << sci(p.x)
          << ", " << sci(p.y) << ") F_rad " << sci(p.f_rad) << "\n";
  }
  return 0;
}

}  // namespace

int run_cli(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Dipole emission into photonic-crystal waveguides"};
  app.fallthrough();
  app.require_subcommand(0, 1);
  std::string config_path, output_dir, boundary;
  int jobs = 1, resolution = 0;
  bool version = false;
  app.add_option("--config", config_path, "YAML run configuration");
  app.add_option("--jobs", jobs, "worker threads for sweeps")->check(CLI::PositiveNumber);
  app.add_option("--output", output_dir, "output directory");
  app.add_option("--boundary", boundary, "active | pml_only")->check(CLI::IsMember({"active", "pml_only"}));
  app.add_option("--resolution", resolution, "grid cells per lattice constant");
  app.add_flag("--version", version, "print version and config hash");

  auto* bands = app.add_subcommand("bands", "band structure CSV and diagram");
  int n_bands = 0;
  bands->add_option("--n-bands", n_bands);

  double ng = 0.0, px = NAN, py = NAN;
  std::string orientation;
  auto* mode = app.add_subcommand("mode", "guided Bloch mode at a group index");
  mode->add_option("--ng", ng);

  auto* emit = app.add_subcommand("emit", "one dipole emission report and field dump");
  emit->add_option("--ng", ng);
  emit->add_option("--x", px);
  emit->add_option("--y", py);
  emit->add_option("--orientation", orientation)->check(CLI::IsMember({"x", "y"}));

  auto* map = app.add_subcommand("map", "position maps over one unit cell");
  std::string quantity;
  std::vector<double> ng_list;
  map->add_option("--quantity", quantity)->check(CLI::IsMember({"f_wg", "f_rad", "beta"}));
  map->add_option("--ng", ng_list);

  auto* conv = app.add_subcommand("converge", "convergence sweep of the radiated power");
  std::string param;
  std::vector<double> values;
  conv->add_option("--param", param);
  conv->add_option("--values", values)->delimiter(',');

  auto* phc = app.add_subcommand("phc-rad", "defect-free crystal radiation map and frequency scan");
  bool scan = false;
  double omega = 0.0;
  phc->add_flag("--scan-frequency", scan);
  phc->add_option("--omega", omega);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    std::ostringstream o, er;
    int code = app.exit(e, o, er);
    out << o.str();
    err << er.str();
    return code == 0 ? 0 : 1;
  }

  RunConfig c;
  try {
    if (!config_path.empty()) c = load_config(config_path);
    if (!output_dir.empty()) c.output.directory = output_dir;
    if (!boundary.empty()) c.solver.boundary_mode = boundary;
    if (resolution > 0) {
      c.solver.resolution = resolution;
      if (config_path.empty()) c.solver.pml_cells = resolution;
    }
    if (n_bands > 0) c.study.n_bands = n_bands;
    if (ng > 0.0) c.study.ng = ng;
    if (std::isfinite(px) != std::isfinite(py)) throw ConfigError("--x and --y must be given together");
    if (std::isfinite(px)) c.study.position = {px, py};
    if (!orientation.empty()) c.study.orientation = orientation;
    if (!quantity.empty()) c.study.quantity = quantity;
    if (!ng_list.empty()) c.study.ng_targets = ng_list;
    if (!param.empty()) c.study.convergence.param = param;
    if (!values.empty()) c.study.convergence.values = values;
    if (omega > 0.0) c.study.phc.omega = omega;
    c.validate();
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }

  if (version) {
    out << "pcwsim " << kVersion << " config " << config_hash(c) << "\n";
    return 0;
  }
  if (app.get_subcommands().empty()) {
    err << app.help();
    return 1;
  }
  auto* sub = app.get_subcommands().front();
  Budget budget;
  try {
    std::filesystem::create_directories(c.output.directory);
    write_manifest(c, sub->get_name());
    if (sub == bands) cmd_bands(c, out, budget);
    else if (sub == mode) cmd_mode(c, out, budget);
    else if (sub == emit) cmd_emit(c, out, budget);
    else if (sub == map) cmd_map(c, jobs, out, budget);
    else if (sub == conv) cmd_converge(c, out, budget);
    else if (sub == phc) cmd_phc(c, jobs, scan, out, budget);
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    err << "failure: " << e.what() << "\n";
    return 2;
  }
  for (auto& n : budget.notes) err << "budget: " << n << "\n";
  return budget.ok ? 0 : 2;
}

}  // namespace pcw
