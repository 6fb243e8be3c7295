#include "pcw/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <yaml-cpp/yaml.h>

#include "pcw/io.hpp"

namespace pcw {

namespace {

std::string where(const YAML::Node& n) {
  return n.Mark().is_null() ? std::string() : " (line " + std::to_string(n.Mark().line + 1) + ")";
}

// Reads the keys of one mapping and rejects any it does not know.
class Block {
 public:
  Block(const YAML::Node& node, std::string path) : node_(node), path_(std::move(path)) {
    if (node_ && !node_.IsNull() && !node_.IsMap())
      throw ConfigError("'" + path_ + "' must be a mapping" + where(node_));
  }

  template <class T>
  void get(const std::string& key, T& out) {
    seen_.insert(key);
    if (!node_ || node_.IsNull()) return;
    YAML::Node v = node_[key];
    if (!v) return;
    try {
      out = v.as<T>();
    } catch (const YAML::Exception&) {
      throw ConfigError("bad value for '" + name(key) + "'" + where(v));
    }
  }

  Block sub(const std::string& key) {
    seen_.insert(key);
    YAML::Node v;
    if (node_ && node_.IsMap()) v = node_[key];
    return Block(v, name(key));
  }

  void finish() const {
    if (!node_ || !node_.IsMap()) return;
    for (auto it = node_.begin(); it != node_.end(); ++it) {
      std::string k = it->first.as<std::string>();
      if (!seen_.count(k)) throw ConfigError("unknown config key '" + name(k) + "'" + where(it->first));
    }
  }

 private:
  YAML::Node node_;
  std::string path_;
  std::set<std::string> seen_;
  std::string name(const std::string& k) const { return path_.empty() ? k : path_ + "." + k; }
};

}  // namespace

RunConfig parse_config(const std::string& yaml_text) {
  YAML::Node root;
  try {
    root = YAML::Load(yaml_text);
  } catch (const YAML::ParserException& e) {
    throw ConfigError(std::string("malformed config: ") + e.what());
  }
  RunConfig c;
  Block top(root, "");
  {
    Block b = top.sub("geometry");
    auto& g = c.geometry;
    b.get("a", g.a);
    b.get("r", g.r);
    b.get("n", g.n);
    b.get("m", g.m);
    b.get("l_periods", g.l_periods);
    b.get("defect", g.defect);
    b.finish();
  }
  {
    Block b = top.sub("solver");
    auto& s = c.solver;
    b.get("resolution", s.resolution);
    b.get("pml_cells", s.pml_cells);
    b.get("pml_order", s.pml_order);
    b.get("pml_r0", s.pml_r0);
    b.get("boundary_mode", s.boundary_mode);
    b.get("air_pad", s.air_pad);
    b.get("overhang", s.overhang);
    b.finish();
  }
  {
    Block b = top.sub("pwe");
    auto& p = c.pwe;
    b.get("cutoff", p.cutoff);
    b.get("air_pad", p.air_pad);
    b.get("concentration_threshold", p.concentration_threshold);
    b.get("concentration_halfwidth", p.concentration_halfwidth);
    b.get("band_samples", p.band_samples);
    b.finish();
  }
  {
    Block b = top.sub("study");
    auto& s = c.study;
    b.get("k_list", s.k_list);
    b.get("n_bands", s.n_bands);
    b.get("ng_targets", s.ng_targets);
    b.get("ng", s.ng);
    b.get("position", s.position);
    b.get("orientation", s.orientation);
    b.get("quantity", s.quantity);
    b.get("orientations", s.orientations);
    b.get("map_samples", s.map_samples);
    b.get("contour_levels", s.contour_levels);
    b.get("rad_margin", s.rad_margin);
    b.get("box_length", s.box_length);
    {
      Block v = b.sub("convergence");
      auto& cv = s.convergence;
      v.get("param", cv.param);
      v.get("values", cv.values);
      v.get("ng", cv.ng);
      v.get("orientation", cv.orientation);
      v.get("tolerance", cv.tolerance);
      v.finish();
    }
    {
      Block v = b.sub("phc");
      auto& ph = s.phc;
      v.get("omega", ph.omega);
      v.get("scan", ph.scan);
      v.get("scan_positions", ph.scan_positions);
      v.get("scan_orientations", ph.scan_orientations);
      v.finish();
    }
    b.finish();
  }
  {
    Block b = top.sub("output");
    auto& o = c.output;
    b.get("directory", o.directory);
    b.get("formats", o.formats);
    b.get("saturation", o.saturation);
    b.finish();
  }
  top.finish();
  c.validate();
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

namespace {

template <class T>
void seq(YAML::Emitter& e, const char* key, const T& v) {
  e << YAML::Key << key << YAML::Value << YAML::Flow << YAML::BeginSeq;
  for (auto& x : v) e << x;
  e << YAML::EndSeq;
}

}  // namespace

std::string serialize_config(const RunConfig& c) {
  YAML::Emitter e;
  e.SetDoublePrecision(17);
  e << YAML::BeginMap;
  e << YAML::Key << "geometry" << YAML::Value << YAML::BeginMap;
  e << YAML::Key << "a" << YAML::Value << c.geometry.a;
  e << YAML::Key << "r" << YAML::Value << c.geometry.r;
  e << YAML::Key << "n" << YAML::Value << c.geometry.n;
  e << YAML::Key << "m" << YAML::Value << c.geometry.m;
  e << YAML::Key << "l_periods" << YAML::Value << c.geometry.l_periods;
  e << YAML::Key << "defect" << YAML::Value << c.geometry.defect;
  e << YAML::EndMap;

  e << YAML::Key << "solver" << YAML::Value << YAML::BeginMap;
  e << YAML::Key << "resolution" << YAML::Value << c.solver.resolution;
  e << YAML::Key << "pml_cells" << YAML::Value << c.solver.pml_cells;
  e << YAML::Key << "pml_order" << YAML::Value << c.solver.pml_order;
  e << YAML::Key << "pml_r0" << YAML::Value << c.solver.pml_r0;
  e << YAML::Key << "boundary_mode" << YAML::Value << c.solver.boundary_mode;
  e << YAML::Key << "air_pad" << YAML::Value << c.solver.air_pad;
  e << YAML::Key << "overhang" << YAML::Value << c.solver.overhang;
  e << YAML::EndMap;

  e << YAML::Key << "pwe" << YAML::Value << YAML::BeginMap;
  e << YAML::Key << "cutoff" << YAML::Value << c.pwe.cutoff;
  e << YAML::Key << "air_pad" << YAML::Value << c.pwe.air_pad;
  e << YAML::Key << "concentration_threshold" << YAML::Value << c.pwe.concentration_threshold;
  e << YAML::Key << "concentration_halfwidth" << YAML::Value << c.pwe.concentration_halfwidth;
  e << YAML::Key << "band_samples" << YAML::Value << c.pwe.band_samples;
  e << YAML::EndMap;

  const StudyConfig& s = c.study;
  e << YAML::Key << "study" << YAML::Value << YAML::BeginMap;
  seq(e, "k_list", s.k_list);
  e << YAML::Key << "n_bands" << YAML::Value << s.n_bands;
  seq(e, "ng_targets", s.ng_targets);
  e << YAML::Key << "ng" << YAML::Value << s.ng;
  seq(e, "position", s.position);
  e << YAML::Key << "orientation" << YAML::Value << s.orientation;
  e << YAML::Key << "quantity" << YAML::Value << s.quantity;
  seq(e, "orientations", s.orientations);
  seq(e, "map_samples", s.map_samples);
  seq(e, "contour_levels", s.contour_levels);
  e << YAML::Key << "rad_margin" << YAML::Value << s.rad_margin;
  e << YAML::Key << "box_length" << YAML::Value << s.box_length;
  e << YAML::Key << "convergence" << YAML::Value << YAML::BeginMap;
  e << YAML::Key << "param" << YAML::Value << s.convergence.param;
  seq(e, "values", s.convergence.values);
  e << YAML::Key << "ng" << YAML::Value << s.convergence.ng;
  e << YAML::Key << "orientation" << YAML::Value << s.convergence.orientation;
  e << YAML::Key << "tolerance" << YAML::Value << s.convergence.tolerance;
  e << YAML::EndMap;
  e << YAML::Key << "phc" << YAML::Value << YAML::BeginMap;
  e << YAML::Key << "omega" << YAML::Value << s.phc.omega;
  seq(e, "scan", s.phc.scan);
  e << YAML::Key << "scan_positions" << YAML::Value << YAML::BeginSeq;
  for (auto& p : s.phc.scan_positions) e << YAML::Flow << YAML::BeginSeq << p[0] << p[1] << YAML::EndSeq;
  e << YAML::EndSeq;
  seq(e, "scan_orientations", s.phc.scan_orientations);
  e << YAML::EndMap;
  e << YAML::EndMap;

  e << YAML::Key << "output" << YAML::Value << YAML::BeginMap;
  e << YAML::Key << "directory" << YAML::Value << c.output.directory;
  seq(e, "formats", c.output.formats);
  e << YAML::Key << "saturation" << YAML::Value << c.output.saturation;
  e << YAML::EndMap;
  e << YAML::EndMap;
  return std::string(e.c_str()) + "\n";
}

std::string config_hash(const RunConfig& c) { return hex64(fnv1a64(serialize_config(c))); }

void RunConfig::validate() const {
  auto fail = [](const std::string& m) { throw ConfigError(m); };
  if (geometry.defect != "w1" && geometry.defect != "none" && geometry.defect != "uniform")
    fail("geometry.defect must be w1, none or uniform");
  if (!(geometry.a > 0.0)) fail("geometry.a must be positive");
  if (!(geometry.r > 0.0 && geometry.r < 0.5 * geometry.a)) fail("geometry.r must lie in (0, a/2)");
  if (!(geometry.n > 1.0)) fail("geometry.n must exceed 1");
  if (geometry.m < 1) fail("geometry.m must be at least 1");
  if (geometry.l_periods < 3 || geometry.l_periods % 2 == 0) fail("geometry.l_periods must be odd and at least 3");
  if (solver.resolution < 8) fail("solver.resolution must be at least 8");
  if (solver.pml_cells < 0) fail("solver.pml_cells must be non-negative");
  if (!(solver.pml_r0 > 0.0 && solver.pml_r0 < 1.0)) fail("solver.pml_r0 must lie in (0, 1)");
  boundary_from_string(solver.boundary_mode);
  if (pwe.cutoff < 7 || pwe.cutoff % 2 == 0) fail("pwe.cutoff must be odd and at least 7");
  if (study.n_bands < 1) fail("study.n_bands must be positive");
  if (!study.position.empty() && study.position.size() != 2) fail("study.position must be [x, y]");
  axis_from_string(study.orientation);
  for (auto& o : study.orientations) axis_from_string(o);
  quantity_from_string(study.quantity);
  if (study.map_samples[0] < 1 || study.map_samples[1] < 1) fail("study.map_samples must be positive");
  conv_param_from_string(study.convergence.param);
  axis_from_string(study.convergence.orientation);
  for (auto& o : study.phc.scan_orientations) axis_from_string(o);
  if (!(output.saturation > 0.0 && output.saturation <= 1.0)) fail("output.saturation must lie in (0, 1]");
}

CrystalGeometry RunConfig::crystal() const {
  const auto& g = geometry;
  if (g.defect == "uniform") return uniform_medium(g.n);
  if (g.defect == "none") return build_crystal(g.a, g.r, g.n, g.m, g.l_periods);
  return build_w1(g.a, g.r, g.n, g.m, g.l_periods);
}

StudySettings RunConfig::settings() const {
  StudySettings s;
  s.geometry = crystal();
  s.layout.resolution = solver.resolution;
  s.layout.l_periods = geometry.l_periods;
  s.layout.air_pad = solver.air_pad;
  s.layout.overhang = solver.overhang;
  s.layout.pml.cells = solver.pml_cells;
  s.layout.pml.order = solver.pml_order;
  s.layout.pml.r0 = solver.pml_r0;
  s.pwe.cutoff = pwe.cutoff;
  s.pwe.air_pad = pwe.air_pad;
  s.pwe.concentration_threshold = pwe.concentration_threshold;
  s.pwe.concentration_halfwidth = pwe.concentration_halfwidth;
  s.pwe.band_samples = pwe.band_samples;
  s.rad_margin = study.rad_margin;
  s.box_length = study.box_length;
  return s;
}

MapSpec RunConfig::map_spec() const {
  MapSpec m;
  m.quantity = quantity_from_string(study.quantity);
  m.orientations.clear();
  for (auto& o : study.orientations) m.orientations.push_back(axis_from_string(o));
  m.ng_targets = study.ng_targets;
  m.samples_x = study.map_samples[0];
  m.samples_y = study.map_samples[1];
  m.contour_levels = study.contour_levels;
  m.boundary = boundary_from_string(solver.boundary_mode);
  return m;
}

}  // namespace pcw
