#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "fixtures.hpp"
#include "pcw/sweeps.hpp"

using namespace pcw;
namespace fs = std::filesystem;

namespace {

MapSpec small_spec() {
  MapSpec spec;
  spec.quantity = Quantity::beta;
  spec.orientations = {Axis::y};
  spec.ng_targets = {20.0};
  spec.samples_x = 4;
  spec.samples_y = 6;
  return spec;
}

std::vector<std::string> read_lines(const fs::path& p) {
  std::ifstream in(p);
  std::vector<std::string> out;
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

}  // namespace

TEST_CASE("map sample positions are mirror symmetric") {
  MapSpec spec;
  for (int iy = 0; iy < spec.samples_y; ++iy)
    for (int ix = 0; ix < spec.samples_x; ++ix) {
      auto [x, y] = map_position(spec, ix, iy);
      auto [xm, ym] = map_position(spec, ix, spec.samples_y - 1 - iy);
      CHECK(xm == x);
      CHECK(ym == doctest::Approx(-y).epsilon(1e-14));
      CHECK(x > 0.0);
      CHECK(x < 1.0);
      CHECK(std::abs(y) < spec.y_extent);
    }
}

TEST_CASE("plateau detection") {
  std::vector<double> v{1, 2, 3, 4, 5};
  auto r = detect_plateau(v, {2.0, 1.4, 1.02, 1.0, 1.01}, 0.05);
  CHECK(r.converged);
  CHECK(r.plateau_start == 3.0);
  CHECK(r.plateau_value == doctest::Approx(1.01).epsilon(1e-12));
  CHECK(r.note.empty());

  r = detect_plateau(v, {1.0, 2.0, 1.0, 2.0, 1.0}, 0.05);
  CHECK_FALSE(r.converged);
  CHECK_FALSE(r.note.empty());

  // a single trailing point is not a plateau
  r = detect_plateau(v, {1.0, 2.0, 3.0, 4.0, 5.0}, 0.05);
  CHECK_FALSE(r.converged);

  r = detect_plateau(v, {1.0, 1.0, 1.0, 1.0, 1.0}, 0.05);
  CHECK(r.plateau_start == 1.0);
  CHECK(r.spread == 0.0);
}

TEST_CASE("convergence sweep validates its values") {
  ConvergenceSpec spec;
  spec.values = {10, 20, 15};
  CHECK_THROWS_AS(convergence_sweep(StudySettings{}, spec), std::invalid_argument);
  spec.values = {};
  CHECK_THROWS_AS(convergence_sweep(StudySettings{}, spec), std::invalid_argument);
  CHECK(conv_param_from_string(to_string(ConvParam::w_b)) == ConvParam::w_b);
  CHECK_THROWS(conv_param_from_string("depth"));
}

TEST_CASE("map record serialization round trip") {
  MapRecord r;
  r.target = 58.0;
  r.orientation = Axis::x;
  r.ix = 3;
  r.iy = 11;
  r.x = 0.21875;
  r.y = -0.1234567890123;
  r.report.f_wg = 13.214601234567;
  r.report.f_rad = 1.04e-4;
  r.report.beta = 0.99999212345;
  r.report.n_d = Axis::x;
  MapRecord back = record_from_json(to_json_line(r));
  CHECK(back.key() == r.key());
  CHECK(back.y == r.y);
  CHECK(back.report.f_wg == r.report.f_wg);
  CHECK(back.report.beta == r.report.beta);
  CHECK(std::isnan(back.report.reflection));
  CHECK(back.status == CellStatus::ok);

  r.status = CellStatus::missing;
  CHECK(std::isnan(record_from_json(to_json_line(r)).value(Quantity::beta)));
  CHECK(quantity_from_string("f_rad") == Quantity::f_rad);
  CHECK_THROWS(quantity_from_string("q"));
}

TEST_CASE("map run, resume and rendering") {
  const W1Study& st = test::small_w1();
  MapSpec spec = small_spec();
  fs::path dir = fs::temp_directory_path() / "pcw_map_test";
  fs::remove_all(dir);
  fs::create_directories(dir);
  RunOptions opt;
  opt.record_path = (dir / "records.jsonl").string();

  MapResult first = run_map(st, spec, opt);
  const int cells = spec.samples_x * spec.samples_y;
  CHECK(first.records.size() == static_cast<size_t>(cells));
  CHECK(first.computed == cells);
  CHECK(first.failed == 0);

  int missing = 0;
  for (const auto& r : first.records) {
    if (r.status == CellStatus::missing) {
      ++missing;
      CHECK_FALSE(st.in_dielectric(r.x, r.y, r.orientation));
      CHECK(std::isnan(r.value(Quantity::beta)));
    } else {
      CHECK(r.status == CellStatus::ok);
      CHECK(r.value(Quantity::beta) > 0.0);
      CHECK(r.value(Quantity::beta) <= 1.0);
    }
  }
  CHECK(missing > 0);

  // mirror partner about the waveguide axis
  for (const auto& r : first.records) {
    if (r.status != CellStatus::ok) continue;
    for (const auto& q : first.records)
      if (q.ix == r.ix && q.iy == spec.samples_y - 1 - r.iy) {
        REQUIRE(q.status == CellStatus::ok);
        CHECK(std::abs(q.report.f_wg / r.report.f_wg - 1.0) < 0.02);
        CHECK(std::abs(q.report.f_rad / r.report.f_rad - 1.0) < 0.02);
      }
  }

  // keep half of the records plus a torn line, then resume
  auto lines = read_lines(opt.record_path);
  REQUIRE(lines.size() == static_cast<size_t>(cells));
  {
    std::ofstream out(opt.record_path, std::ios::trunc);
    for (int i = 0; i < cells / 2; ++i) out << lines[i] << '\n';
    out << lines[cells / 2].substr(0, lines[cells / 2].size() / 2);
  }
  MapResult second = run_map(st, spec, opt);
  CHECK(second.resumed == cells / 2);
  CHECK(second.computed == cells - cells / 2);
  REQUIRE(second.records.size() == first.records.size());
  for (size_t i = 0; i < first.records.size(); ++i) {
    CHECK(second.records[i].key() == first.records[i].key());
    if (first.records[i].status == CellStatus::ok)
      CHECK(second.records[i].report.beta == first.records[i].report.beta);
  }

  MapResult third = run_map(st, spec, opt);
  CHECK(third.resumed == cells);
  CHECK(third.computed == 0);

  std::string csv = map_csv(first);
  CHECK(std::count(csv.begin(), csv.end(), '\n') >= cells + 1);

  MapImages img = map_images(first, spec, 20.0, Axis::y);
  CHECK(img.gray.width == spec.samples_x);
  CHECK(img.gray.height == spec.samples_y);
  REQUIRE(img.contours);
  CHECK(img.scale.find("-log10(1-beta)") != std::string::npos);
  for (const auto& r : first.records) {
    unsigned char g = img.gray.pixels[r.ix + spec.samples_x * (spec.samples_y - 1 - r.iy)];
    if (r.status == CellStatus::missing) CHECK(g == 255);
    else CHECK(g < 255);
  }

  spec.quantity = Quantity::f_wg;
  MapImages fw = map_images(first, spec, 20.0, Axis::y);
  CHECK_FALSE(fw.contours);
  fs::remove_all(dir);
  st.release_solvers();
}
