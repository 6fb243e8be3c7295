#include <cmath>

#include "doctest.h"
#include "pcw/pwe.hpp"
#include "fixtures.hpp"

using namespace pcw;

namespace {

const GuidedModeSolver& w1_solver() { return test::small_w1().pwe(); }

}  // namespace

TEST_CASE("uniform medium reproduces the folded light line") {
  auto g = uniform_medium(3.5);
  auto bs = solve_bands(g, {0.25, 0.5}, 4, 15);
  CHECK(std::abs(bs.bands[0][0] - 0.25 / 3.5) / (0.25 / 3.5) < 1e-8);
  CHECK(std::abs(bs.bands[1][0] - 0.5 / 3.5) / (0.5 / 3.5) < 1e-8);
  CHECK(std::abs(bs.bands[1][1] - 0.5 / 3.5) / (0.5 / 3.5) < 1e-8);
  CHECK(bs.n_g[0][0] == doctest::Approx(3.5).epsilon(1e-8));
}

TEST_CASE("band structure invariants on the W1 supercell") {
  auto g = build_w1(1.0, 0.3, 3.5, 4, 33);
  std::vector<double> ks{0.1, 0.3, -0.3, 0.45};
  auto bs = solve_bands(g, ks, 10, 9);
  CHECK(bs.max_residual < 1e-8);
  CHECK(bs.max_parity_leak < 1e-6);
  for (auto& b : bs.bands) {
    for (double w : b) CHECK(w >= 0.0);
    for (size_t i = 1; i < b.size(); ++i) CHECK(b[i] >= b[i - 1]);
  }
  for (size_t i = 0; i < bs.bands[1].size(); ++i)
    CHECK(bs.bands[1][i] == doctest::Approx(bs.bands[2][i]).epsilon(1e-10));
  for (auto& p : bs.parity)
    for (int s : p) CHECK((s == 1 || s == -1));
}

TEST_CASE("solve_bands rejects a cutoff below 7") {
  CHECK_THROWS_AS(solve_bands(uniform_medium(3.5), {0.1}, 2, 5), std::invalid_argument);
}

TEST_CASE("group_index of artificial bands") {
  auto linear = [](double k) { return k / 3.5; };
  for (double k : {0.1, 0.25, 0.4}) CHECK(group_index(linear, k).n_g == doctest::Approx(3.5).epsilon(1e-10));
  auto curved = [](double k) { return 0.2 + 0.05 * std::sin(2.0 * k); };
  auto r = group_index(curved, 0.3);
  CHECK(r.n_g == doctest::Approx(1.0 / (0.1 * std::cos(0.6))).epsilon(1e-6));
  CHECK(r.richardson_change < 1e-3);
  auto edge = [](double k) { return 0.3 - (k - 0.5) * (k - 0.5); };
  CHECK_THROWS_AS(group_index(edge, 0.5), std::domain_error);
}

TEST_CASE("bulk gap of the triangular lattice") {
  GapEdges gap = bulk_gap(0.3, 3.5);
  CHECK(gap.open());
  CHECK(gap.lower == doctest::Approx(0.2049).epsilon(2e-3));
  CHECK(gap.upper == doctest::Approx(0.2703).epsilon(2e-3));
}

TEST_CASE("primary guided band of W1") {
  const auto& s = w1_solver();
  const auto& b = s.band();
  int found = 0;
  for (size_t i = 0; i < b.k.size(); ++i)
    if (std::isfinite(b.omega[i])) {
      ++found;
      CHECK(b.omega[i] > s.gap().lower);
      CHECK(b.omega[i] < s.gap().upper);
    }
  CHECK(found >= static_cast<int>(b.k.size()) - 2);
  // group index grows toward the band edge
  double prev = 0.0;
  for (double k : {0.3, 0.35, 0.4, 0.44, 0.47}) {
    double ng = s.n_g_at(k);
    CHECK(ng > prev);
    prev = ng;
  }
}

TEST_CASE("guided mode on a sampled band point matches the band") {
  const auto& s = w1_solver();
  const auto& b = s.band();
  size_t i = b.k.size() / 2;
  BlochMode m = s.mode_at_k(b.k[i], s.default_sampling(16));
  CHECK(m.omega == doctest::Approx(b.omega[i]).epsilon(1e-12));
  CHECK(m.norm > 0.0);
  CHECK(m.k < 0.0);  // right-going: negative band slope
  BlochMode again = m;
  fix_gauge(again);
  CHECK(again.hz == m.hz);
  CHECK(again.ey == m.ey);
  CHECK(m.gauge != "none");
}

TEST_CASE("finite-difference group index agrees with the energy velocity") {
  const auto& s = w1_solver();
  for (double k : {0.32, 0.4, 0.44}) {
    auto e = s.band_point(k);
    REQUIRE(e);
    double v = s.supercell().energy_velocity(k, *e);
    double fd = group_index([&](double q) { return s.omega_at(q); }, k, 0.004).n_g;
    CHECK(std::abs(fd * std::abs(v) - 1.0) < 0.01);
  }
}

TEST_CASE("frequency and group-index targets") {
  const auto& s = w1_solver();
  double k = s.k_for_omega(0.215);
  CHECK(s.omega_at(k) == doctest::Approx(0.215).epsilon(1e-9));
  CHECK_THROWS_AS(s.k_for_omega(0.26), std::out_of_range);
  CHECK_THROWS_AS(s.k_for_omega(0.19), std::out_of_range);
  for (double ng : {5.0, 20.0, 58.0}) {
    BlochMode m = s.mode_for_ng(ng, s.default_sampling(16));
    CHECK(m.n_g == doctest::Approx(ng).epsilon(1e-3));
  }
}

TEST_CASE("bulk crystal suppresses emission inside the PWE gap") {
  // Independent FDFD oracle for the gap: the emitted power of a dipole in the
  // defect-free crystal collapses at mid-gap and recovers outside.
  GapEdges gap = bulk_gap(0.3, 3.5);
  StudySettings st;
  st.geometry = build_crystal(1.0, 0.3, 3.5, 4, 15);
  st.layout.resolution = 16;
  st.layout.l_periods = 15;
  st.layout.pml.cells = 16;
  CrystalStudy cs(st);
  double mid = cs.emit(gap.mid(), 0.5, 0.0, Axis::y).f_rad;
  double below = cs.emit(0.15, 0.5, 0.0, Axis::y).f_rad;
  double above = cs.emit(0.32, 0.5, 0.0, Axis::y).f_rad;
  CHECK(mid < 0.1);
  CHECK(below > 10.0 * mid);
  CHECK(above > 10.0 * mid);
}
