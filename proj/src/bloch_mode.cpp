#include "pcw/bloch_mode.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace pcw {

namespace {

int on_grid(double v, const char* what) {
  double r = std::round(v);
  if (std::abs(v - r) > 1e-6)
    throw std::invalid_argument(std::string(what) + " is not on the mode sampling");
  return static_cast<int>(r);
}

}  // namespace

cd BlochMode::field(Axis comp, double x, double y) const {
  const int res = sampling.resolution;
  const double d = sampling.d();
  int i, j;
  const std::vector<cd>* arr;
  int rows;
  if (comp == Axis::y) {
    i = on_grid(x / d, "x");
    j = on_grid((y - sampling.y0) / d - 0.5, "y");
    arr = &ey;
    rows = sampling.ny;
  } else {
    i = on_grid(x / d - 0.5, "x");
    j = on_grid((y - sampling.y0) / d, "y");
    arr = &ex;
    rows = sampling.ny + 1;
  }
  if (j < 0 || j >= rows) throw std::out_of_range("y outside the mode sampling");
  int im = ((i % res) + res) % res;
  double xx = comp == Axis::y ? i * d : (i + 0.5) * d;
  double ph = 2.0 * kPi * k * xx;
  return (*arr)[im + static_cast<size_t>(res) * j] * cd(std::cos(ph), std::sin(ph));
}

cd BlochMode::hz_at(double x, double y) const {
  const int res = sampling.resolution;
  const double d = sampling.d();
  int i = on_grid(x / d - 0.5, "x");
  int j = on_grid((y - sampling.y0) / d - 0.5, "y");
  if (j < 0 || j >= sampling.ny) throw std::out_of_range("y outside the mode sampling");
  int im = ((i % res) + res) % res;
  double ph = 2.0 * kPi * k * (i + 0.5) * d;
  return hz[im + static_cast<size_t>(res) * j] * cd(std::cos(ph), std::sin(ph));
}

void fix_gauge(BlochMode& m) {
  const int res = m.sampling.resolution, ny = m.sampling.ny;
  const double d = m.sampling.d();
  if (res < 1 || ny < 1) return;
  // Ey rows closest to the axis and the Ex row closest to the axis.
  int jy = static_cast<int>(std::floor(-m.sampling.y0 / d));
  jy = std::clamp(jy, 0, ny - 1);
  int jx = static_cast<int>(std::lround(-m.sampling.y0 / d));
  jx = std::clamp(jx, 0, ny);
  cd best = 0.0;
  for (int i = 0; i < res; ++i) {
    cd v = m.ey[i + static_cast<size_t>(res) * jy];
    if (std::abs(v) > std::abs(best)) best = v;
  }
  for (int i = 0; i < res; ++i) {
    cd v = m.ex[i + static_cast<size_t>(res) * jx];
    if (std::abs(v) > 1.000001 * std::abs(best)) best = v;
  }
  m.gauge = "axis-antinode-real-positive";
  if (std::abs(best) == 0.0) return;
  if (best.real() > 0.0 && std::abs(best.imag()) <= 1e-15 * best.real()) return;
  cd rot = std::conj(best) / std::abs(best);
  for (auto* arr : {&m.hz, &m.ex, &m.ey})
    for (auto& z : *arr) z *= rot;
}

}  // namespace pcw
