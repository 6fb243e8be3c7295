#pragma once

#include <string>
#include <vector>

#include "pcw/geometry.hpp"

namespace pcw {

// Staggered sampling of one lattice period: res cells along x starting at
// x = 0, ny cells along y starting at y0.
struct CellSampling {
  int resolution = 0;
  int ny = 0;
  double y0 = 0.0;

  double d() const { return 1.0 / resolution; }
  bool operator==(const CellSampling& o) const {
    return resolution == o.resolution && ny == o.ny && std::abs(y0 - o.y0) < 1e-12;
  }
  bool operator!=(const CellSampling& o) const { return !(*this == o); }
};

// One guided Bloch mode. Field arrays hold the periodic part u(x, y) of
// F(x, y) = u(x, y) exp(2 pi i k x), sampled on the staggered points of one
// period: hz[i + res*j] at ((i+1/2)d, y0+(j+1/2)d), ey[i + res*j] at
// (i d, y0+(j+1/2)d), ex[i + res*j] at ((i+1/2)d, y0+j d) with j in [0, ny].
struct BlochMode {
  double omega = 0.0;       // a / lambda
  double omega_imag = 0.0;  // leakage of a lossy cross-section, zero for PWE modes
  double k = 0.0;           // 2 pi / a; sign follows the direction of positive flux
  double n_g = 0.0;
  double norm = 0.0;  // power per unit length through an x cut, 1/a times the cell integral
  std::string gauge = "none";
  std::string origin;  // "pwe" or "grid"
  CellSampling sampling;
  std::vector<cd> hz, ex, ey;

  // Full Bloch field at a grid point. x may lie in any period; y must be a
  // sample row. Throws when (x, y) is not on the sampled edges.
  cd field(Axis comp, double x, double y) const;
  cd hz_at(double x, double y) const;
  // Projection E(r0) . n_d of the full Bloch field.
  cd projection(double x, double y, Axis n_d) const { return field(n_d, x, y); }
};

// Rotate the mode so that the dominant transverse E component on the
// waveguide axis is real and positive at its largest-magnitude sample.
void fix_gauge(BlochMode& m);

}  // namespace pcw
