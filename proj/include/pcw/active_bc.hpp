#pragma once

#include "pcw/bloch_mode.hpp"
#include "pcw/fdfd.hpp"

namespace pcw {

// Amplitude and phase of the guided wave launched by a dipole of current I
// at (x, y) with orientation n_d. a0 satisfies a0^2 = F_wg P0 / (2 P_m): each
// end carries half of the guided power. phi = arg(-i E(r0) . n_d).
struct BcAmplitude {
  double a0 = 0.0;
  double phi = 0.0;
  double p_wg = 0.0;  // total guided power, both directions
  cd coef_right = 0.0;  // multiplies E(x, y) of the right-going mode
  cd coef_left = 0.0;   // multiplies conj(E(x, y)) of the right-going mode
};

BcAmplitude bc_amplitude_phase(const BlochMode& mode, double x, double y, Axis n_d,
                               cd current = 1.0);

// Ey on the planes x_minus and x_plus for grid rows with |y| < y_half.
ActiveBc synthesize_active_bc(const BlochMode& mode, const RasterGrid& grid, double x, double y,
                              Axis n_d, double x_plus, double x_minus, double y_half,
                              cd current = 1.0);

}  // namespace pcw
