#include "pcw/active_bc.hpp"

#include <cmath>
#include <stdexcept>

namespace pcw {

BcAmplitude bc_amplitude_phase(const BlochMode& mode, double x, double y, Axis n_d, cd current) {
  if (!(mode.norm > 0.0)) throw std::invalid_argument("mode flux must be positive");
  cd e = mode.projection(x, y, n_d);
  BcAmplitude b;
  double ia = std::abs(current);
  b.p_wg = std::norm(e) * ia * ia / (8.0 * mode.norm);
  b.a0 = std::abs(e) * ia / (4.0 * mode.norm);
  b.phi = std::arg(cd(0.0, -1.0) * e);
  cd unit = ia > 0 ? current / ia : cd(0.0);
  cd ep(std::cos(b.phi), std::sin(b.phi));
  b.coef_right = cd(0.0, 1.0) * b.a0 * std::conj(ep) * unit;
  b.coef_left = cd(0.0, -1.0) * b.a0 * ep * unit;
  return b;
}

ActiveBc synthesize_active_bc(const BlochMode& mode, const RasterGrid& grid, double x, double y,
                              Axis n_d, double x_plus, double x_minus, double y_half,
                              cd current) {
  CellSampling gs{grid.resolution, grid.ny, grid.y0};
  if (mode.sampling != gs)
    throw std::invalid_argument("mode sampling does not match the FDFD grid rows");
  if (!(x_minus < x && x < x_plus)) throw std::invalid_argument("dipole must lie between the planes");
  BcAmplitude amp = bc_amplitude_phase(mode, x, y, n_d, current);
  ActiveBc bc;
  bc.x_minus = x_minus;
  bc.x_plus = x_plus;
  bc.y_half = y_half;
  bc.a0 = amp.a0;
  bc.phi = amp.phi;
  bc.coef_right = amp.coef_right;
  bc.coef_left = amp.coef_left;
  bc.mode_omega = mode.omega;
  bc.mode_k = mode.k;
  bc.ey_plus.assign(grid.ny, 0.0);
  bc.ey_minus.assign(grid.ny, 0.0);
  for (int j = 0; j < grid.ny; ++j) {
    if (!(std::abs(grid.yc(j)) < y_half)) continue;
    bc.ey_plus[j] = amp.coef_right * mode.field(Axis::y, x_plus, grid.yc(j));
    bc.ey_minus[j] = amp.coef_left * std::conj(mode.field(Axis::y, x_minus, grid.yc(j)));
  }
  return bc;
}

}  // namespace pcw
