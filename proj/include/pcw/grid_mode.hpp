#pragma once

#include <functional>
#include <optional>

#include <Eigen/Dense>

#include "pcw/bloch_mode.hpp"
#include "pcw/fdfd.hpp"

namespace pcw {

// Guided Bloch modes of the discrete operator on one period of the FDFD
// cross-section (same rows, permittivity and y PML as the driven domain).
// Only modes with Hz even about y = 0 are computed.
class GridModeSolver {
 public:
  using Guess = std::function<double(double)>;

  GridModeSolver(const CrystalGeometry& g, const DomainLayout& layout, Guess omega_guess,
                 double conc_threshold = 0.5, double conc_halfwidth = 1.0);

  struct Point {
    double omega = 0.0;
    double omega_imag = 0.0;
    double velocity = 0.0;  // d omega / d k, both in units of 2 pi / a
    double concentration = 0.0;
    double residual = 0.0;
    Eigen::VectorXcd h;  // upper half of the cross-section, row-major in x
  };

  // Mode of the primary band at Bloch wavevector k (2 pi / a) near the guess.
  std::optional<Point> solve(double k, double omega_guess) const;

  double omega_at(double k_band) const;
  double n_g_at(double k_band) const;
  double k_for_ng(double n_g, double k_lo = 0.27, double k_hi = 0.495) const;
  double k_for_omega(double omega, double k_lo = 0.27, double k_hi = 0.495) const;

  // Right-going mode of the primary band; k_band in (0, 0.5).
  BlochMode mode_at(double k_band) const;
  BlochMode mode_for_ng(double n_g) const { return mode_at(k_for_ng(n_g)); }

  const CellSampling& sampling() const { return sampling_; }
  const RasterGrid& cell() const { return cell_; }

 private:
  CrystalGeometry geom_;
  DomainLayout layout_;
  Guess guess_;
  double threshold_, halfwidth_;
  RasterGrid cell_;
  CellSampling sampling_;
  BlochMode to_mode(double k, const Point& p) const;
};

}  // namespace pcw
