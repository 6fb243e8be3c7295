#pragma once

#include <functional>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "pcw/bloch_mode.hpp"
#include "pcw/geometry.hpp"

namespace pcw {

struct PweOptions {
  int cutoff = 9;                       // plane waves along x (odd)
  double air_pad = 1.5;                 // air beyond the slab edge in the supercell
  double concentration_halfwidth = 1.0; // |y| window used for the defect filter
  double concentration_threshold = 0.5;
  double k_min = 0.25;                  // start of the presampled guided band
  int band_samples = 33;
};

struct BandStructure {
  std::vector<double> k_points;
  std::vector<std::vector<double>> bands;     // ascending per k
  std::vector<std::vector<int>> parity;       // +1 even (Hz symmetric), -1 odd
  std::vector<std::vector<double>> concentration;
  std::vector<std::vector<double>> n_g;       // from the energy velocity of each eigenvector
  double max_residual = 0.0;
  double max_parity_leak = 0.0;
};

// Plane-wave supercell for a geometry. Supercells of W1 and bounded crystals
// span the slab plus air padding; unbounded media use a square cell.
class PweSupercell {
 public:
  PweSupercell(const CrystalGeometry& g, int cutoff, double air_pad = 1.5);

  struct Eig {
    double omega;
    int parity;
    double concentration;
    double residual;
    double parity_leak;
    Eigen::VectorXcd h;  // full-basis coefficients of Hz
  };

  // Eigenpairs of one parity block at Bloch wavevector k, lowest n first.
  std::vector<Eig> solve(double k, int parity, int n, double conc_halfwidth = 1.0) const;

  // Group velocity d omega / d k from the eigenvector (flux over energy).
  double energy_velocity(double k, const Eig& e) const;

  BlochMode sample(double k, const Eig& e, const CellSampling& s) const;

  double period_y() const { return ly_; }
  int size() const { return static_cast<int>(gx_.size()); }

 private:
  CrystalGeometry geom_;
  int np_, nq_;
  double ly_;
  std::vector<int> ip_, iq_;
  std::vector<double> gx_, gy_;
  Eigen::MatrixXd eta_re_;
  Eigen::MatrixXcd eta_;
  std::vector<int> even_idx_, odd_idx_;
  std::vector<std::pair<int, int>> partner_;
  cd eps_hat(int dp, int dq) const;
};

BandStructure solve_bands(const CrystalGeometry& g, const std::vector<double>& k_list,
                          int n_bands, int cutoff, const PweOptions& opt = {});

struct GapEdges {
  double lower = 0.0;
  double upper = 0.0;
  double mid() const { return 0.5 * (lower + upper); }
  bool open() const { return upper > lower; }
};

// Complete TE gap of the infinite triangular lattice (bands 1 and 2) from a
// sampled Gamma-M-K-Gamma path.
GapEdges bulk_gap(double r, double n, int cutoff = 11, int samples_per_segment = 12);

struct GroupIndexResult {
  double n_g = 0.0;
  double dk = 0.0;
  double richardson_change = 0.0;
};

// n_g = 1 / |d omega / d k| by centred differences with adaptive step and a
// Richardson check. Throws std::domain_error near a band edge.
GroupIndexResult group_index(const std::function<double(double)>& band, double k,
                             double dk0 = 0.01, double slope_floor = 1e-4);

struct GuidedBand {
  std::vector<double> k;      // presampled, ascending
  std::vector<double> omega;  // primary even guided band, NaN where not found
};

class GuidedModeSolver {
 public:
  GuidedModeSolver(const CrystalGeometry& g, const PweOptions& opt = {});

  const GuidedBand& band() const { return band_; }
  const GapEdges& gap() const { return gap_; }
  // Primary band eigenpair at k (band coordinate, 0 < k <= 0.5).
  std::optional<PweSupercell::Eig> band_point(double k) const;
  double omega_at(double k) const;
  double n_g_at(double k) const;

  double k_for_omega(double omega) const;
  double k_for_ng(double n_g) const;

  BlochMode mode_at_k(double k, const CellSampling& s) const;
  BlochMode mode_for_omega(double omega, const CellSampling& s) const;
  BlochMode mode_for_ng(double n_g, const CellSampling& s) const;

  const PweSupercell& supercell() const { return cell_; }
  CellSampling default_sampling(int resolution = 16) const;

 private:
  CrystalGeometry geom_;
  PweOptions opt_;
  PweSupercell cell_;
  GapEdges gap_;
  GuidedBand band_;
};

// Waveguide Purcell factor of a 2D mode for unit current on an edge,
// referenced to the continuum line-source power omega |I|^2 / 16.
double purcell_wg_continuum(const BlochMode& m, double x, double y, Axis n_d);

}  // namespace pcw
