#pragma once

#include <limits>
#include <stdexcept>
#include <string>

#include "pcw/bloch_mode.hpp"
#include "pcw/fdfd.hpp"

namespace pcw {

enum class Faces { all, exclude_x_normal };

// Axis-aligned flux surface; edges must lie on grid lines.
struct FluxBox {
  double x_lo = 0.0, x_hi = 0.0, y_lo = 0.0, y_hi = 0.0;
  Faces faces = Faces::all;
};

struct FaceFlux {
  double left = 0.0, right = 0.0, bottom = 0.0, top = 0.0;  // outward
  double x_normal() const { return left + right; }
  double y_normal() const { return bottom + top; }
  double total() const { return x_normal() + y_normal(); }
};

struct NumericalFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Outward time-averaged flux through each face. Throws std::invalid_argument
// when a face is off the grid, crosses PML or removed cells, or runs along
// the source edge.
FaceFlux face_flux(const FieldSolution& s, const FluxBox& box);
double poynting_flux(const FieldSolution& s, const FluxBox& box);

// Flux through the y-normal faces only; both faces must lie outside the
// crystal slab |y| < slab_half_width.
double radiated_power(const FieldSolution& s, const FluxBox& box, double slab_half_width);

// Power of a unit-current edge dipole in uniform medium of index n on the
// same discretization. Cached per (omega, n, resolution, orientation).
double reference_power(double omega, double n, int resolution, Axis orientation = Axis::y);

// Guided power |E.n|^2 |I|^2 / (8 P_m), both directions, of a mode
// excited by an edge dipole, and its Purcell factor against p0.
double guided_power(const BlochMode& m, double x, double y, Axis n_d, cd current = 1.0);
double purcell_wg(const BlochMode& m, double x, double y, Axis n_d, double p0);

struct EmissionInputs {
  double omega = 0.0;
  double n_g = 0.0;
  double x = 0.0, y = 0.0;
  Axis n_d = Axis::y;
  double p_total = 0.0;
  double p_rad = 0.0;
  double p0 = 0.0;
  double f_wg = 0.0;
};

struct EmissionReport {
  double omega = 0.0;
  double n_g = 0.0;
  double x = 0.0, y = 0.0;
  Axis n_d = Axis::y;
  double p_total = 0.0;
  double p_rad = 0.0;
  double p0 = 0.0;
  double f_wg = 0.0;
  double f_rad = 0.0;
  double f_total = 0.0;
  double beta = 0.0;
  double beta_prime = 0.0;
  double beta_discrepancy = 0.0;
  // Diagnostics filled by the drivers; NaN when not measured.
  double p_wg_flux = std::numeric_limits<double>::quiet_NaN();
  double a0_closure = std::numeric_limits<double>::quiet_NaN();
  double reflection = std::numeric_limits<double>::quiet_NaN();
  double residual = std::numeric_limits<double>::quiet_NaN();
  std::string boundary = "active";
};

// Composes the report. Throws NumericalFailure on negative powers.
EmissionReport beta_factor(const EmissionInputs& in);

std::string report_csv_header();
std::string report_csv_row(const EmissionReport& r);

}  // namespace pcw
