#include "pcw/pwe.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <Eigen/Eigenvalues>

namespace pcw {

namespace {

double airy(double u) { return u < 1e-12 ? 1.0 : 2.0 * std::cyl_bessel_j(1.0, u) / u; }

int odd_at_least(int v) { return v % 2 == 0 ? v + 1 : v; }

}  // namespace

PweSupercell::PweSupercell(const CrystalGeometry& g, int cutoff, double air_pad) : geom_(g) {
  g.validate();
  if (cutoff < 7) throw std::invalid_argument("plane-wave cutoff must be at least 7");
  if (g.has_holes && !g.bounded)
    throw std::invalid_argument("unbounded crystals use bulk_gap, not a supercell");
  if (g.has_holes && g.hole_radius >= 0.5 * kRowPitch)
    throw std::invalid_argument("holes must lie inside the slab for the supercell expansion");
  np_ = odd_at_least(cutoff);
  if (g.bounded) {
    ly_ = 2.0 * (g.slab_half_width() + air_pad);
    nq_ = odd_at_least(static_cast<int>(std::ceil(cutoff * ly_)));
  } else {
    ly_ = 1.0;
    nq_ = np_;
  }
  const int P = (np_ - 1) / 2, Q = (nq_ - 1) / 2;
  const int N = np_ * nq_;
  for (int q = -Q; q <= Q; ++q)
    for (int p = -P; p <= P; ++p) {
      ip_.push_back(p);
      iq_.push_back(q);
      gx_.push_back(p);
      gy_.push_back(q / ly_);
    }

  // Fourier table of eps over all index differences.
  const int tp = 2 * P, tq = 2 * Q;
  std::vector<cd> table(static_cast<size_t>(2 * tp + 1) * (2 * tq + 1));
  for (int dq = -tq; dq <= tq; ++dq)
    for (int dp = -tp; dp <= tp; ++dp) table[(dp + tp) + (2 * tp + 1) * (dq + tq)] = eps_hat(dp, dq);

  Eigen::MatrixXcd E(N, N);
  for (int t = 0; t < N; ++t)
    for (int s = 0; s < N; ++s)
      E(s, t) = table[(ip_[s] - ip_[t] + tp) + (2 * tp + 1) * (iq_[s] - iq_[t] + tq)];
  Eigen::LLT<Eigen::MatrixXcd> llt(E);
  if (llt.info() != Eigen::Success) throw std::runtime_error("permittivity matrix not positive definite");
  eta_ = llt.solve(Eigen::MatrixXcd::Identity(N, N));
  eta_ = 0.5 * (eta_ + eta_.adjoint()).eval();

  auto index = [&](int p, int q) { return (p + P) + np_ * (q + Q); };
  for (int q = 0; q <= Q; ++q)
    for (int p = -P; p <= P; ++p) {
      int plus = index(p, q), minus = index(p, -q);
      if (q == 0) {
        even_idx_.push_back(static_cast<int>(partner_.size()));
        partner_.push_back({plus, -1});
      } else {
        even_idx_.push_back(static_cast<int>(partner_.size()));
        partner_.push_back({plus, minus});
        odd_idx_.push_back(static_cast<int>(partner_.size()));
        partner_.push_back({plus, minus});
      }
    }
}

cd PweSupercell::eps_hat(int dp, int dq) const {
  const double eb = geom_.eps_background();
  if (!geom_.bounded) return (dp == 0 && dq == 0) ? cd(eb) : cd(0.0);
  const double gx = dp, gy = dq / ly_;
  const double yc = geom_.slab_half_width();
  cd v = (dp == 0 && dq == 0) ? cd(1.0) : cd(0.0);
  if (dp == 0) {
    double strip = dq == 0 ? 2.0 * yc / ly_ : std::sin(2.0 * kPi * gy * yc) / (kPi * gy * ly_);
    v += (eb - 1.0) * strip;
  }
  if (geom_.has_holes) {
    const double r = geom_.hole_radius;
    const double gnorm = std::hypot(gx, gy);
    const double form = kPi * r * r / ly_ * airy(2.0 * kPi * gnorm * r);
    for (int j = -geom_.n_rows_half; j <= geom_.n_rows_half; ++j) {
      if (!geom_.row_present(j)) continue;
      double ph = -2.0 * kPi * (gx * geom_.hole_x(0, j) + gy * geom_.hole_y(j));
      v -= (eb - 1.0) * form * cd(std::cos(ph), std::sin(ph));
    }
  }
  return v;
}

std::vector<PweSupercell::Eig> PweSupercell::solve(double k, int parity, int n,
                                                   double conc_halfwidth) const {
  const std::vector<int>& blk = parity > 0 ? even_idx_ : odd_idx_;
  const int nb = static_cast<int>(blk.size());
  const int N = size();
  const double isq2 = 1.0 / std::sqrt(2.0);
  // Basis vector b = c1 |s1> + c2 |s2>.
  std::vector<int> s1(nb), s2(nb);
  std::vector<double> c1(nb), c2(nb);
  for (int a = 0; a < nb; ++a) {
    auto pr = partner_[blk[a]];
    s1[a] = pr.first;
    s2[a] = pr.second;
    if (pr.second < 0) {
      c1[a] = 1.0;
      c2[a] = 0.0;
    } else {
      c1[a] = isq2;
      c2[a] = parity > 0 ? isq2 : -isq2;
    }
  }
  auto theta = [&](int s, int t) {
    return ((k + gx_[s]) * (k + gx_[t]) + gy_[s] * gy_[t]) * eta_(s, t);
  };
  Eigen::MatrixXcd T(nb, nb);
  for (int b = 0; b < nb; ++b)
    for (int a = 0; a < nb; ++a) {
      cd v = c1[a] * c1[b] * theta(s1[a], s1[b]);
      if (s2[b] >= 0) v += c1[a] * c2[b] * theta(s1[a], s2[b]);
      if (s2[a] >= 0) v += c2[a] * c1[b] * theta(s2[a], s1[b]);
      if (s2[a] >= 0 && s2[b] >= 0) v += c2[a] * c2[b] * theta(s2[a], s2[b]);
      T(a, b) = v;
    }
  T = 0.5 * (T + T.adjoint()).eval();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(T);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("plane-wave eigensolver failed at k = " + std::to_string(k));

  const int P = (np_ - 1) / 2, Q = (nq_ - 1) / 2;
  const double w = conc_halfwidth;
  std::vector<Eig> out;
  for (int m = 0; m < std::min(n, nb); ++m) {
    Eig e;
    double lam = es.eigenvalues()(m);
    e.omega = std::sqrt(std::max(0.0, lam));
    e.parity = parity > 0 ? 1 : -1;
    Eigen::VectorXcd v = es.eigenvectors().col(m);
    e.residual = (T * v - lam * v).norm() / v.norm();
    e.h = Eigen::VectorXcd::Zero(N);
    for (int a = 0; a < nb; ++a) {
      e.h(s1[a]) += c1[a] * v(a);
      if (s2[a] >= 0) e.h(s2[a]) += c2[a] * v(a);
    }
    // Mirror leakage: h(p, -q) against parity * h(p, q).
    double leak = 0.0;
    for (int s = 0; s < N; ++s) {
      int mirror = (ip_[s] + P) + np_ * (-iq_[s] + Q);
      leak += std::norm(e.h(s) - static_cast<double>(e.parity) * e.h(mirror));
    }
    e.parity_leak = std::sqrt(leak) / (2.0 * e.h.norm());
    // Fraction of |Hz|^2 within |y| < w.
    double num = 0.0, den = 0.0;
    for (int p = -P; p <= P; ++p) {
      for (int q = -Q; q <= Q; ++q) {
        cd hq = e.h((p + P) + np_ * (q + Q));
        den += std::norm(hq) * ly_;
        for (int q2 = -Q; q2 <= Q; ++q2) {
          int dq = q2 - q;
          double S = dq == 0 ? 2.0 * w
                             : std::sin(2.0 * kPi * dq * w / ly_) / (kPi * dq / ly_);
          num += (std::conj(hq) * e.h((p + P) + np_ * (q2 + Q))).real() * S;
        }
      }
    }
    e.concentration = den > 0 ? num / den : 0.0;
    out.push_back(std::move(e));
  }
  return out;
}

double PweSupercell::energy_velocity(double k, const Eig& e) const {
  const int N = size();
  Eigen::VectorXcd kh(N);
  for (int s = 0; s < N; ++s) kh(s) = (k + gx_[s]) * e.h(s);
  cd num = e.h.dot(eta_ * kh);  // h^H eta K h
  double dlam = 2.0 * num.real();
  return dlam / (2.0 * e.omega * e.h.squaredNorm());
}

BlochMode PweSupercell::sample(double k, const Eig& e, const CellSampling& s) const {
  const double d = s.d();
  if (s.resolution < 1 || s.ny < 1) throw std::invalid_argument("empty sampling");
  if (s.y0 < -0.5 * ly_ - 1e-12 || s.y0 + s.ny * d > 0.5 * ly_ + 1e-12)
    throw std::invalid_argument("sampling extends beyond the plane-wave supercell");
  const int N = size();
  const double f = e.omega;
  Eigen::VectorXcd Dx(N), Dy(N);
  for (int t = 0; t < N; ++t) {
    Dx(t) = -gy_[t] * e.h(t) / f;
    Dy(t) = (k + gx_[t]) * e.h(t) / f;
  }
  Eigen::VectorXcd Ex = eta_ * Dx, Ey = eta_ * Dy;

  const int res = s.resolution, ny = s.ny;
  const int P = (np_ - 1) / 2, Q = (nq_ - 1) / 2;
  auto expo = [](double ph) { return cd(std::cos(ph), std::sin(ph)); };
  // Separable evaluation: phase tables along x (cell and edge points) and y.
  auto eval = [&](const Eigen::VectorXcd& c, bool x_edge, bool y_edge, std::vector<cd>& out,
                  int nrows) {
    out.assign(static_cast<size_t>(res) * nrows, cd(0.0));
    std::vector<cd> tx(static_cast<size_t>(np_) * res), ty(static_cast<size_t>(nq_) * nrows);
    for (int p = -P; p <= P; ++p)
      for (int i = 0; i < res; ++i) {
        double x = x_edge ? i * d : (i + 0.5) * d;
        tx[(p + P) * res + i] = expo(2.0 * kPi * p * x);
      }
    for (int q = -Q; q <= Q; ++q)
      for (int j = 0; j < nrows; ++j) {
        double y = s.y0 + (y_edge ? j * d : (j + 0.5) * d);
        ty[(q + Q) * nrows + j] = expo(2.0 * kPi * q / ly_ * y);
      }
    std::vector<cd> row(static_cast<size_t>(np_));
    for (int j = 0; j < nrows; ++j) {
      for (int p = -P; p <= P; ++p) {
        cd acc = 0.0;
        for (int q = -Q; q <= Q; ++q) acc += c((p + P) + np_ * (q + Q)) * ty[(q + Q) * nrows + j];
        row[p + P] = acc;
      }
      for (int i = 0; i < res; ++i) {
        cd acc = 0.0;
        for (int p = -P; p <= P; ++p) acc += row[p + P] * tx[(p + P) * res + i];
        out[i + static_cast<size_t>(res) * j] = acc;
      }
    }
  };
  BlochMode m;
  m.omega = e.omega;
  m.k = k;
  m.origin = "pwe";
  m.sampling = s;
  eval(e.h, false, false, m.hz, ny);
  eval(Ey, true, false, m.ey, ny);
  eval(Ex, false, true, m.ex, ny + 1);
  m.norm = 0.5 * ly_ * e.h.dot(Ey).real();
  double v = energy_velocity(k, e);
  m.n_g = v != 0.0 ? 1.0 / std::abs(v) : std::numeric_limits<double>::infinity();
  // Scale to unit peak so that sampled fields are O(1).
  double peak = 0.0;
  for (auto& z : m.ey) peak = std::max(peak, std::abs(z));
  for (auto& z : m.ex) peak = std::max(peak, std::abs(z));
  if (peak > 0) {
    for (auto* arr : {&m.hz, &m.ex, &m.ey})
      for (auto& z : *arr) z /= peak;
    m.norm /= peak * peak;
  }
  fix_gauge(m);
  return m;
}

BandStructure solve_bands(const CrystalGeometry& g, const std::vector<double>& k_list,
                          int n_bands, int cutoff, const PweOptions& opt) {
  PweSupercell cell(g, cutoff, opt.air_pad);
  BandStructure bs;
  bs.k_points = k_list;
  for (double k : k_list) {
    auto ev = cell.solve(k, +1, n_bands, opt.concentration_halfwidth);
    auto od = cell.solve(k, -1, n_bands, opt.concentration_halfwidth);
    std::vector<PweSupercell::Eig*> all;
    for (auto& e : ev) all.push_back(&e);
    for (auto& e : od) all.push_back(&e);
    std::stable_sort(all.begin(), all.end(),
                     [](auto* a, auto* b) { return a->omega < b->omega; });
    std::vector<double> om;
    std::vector<int> par;
    std::vector<double> conc;
    std::vector<double> ng;
    for (int i = 0; i < n_bands && i < static_cast<int>(all.size()); ++i) {
      om.push_back(all[i]->omega);
      double v = std::abs(cell.energy_velocity(k, *all[i]));
      ng.push_back(v > 0.0 ? 1.0 / v : std::numeric_limits<double>::infinity());
      par.push_back(all[i]->parity);
      conc.push_back(all[i]->concentration);
      bs.max_residual = std::max(bs.max_residual, all[i]->residual);
      bs.max_parity_leak = std::max(bs.max_parity_leak, all[i]->parity_leak);
    }
    bs.bands.push_back(om);
    bs.parity.push_back(par);
    bs.concentration.push_back(conc);
    bs.n_g.push_back(ng);
  }
  return bs;
}

GapEdges bulk_gap(double r, double n, int cutoff, int samples_per_segment) {
  if (!(r > 0.0 && r < 0.5) || !(n > 1.0)) throw std::invalid_argument("invalid crystal");
  const int M = std::max(3, cutoff / 2);
  const double s3 = std::sqrt(3.0);
  std::vector<double> gx, gy;
  for (int i = -M; i <= M; ++i)
    for (int j = -M; j <= M; ++j) {
      gx.push_back(i * 1.0 + j * 0.0);
      gy.push_back(-i / s3 + j * 2.0 / s3);
    }
  const int N = static_cast<int>(gx.size());
  const double eb = n * n;
  const double fill = kPi * r * r / (0.5 * s3);
  Eigen::MatrixXd E(N, N);
  for (int t = 0; t < N; ++t)
    for (int s = 0; s < N; ++s) {
      double dx = gx[s] - gx[t], dy = gy[s] - gy[t];
      double val = (1.0 - eb) * fill * airy(2.0 * kPi * std::hypot(dx, dy) * r);
      if (s == t) val += eb;
      E(s, t) = val;
    }
  Eigen::MatrixXd eta = E.llt().solve(Eigen::MatrixXd::Identity(N, N));
  eta = 0.5 * (eta + eta.transpose()).eval();

  const double Mx = 0.0, My = 1.0 / s3, Kx = 1.0 / 3.0, Ky = 1.0 / s3;
  std::vector<std::pair<double, double>> path;
  auto seg = [&](double x0, double y0, double x1, double y1) {
    for (int i = 0; i < samples_per_segment; ++i) {
      double t = static_cast<double>(i) / samples_per_segment;
      path.push_back({x0 + t * (x1 - x0), y0 + t * (y1 - y0)});
    }
  };
  seg(0, 0, Mx, My);
  seg(Mx, My, Kx, Ky);
  seg(Kx, Ky, 0, 0);
  path.push_back({Mx, My});
  path.push_back({Kx, Ky});
  GapEdges gap{0.0, std::numeric_limits<double>::infinity()};
  for (auto [kx, ky] : path) {
    Eigen::MatrixXd T(N, N);
    for (int t = 0; t < N; ++t)
      for (int s = 0; s < N; ++s)
        T(s, t) = ((kx + gx[s]) * (kx + gx[t]) + (ky + gy[s]) * (ky + gy[t])) * eta(s, t);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(T, Eigen::EigenvaluesOnly);
    double w1 = std::sqrt(std::max(0.0, es.eigenvalues()(0)));
    double w2 = std::sqrt(std::max(0.0, es.eigenvalues()(1)));
    gap.lower = std::max(gap.lower, w1);
    gap.upper = std::min(gap.upper, w2);
  }
  return gap;
}

GroupIndexResult group_index(const std::function<double(double)>& band, double k, double dk0,
                             double slope_floor) {
  auto slope = [&](double h) {
    double a = band(k + h), b = band(k - h);
    if (!std::isfinite(a) || !std::isfinite(b))
      throw std::domain_error("band undefined near k = " + std::to_string(k));
    return (a - b) / (2.0 * h);
  };
  double h = dk0;
  double d1 = slope(h);
  double d2 = slope(0.5 * h);
  double change = std::abs(d2 - d1) / std::max(std::abs(d2), 1e-300);
  for (int it = 0; it < 12 && change > 1e-4; ++it) {
    h *= 0.5;
    d1 = d2;
    d2 = slope(0.5 * h);
    change = std::abs(d2 - d1) / std::max(std::abs(d2), 1e-300);
  }
  double rich = (4.0 * d2 - d1) / 3.0;
  if (std::abs(rich) < slope_floor)
    throw std::domain_error("group velocity below threshold near k = " + std::to_string(k) +
                            " (band edge)");
  return {1.0 / std::abs(rich), 0.5 * h, change};
}

GuidedModeSolver::GuidedModeSolver(const CrystalGeometry& g, const PweOptions& opt)
    : geom_(g), opt_(opt), cell_(g, opt.cutoff, opt.air_pad) {
  if (g.defect != Defect::w1) throw std::invalid_argument("guided modes need a W1 defect");
  gap_ = bulk_gap(g.hole_radius, g.background_index);
  const int ns = std::max(3, opt.band_samples);
  for (int i = 0; i < ns; ++i) {
    double k = opt.k_min + (0.5 - opt.k_min) * i / (ns - 1);
    band_.k.push_back(k);
    band_.omega.push_back(omega_at(k));
  }
}

std::optional<PweSupercell::Eig> GuidedModeSolver::band_point(double k) const {
  auto ev = cell_.solve(k, +1, 12, opt_.concentration_halfwidth);
  for (auto& e : ev) {
    if (e.omega <= gap_.lower || e.omega >= gap_.upper) continue;
    if (e.concentration < opt_.concentration_threshold) continue;
    return e;
  }
  return std::nullopt;
}

double GuidedModeSolver::omega_at(double k) const {
  auto e = band_point(k);
  return e ? e->omega : std::numeric_limits<double>::quiet_NaN();
}

double GuidedModeSolver::n_g_at(double k) const {
  auto e = band_point(k);
  if (!e) return std::numeric_limits<double>::quiet_NaN();
  return 1.0 / std::abs(cell_.energy_velocity(k, *e));
}

namespace {

double bracket_bisect(const std::vector<double>& ks, const std::vector<double>& vals,
                      double target, const std::function<double(double)>& fn,
                      const char* what) {
  int found = -1, count = 0;
  for (size_t i = 0; i + 1 < ks.size(); ++i) {
    double a = vals[i] - target, b = vals[i + 1] - target;
    if (!std::isfinite(a) || !std::isfinite(b)) continue;
    if (a == 0.0) return ks[i];
    if (a * b < 0.0) {
      if (found < 0) found = static_cast<int>(i);
      ++count;
    }
  }
  if (count == 0)
    throw std::out_of_range(std::string(what) + " target outside the guided band range");
  if (count > 1)
    throw std::out_of_range(std::string(what) + " target lies in a multivalued band region");
  double lo = ks[found], hi = ks[found + 1];
  double flo = vals[found] - target;
  for (int it = 0; it < 60 && hi - lo > 1e-12; ++it) {
    double mid = 0.5 * (lo + hi);
    double fm = fn(mid) - target;
    if (!std::isfinite(fm)) throw std::runtime_error("guided band lost during refinement");
    if ((fm < 0) == (flo < 0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace

double GuidedModeSolver::k_for_omega(double omega) const {
  return bracket_bisect(band_.k, band_.omega, omega, [&](double k) { return omega_at(k); },
                        "frequency");
}

double GuidedModeSolver::k_for_ng(double n_g) const {
  std::vector<double> ng;
  for (double k : band_.k) ng.push_back(k < 0.5 - 1e-9 ? n_g_at(k) : std::numeric_limits<double>::quiet_NaN());
  return bracket_bisect(band_.k, ng, n_g, [&](double k) { return n_g_at(k); }, "group index");
}

CellSampling GuidedModeSolver::default_sampling(int resolution) const {
  CellSampling s;
  s.resolution = resolution;
  s.ny = 2 * static_cast<int>(std::floor(0.5 * cell_.period_y() * resolution));
  s.y0 = -0.5 * s.ny / resolution;
  return s;
}

BlochMode GuidedModeSolver::mode_at_k(double k, const CellSampling& s) const {
  auto e = band_point(k);
  if (!e) throw std::out_of_range("no guided mode at k = " + std::to_string(k));
  double v = cell_.energy_velocity(k, *e);
  double kk = k;
  PweSupercell::Eig use = *e;
  if (v < 0.0) {
    kk = -k;
    auto ev = cell_.solve(kk, +1, 12, opt_.concentration_halfwidth);
    auto it = std::min_element(ev.begin(), ev.end(), [&](auto& a, auto& b) {
      return std::abs(a.omega - e->omega) < std::abs(b.omega - e->omega);
    });
    use = *it;
  }
  return cell_.sample(kk, use, s);
}

BlochMode GuidedModeSolver::mode_for_omega(double omega, const CellSampling& s) const {
  return mode_at_k(k_for_omega(omega), s);
}

BlochMode GuidedModeSolver::mode_for_ng(double n_g, const CellSampling& s) const {
  return mode_at_k(k_for_ng(n_g), s);
}

double purcell_wg_continuum(const BlochMode& m, double x, double y, Axis n_d) {
  cd e = m.projection(x, y, n_d);
  double w = 2.0 * kPi * m.omega;
  return 2.0 * std::norm(e) / (w * m.norm);
}

}  // namespace pcw
