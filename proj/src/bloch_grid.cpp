#include "pcw/grid_mode.hpp"

#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

#include <Eigen/Eigenvalues>
#include <Eigen/SparseLU>

namespace pcw {

GridModeSolver::GridModeSolver(const CrystalGeometry& g, const DomainLayout& layout,
                               Guess omega_guess, double conc_threshold, double conc_halfwidth)
    : geom_(g),
      layout_(layout),
      guess_(std::move(omega_guess)),
      threshold_(conc_threshold),
      halfwidth_(conc_halfwidth) {
  cell_ = layout_.cell_raster(g);
  sampling_ = layout_.sampling(g);
  if (cell_.ny % 2 != 0) throw std::invalid_argument("cross-section needs an even row count");
}

namespace {

struct CellOperator {
  Eigen::SparseMatrix<cd> K;
  Eigen::VectorXcd M;
  std::vector<std::pair<std::pair<int, int>, cd>> wrap_deriv;  // dK/dtheta entries
};

CellOperator build_operator(const RasterGrid& c, const PmlSpec& pml, double k, double f) {
  const int res = c.nx, ny = c.ny, h0 = ny / 2;
  const int rows = ny - h0;
  const int n = res * rows;
  const double d2 = c.d() * c.d();
  const double th = 2.0 * kPi * k;
  const cd ep(std::cos(th), std::sin(th));
  Stretch st = make_stretch(c, pml, f, false, true);
  CellOperator op;
  op.M.resize(n);
  std::vector<Eigen::Triplet<cd>> trip;
  trip.reserve(5 * static_cast<size_t>(n));
  auto idx = [&](int i, int j) { return i + res * (j - h0); };
  for (int j = h0; j < ny; ++j)
    for (int i = 0; i < res; ++i) {
      int u = idx(i, j);
      cd cl = st.sy_c[j] / (c.eey(i, j) * d2);
      cd cr = st.sy_c[j] / (c.eey(i + 1, j) * d2);
      cd cb = 1.0 / (c.eex(i, j) * st.sy_e[j] * d2);
      cd ct = 1.0 / (c.eex(i, j + 1) * st.sy_e[j + 1] * d2);
      cd diag = cl + cr + ct;
      if (i == 0) {
        trip.emplace_back(u, idx(res - 1, j), -cl * std::conj(ep));
        op.wrap_deriv.push_back({{u, idx(res - 1, j)}, cd(0.0, 1.0) * cl * std::conj(ep)});
      } else {
        trip.emplace_back(u, idx(i - 1, j), -cl);
      }
      if (i == res - 1) {
        trip.emplace_back(u, idx(0, j), -cr * ep);
        op.wrap_deriv.push_back({{u, idx(0, j)}, cd(0.0, -1.0) * cr * ep});
      } else {
        trip.emplace_back(u, idx(i + 1, j), -cr);
      }
      if (j > h0) {
        diag += cb;
        trip.emplace_back(u, idx(i, j - 1), -cb);
      }
      if (j + 1 < ny) trip.emplace_back(u, idx(i, j + 1), -ct);
      trip.emplace_back(u, u, diag);
      op.M(u) = st.sy_c[j];
    }
  op.K.resize(n, n);
  op.K.setFromTriplets(trip.begin(), trip.end());
  op.K.makeCompressed();
  return op;
}

}  // namespace

std::optional<GridModeSolver::Point> GridModeSolver::solve(double k, double omega_guess) const {
  const int res = cell_.nx, ny = cell_.ny, h0 = ny / 2;
  double f = omega_guess;
  std::optional<Point> best;
  for (int pass = 0; pass < 4; ++pass) {
    CellOperator op = build_operator(cell_, layout_.pml, k, f);
    const int n = static_cast<int>(op.M.size());
    const double w = 2.0 * kPi * f;
    const cd sigma = w * w;
    Eigen::SparseMatrix<cd> A = op.K;
    for (int u = 0; u < n; ++u) A.coeffRef(u, u) -= sigma * op.M(u);
    Eigen::SparseLU<Eigen::SparseMatrix<cd>> lu;
    lu.compute(A);
    if (lu.info() != Eigen::Success)
      throw std::runtime_error("cross-section factorization failed at k = " + std::to_string(k));

    const int bsz = 6;
    std::mt19937_64 rng(0x5eed + pass);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    Eigen::MatrixXcd V(n, bsz);
    for (int c = 0; c < bsz; ++c)
      for (int r = 0; r < n; ++r) V(r, c) = cd(uni(rng), uni(rng));
    std::vector<double> weight_in(n);
    for (int j = h0; j < ny; ++j)
      for (int i = 0; i < res; ++i) weight_in[i + res * (j - h0)] = cell_.yc(j) < halfwidth_ ? 1.0 : 0.0;

    best.reset();
    for (int it = 0; it < 300; ++it) {
      Eigen::MatrixXcd W = lu.solve(op.M.asDiagonal() * V);
      Eigen::HouseholderQR<Eigen::MatrixXcd> qr(W);
      Eigen::MatrixXcd Q = qr.householderQ() * Eigen::MatrixXcd::Identity(n, bsz);
      Eigen::MatrixXcd KQ = op.K * Q;
      Eigen::MatrixXcd Kr = Q.adjoint() * KQ;
      Eigen::MatrixXcd Mr = Q.adjoint() * (op.M.asDiagonal() * Q);
      Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(Mr.partialPivLu().solve(Kr));
      Eigen::MatrixXcd X = Q * es.eigenvectors();
      int pick = -1;
      double pick_dist = std::numeric_limits<double>::infinity();
      std::vector<double> conc(bsz), resid(bsz);
      for (int c = 0; c < bsz; ++c) {
        cd th = es.eigenvalues()(c);
        Eigen::VectorXcd x = X.col(c);
        Eigen::VectorXcd Mx = op.M.asDiagonal() * x;
        resid[c] = (op.K * x - th * Mx).norm() / (std::abs(th) * Mx.norm());
        double in = 0.0, tot = 0.0;
        for (int r = 0; r < n; ++r) {
          double a = std::norm(x(r));
          tot += a;
          in += weight_in[r] * a;
        }
        conc[c] = tot > 0 ? in / tot : 0.0;
        double dist = std::abs(th - sigma);
        if (conc[c] >= threshold_ && dist < pick_dist) {
          pick = c;
          pick_dist = dist;
        }
      }
      V = X;
      if (pick >= 0 && resid[pick] < 1e-10) {
        Point p;
        cd wc = std::sqrt(es.eigenvalues()(pick));
        p.omega = wc.real() / (2.0 * kPi);
        p.omega_imag = wc.imag() / (2.0 * kPi);
        p.concentration = conc[pick];
        p.residual = resid[pick];
        p.h = X.col(pick);
        cd peak = 0.0;
        for (int r = 0; r < n; ++r)
          if (std::abs(p.h(r)) > std::abs(peak)) peak = p.h(r);
        p.h /= peak;
        cd num = 0.0;
        for (auto& [ij, v] : op.wrap_deriv) num += std::conj(p.h(ij.first)) * v * p.h(ij.second);
        cd den = p.h.dot(op.M.asDiagonal() * p.h);
        double dlam = num.real() / den.real();
        p.velocity = dlam / (2.0 * wc.real());
        best = p;
        break;
      }
    }
    if (!best) return std::nullopt;
    if (std::abs(best->omega - f) <= 1e-12 * f) break;
    f = best->omega;
  }
  return best;
}

double GridModeSolver::omega_at(double k_band) const {
  auto p = solve(k_band, guess_(k_band));
  return p ? p->omega : std::numeric_limits<double>::quiet_NaN();
}

double GridModeSolver::n_g_at(double k_band) const {
  auto p = solve(k_band, guess_(k_band));
  return p ? 1.0 / std::abs(p->velocity) : std::numeric_limits<double>::quiet_NaN();
}

namespace {

double illinois(const std::function<double(double)>& fn, double lo, double hi, double tol,
                const char* what) {
  double flo = fn(lo), fhi = fn(hi);
  if (!std::isfinite(flo) || !std::isfinite(fhi) || flo * fhi > 0.0)
    throw std::out_of_range(std::string(what) + " target outside the guided band range");
  int side = 0;
  for (int it = 0; it < 80; ++it) {
    double x = (lo * fhi - hi * flo) / (fhi - flo);
    double fx = fn(x);
    if (!std::isfinite(fx)) throw std::runtime_error("guided band lost during refinement");
    if (std::abs(fx) < tol || hi - lo < 1e-13) return x;
    if (fx * fhi > 0.0) {
      hi = x;
      fhi = fx;
      if (side == -1) flo *= 0.5;
      side = -1;
    } else {
      lo = x;
      flo = fx;
      if (side == 1) fhi *= 0.5;
      side = 1;
    }
  }
  return (lo * fhi - hi * flo) / (fhi - flo);
}

}  // namespace

double GridModeSolver::k_for_ng(double n_g, double k_lo, double k_hi) const {
  return illinois([&](double k) { return std::log(n_g_at(k) / n_g); }, k_lo, k_hi, 1e-9,
                  "group index");
}

double GridModeSolver::k_for_omega(double omega, double k_lo, double k_hi) const {
  return illinois([&](double k) { return omega_at(k) - omega; }, k_lo, k_hi, 1e-13 * omega,
                  "frequency");
}

BlochMode GridModeSolver::mode_at(double k_band) const {
  auto p = solve(k_band, guess_(k_band));
  if (!p) throw std::out_of_range("no guided grid mode at k = " + std::to_string(k_band));
  double k = k_band;
  if (p->velocity < 0.0) {
    auto q = solve(-k_band, p->omega);
    if (!q) throw std::runtime_error("counter-propagating grid mode not found");
    p = q;
    k = -k_band;
  }
  return to_mode(k, *p);
}

BlochMode GridModeSolver::to_mode(double k, const Point& p) const {
  const int res = cell_.nx, ny = cell_.ny, h0 = ny / 2;
  const double d = cell_.d();
  const double w = 2.0 * kPi * p.omega;
  const cd iw(0.0, w);
  Stretch st = make_stretch(cell_, layout_.pml, p.omega, false, true);
  std::vector<cd> H(static_cast<size_t>(res) * ny);
  for (int j = 0; j < ny; ++j) {
    int jj = j >= h0 ? j : ny - 1 - j;
    for (int i = 0; i < res; ++i) H[i + res * j] = p.h(i + res * (jj - h0));
  }
  const double th = 2.0 * kPi * k;
  auto phase = [&](double x) { return cd(std::cos(th * x), std::sin(th * x)); };
  auto h = [&](int i, int j) -> cd {
    if (j < 0 || j >= ny) return 0.0;
    if (i < 0) return H[(i + res) + res * j] * std::conj(phase(1.0));
    return H[i + res * j];
  };
  BlochMode m;
  m.omega = p.omega;
  m.omega_imag = p.omega_imag;
  m.k = k;
  m.n_g = 1.0 / std::abs(p.velocity);
  m.origin = "grid";
  m.sampling = sampling_;
  m.hz.resize(H.size());
  m.ey.resize(H.size());
  m.ex.resize(static_cast<size_t>(res) * (ny + 1));
  double flux = 0.0;
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < res; ++i) {
      m.hz[i + res * j] = H[i + res * j] * std::conj(phase((i + 0.5) * d));
      cd F = (h(i, j) - h(i - 1, j)) / (cell_.eey(i, j) * d);
      cd ey = F / iw;
      m.ey[i + res * j] = ey * std::conj(phase(i * d));
      if (i == 0) flux += 0.5 * (ey * std::conj(0.5 * (h(-1, j) + h(0, j)))).real() * d;
    }
  for (int j = 0; j <= ny; ++j)
    for (int i = 0; i < res; ++i) {
      cd G = (h(i, j) - h(i, j - 1)) / (cell_.eex(i, j) * st.sy_e[j] * d);
      m.ex[i + res * j] = (-G / iw) * std::conj(phase((i + 0.5) * d));
    }
  m.norm = flux;
  fix_gauge(m);
  return m;
}

}  // namespace pcw
