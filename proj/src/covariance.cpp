#include "lve/covariance.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include <Eigen/Eigenvalues>
#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace lve {

namespace {

constexpr double kPi = std::numbers::pi;

double alpha_integral(double m, double r, double lo, double hi) {
  // substitute u = log(alpha): the 1/alpha measure becomes flat and the
  // integrand a smooth bump, which the adaptive rule resolves easily
  auto f = [&](double u) {
    double alpha = std::exp(u);
    return std::exp(-alpha * m * m - r * r / (4.0 * alpha));
  };
  double u_lo = std::log(lo);
  // past alpha*m^2 ~ 746 the integrand underflows entirely
  double u_hi = std::min(std::log(hi), std::log(746.0 / (m * m)));
  if (u_hi <= u_lo) return 0.0;
  using GK = boost::math::quadrature::gauss_kronrod<double, 31>;
  double err = 0.0;
  double v = GK::integrate(f, u_lo, u_hi, 12, 1e-12, &err);
  if (!(std::isfinite(v)) || err > 1e-8 * std::abs(v) + 1e-14)
    throw std::runtime_error("covariance quadrature did not converge");
  return v / (4.0 * kPi);
}

}  // namespace

double ContinuumCovariance::lambda_cutoff() const {
  return std::pow(M, j_max);
}

double kernel(const ContinuumCovariance& c, double r) {
  double lo = std::pow(c.M, -2.0 * c.j_max);
  return alpha_integral(c.m, r, lo, std::numeric_limits<double>::infinity());
}

double slice_kernel(const ContinuumCovariance& c, int j, double r) {
  if (j < 0 || j > c.j_max) throw std::out_of_range("slice index");
  if (j == 0)
    return alpha_integral(c.m, r, 1.0,
                          std::numeric_limits<double>::infinity());
  double lo = std::pow(c.M, -2.0 * j);
  double hi = std::pow(c.M, -2.0 * (j - 1));
  return alpha_integral(c.m, r, lo, hi);
}

TadpoleTable tadpole_table(const ContinuumCovariance& c) {
  TadpoleTable t;
  double cum = 0.0;
  for (int j = 0; j <= c.j_max; ++j) {
    double tj = slice_kernel(c, j, 0.0);
    cum += tj;
    t.per_slice.push_back(tj);
    t.cumulative.push_back(cum);
  }
  return t;
}

SliceDecayFit fit_slice_decay(const ContinuumCovariance& c, int j) {
  // sample r where the slice is neither flat nor underflowed
  double scale = std::pow(c.M, -j);  // typical distance at scale j
  std::vector<double> rs, logs;
  for (int i = 1; i <= 24; ++i) {
    double r = scale * (0.5 + 0.5 * i);
    double v = slice_kernel(c, j, r);
    if (v < 1e-280) break;
    rs.push_back(r);
    logs.push_back(std::log(v));
  }
  if (rs.size() < 4) throw std::runtime_error("too few decay samples");
  double n = static_cast<double>(rs.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (size_t i = 0; i < rs.size(); ++i) {
    sx += rs[i];
    sy += logs[i];
    sxx += rs[i] * rs[i];
    sxy += rs[i] * logs[i];
  }
  double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  double intercept = (sy - slope * sx) / n;
  SliceDecayFit fit;
  fit.K = std::exp(intercept);
  fit.c = -slope / std::pow(c.M, j);
  return fit;
}

Eigen::MatrixXd LatticeModel::cumulative_slice(int j) const {
  Eigen::MatrixXd s = Eigen::MatrixXd::Zero(sites(), sites());
  for (int k = 0; k <= j; ++k) s += slice(k);
  return s;
}

LatticeModel lattice_covariance(int Nx, int Ny, double a, double m,
                                CutoffMode mode, double M, int j_max) {
  if (Nx < 1 || Ny < 1 || Nx > 32 || Ny > 32)
    throw std::length_error("lattice size out of range");
  LatticeModel model;
  model.Nx = Nx;
  model.Ny = Ny;
  model.a = a;
  model.m = m;
  model.mode = mode;
  model.M = M;
  model.j_max = j_max;
  int S = Nx * Ny;
  auto idx = [&](int x, int y) { return y * Nx + x; };

  if (mode == CutoffMode::SliceHeatKernel) {
    ContinuumCovariance c{m, M, j_max};
    const int windings = 3;
    model.slices.assign(j_max + 1, Eigen::MatrixXd::Zero(S, S));
    // circulant generator row: value depends on the displacement only
    for (int j = 0; j <= j_max; ++j) {
      Eigen::MatrixXd gen(Nx, Ny);
      for (int dx = 0; dx < Nx; ++dx)
        for (int dy = 0; dy < Ny; ++dy) {
          double v = 0.0;
          for (int wx = -windings; wx <= windings; ++wx)
            for (int wy = -windings; wy <= windings; ++wy) {
              double rx = (dx + wx * Nx) * a;
              double ry = (dy + wy * Ny) * a;
              v += slice_kernel(c, j, std::hypot(rx, ry));
            }
          gen(dx, dy) = v;
        }
      for (int x = 0; x < Nx; ++x)
        for (int y = 0; y < Ny; ++y)
          for (int x2 = 0; x2 < Nx; ++x2)
            for (int y2 = 0; y2 < Ny; ++y2) {
              int dx = ((x2 - x) % Nx + Nx) % Nx;
              int dy = ((y2 - y) % Ny + Ny) % Ny;
              model.slices[j](idx(x, y), idx(x2, y2)) = gen(dx, dy);
            }
    }
    model.covariance = Eigen::MatrixXd::Zero(S, S);
    for (auto& s : model.slices) model.covariance += s;
  } else {
    // inverse lattice Laplacian, all modes kept
    Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(S, S);
    for (int px = 0; px < Nx; ++px)
      for (int py = 0; py < Ny; ++py) {
        double ex = 2.0 - 2.0 * std::cos(2.0 * kPi * px / Nx);
        double ey = 2.0 - 2.0 * std::cos(2.0 * kPi * py / Ny);
        double denom = m * m + (ex + ey) / (a * a);
        for (int x = 0; x < Nx; ++x)
          for (int y = 0; y < Ny; ++y)
            for (int x2 = 0; x2 < Nx; ++x2)
              for (int y2 = 0; y2 < Ny; ++y2) {
                double phase = 2.0 * kPi *
                               (px * (x2 - x) / static_cast<double>(Nx) +
                                py * (y2 - y) / static_cast<double>(Ny));
                cov(idx(x, y), idx(x2, y2)) +=
                    std::cos(phase) / (denom * S * a * a);
              }
      }
    model.covariance = cov;
  }

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(model.covariance);
  double scale = std::max(1.0, es.eigenvalues().cwiseAbs().maxCoeff());
  if (es.eigenvalues().minCoeff() < -1e-10 * scale)
    throw std::runtime_error("lattice covariance not PSD");
  // translation invariance: diagonal must be constant
  model.T = model.covariance(0, 0);
  for (int i = 1; i < S; ++i)
    if (std::abs(model.covariance(i, i) - model.T) > 1e-9 * (1.0 + model.T))
      throw std::runtime_error("lattice covariance not circulant");
  return model;
}

Eigen::MatrixXd matrix_sqrt(const Eigen::MatrixXd& m) {
  if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-12 * (1.0 + m.cwiseAbs().maxCoeff()))
    throw std::invalid_argument("matrix_sqrt needs a symmetric input");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
  Eigen::VectorXd ev = es.eigenvalues();
  double scale = std::max(1.0, ev.cwiseAbs().maxCoeff());
  for (int i = 0; i < ev.size(); ++i) {
    if (ev[i] < -1e-10 * scale)
      throw std::invalid_argument("matrix_sqrt: negative eigenvalue");
    ev[i] = std::sqrt(std::max(0.0, ev[i]));
  }
  return es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().transpose();
}

}  // namespace lve
