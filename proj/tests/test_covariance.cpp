#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include <Eigen/Eigenvalues>

#include "lve/covariance.hpp"

using namespace lve;

TEST_CASE("kernel decays at large separation") {
  ContinuumCovariance c;
  c.j_max = 8;
  CHECK(kernel(c, 25.0) <= 1e-12);
}

TEST_CASE("kernel grows like log Lambda at the origin") {
  ContinuumCovariance lo, hi;
  lo.j_max = 6;
  hi.j_max = 12;
  double t_lo = kernel(lo, 0.0);
  double t_hi = kernel(hi, 0.0);
  CHECK(t_hi > t_lo);
  // doubling j_max adds ~6 log M / 2 pi
  double expect = 6.0 * std::log(lo.M) / (2.0 * std::numbers::pi);
  CHECK(t_hi - t_lo == doctest::Approx(expect).epsilon(0.02));
}

TEST_CASE("kernel is monotone in separation and mass") {
  ContinuumCovariance c;
  c.j_max = 8;
  double prev = kernel(c, 0.0);
  for (double r : {0.1, 0.3, 1.0, 3.0}) {
    double v = kernel(c, r);
    CHECK(v < prev);
    prev = v;
  }
  ContinuumCovariance heavy = c;
  heavy.m = 2.0;
  for (double r : {0.0, 0.5, 2.0}) CHECK(kernel(heavy, r) < kernel(c, r));
}

TEST_CASE("slices sum back to the full kernel") {
  ContinuumCovariance c;
  c.j_max = 8;
  for (double r : {0.0, 0.05, 0.2, 0.7, 1.5, 4.0}) {
    double acc = 0.0;
    for (int j = 0; j <= c.j_max; ++j) acc += slice_kernel(c, j, r);
    CHECK(acc == doctest::Approx(kernel(c, r)).epsilon(1e-9));
  }
}

TEST_CASE("per-slice tadpole converges to log M over 2 pi") {
  ContinuumCovariance c;
  c.j_max = 12;
  TadpoleTable table = tadpole_table(c);
  double limit = std::log(c.M) / (2.0 * std::numbers::pi);
  for (int j = 8; j <= c.j_max; ++j) {
    CHECK(table.per_slice[j] > 0.0);
    CHECK(std::abs(table.per_slice[j] - limit) <= 0.01 * limit);
  }
  for (size_t j = 1; j < table.cumulative.size(); ++j)
    CHECK(table.cumulative[j] >= table.cumulative[j - 1]);
}

TEST_CASE("cumulative tadpole grows linearly in j_max") {
  // slope of T(<=j_max) vs j_max, checked by linear regression R^2
  std::vector<double> xs, ys;
  for (int jm = 4; jm <= 12; ++jm) {
    ContinuumCovariance c;
    c.j_max = jm;
    xs.push_back(jm);
    ys.push_back(kernel(c, 0.0));
  }
  double n = xs.size(), sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
  for (size_t i = 0; i < xs.size(); ++i) {
    sx += xs[i]; sy += ys[i]; sxx += xs[i] * xs[i];
    sxy += xs[i] * ys[i]; syy += ys[i] * ys[i];
  }
  double r = (n * sxy - sx * sy) /
             std::sqrt((n * sxx - sx * sx) * (n * syy - sy * sy));
  CHECK(r * r >= 0.999);
}

TEST_CASE("slice decay rate grows geometrically") {
  ContinuumCovariance c;
  c.j_max = 8;
  double prev = 0.0;
  for (int j = 3; j <= 7; ++j) {
    SliceDecayFit fit = fit_slice_decay(c, j);
    CHECK(fit.c > 0.0);
    double rate = fit.c * std::pow(c.M, j);
    if (j > 3) CHECK(rate > 1.8 * prev);  // ratio ~ M = 2.745
    prev = rate;
  }
}

TEST_CASE("one momentum mode inverts to 1/m^2") {
  LatticeModel m = lattice_covariance(1, 1, 1.0, 1.0,
                                      CutoffMode::MomentumCutoff);
  CHECK(m.covariance(0, 0) == doctest::Approx(1.0));
  LatticeModel m2 = lattice_covariance(1, 1, 1.0, 2.0,
                                       CutoffMode::MomentumCutoff);
  CHECK(m2.covariance(0, 0) == doctest::Approx(0.25));
}

TEST_CASE("lattice covariance is circulant and PSD") {
  for (auto mode : {CutoffMode::SliceHeatKernel, CutoffMode::MomentumCutoff}) {
    LatticeModel m = lattice_covariance(4, 4, 1.0, 1.0, mode);
    int S = m.sites();
    for (int x = 0; x < S; ++x)
      CHECK(m.covariance(x, x) == doctest::Approx(m.T).epsilon(1e-12));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m.covariance);
    CHECK(es.eigenvalues().minCoeff() >= -1e-10);
    if (mode == CutoffMode::SliceHeatKernel) {
      // only the sliced mode decomposes the covariance scale by scale
      Eigen::MatrixXd sum = Eigen::MatrixXd::Zero(S, S);
      for (const auto& s : m.slices) sum += s;
      CHECK((sum - m.covariance).norm() <= 1e-9);
    }
  }
}

TEST_CASE("lattice tadpole mimics the continuum log growth") {
  std::vector<double> ts;
  for (int jm = 4; jm <= 12; ++jm)
    ts.push_back(lattice_covariance(2, 2, 1.0, 1.0,
                                    CutoffMode::SliceHeatKernel,
                                    2.7454646467, jm)
                     .T);
  double slope = (ts.back() - ts.front()) / 8.0;
  double expect = std::log(2.7454646467) / (2.0 * std::numbers::pi);
  CHECK(slope == doctest::Approx(expect).epsilon(0.05));
}

TEST_CASE("matrix square root") {
  Eigen::MatrixXd id = Eigen::MatrixXd::Identity(3, 3);
  CHECK((matrix_sqrt(id) - id).norm() == doctest::Approx(0.0));
  Eigen::MatrixXd d(2, 2);
  d << 4, 0, 0, 9;
  Eigen::MatrixXd r = matrix_sqrt(d);
  CHECK(r(0, 0) == doctest::Approx(2.0));
  CHECK(r(1, 1) == doctest::Approx(3.0));
  // random PSD 16x16 multiply-back
  Eigen::MatrixXd a = Eigen::MatrixXd::Random(16, 16);
  Eigen::MatrixXd psd = a * a.transpose();
  Eigen::MatrixXd s = matrix_sqrt(psd);
  CHECK((s * s - psd).norm() <= 1e-10 * psd.norm());
  Eigen::MatrixXd neg(1, 1);
  neg << -1.0;
  CHECK_THROWS(matrix_sqrt(neg));
}
