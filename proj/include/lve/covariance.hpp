#ifndef LVE_COVARIANCE_HPP
#define LVE_COVARIANCE_HPP

#include <vector>

#include <Eigen/Core>

namespace lve {

// 2D massive propagator with UV cutoff Lambda = M^{j_max} and
// renormalization-group slices in the heat-kernel parameter.
struct ContinuumCovariance {
  double m = 1.0;
  double M = 2.7454646467;  // slightly above e so M^{-j^2} beats e^{-j^2}
  int j_max = 10;

  double lambda_cutoff() const;  // M^{j_max}
};

// (1/4pi) int_{Lambda^-2}^infty dalpha/alpha exp(-alpha m^2 - r^2/4alpha)
double kernel(const ContinuumCovariance& c, double r);

// Slice j >= 1 covers alpha in [M^{-2j}, M^{-2(j-1)}]; slice 0 absorbs the
// infrared tail [1, infinity) so the slices sum back to the full kernel.
double slice_kernel(const ContinuumCovariance& c, int j, double r);

struct TadpoleTable {
  std::vector<double> per_slice;   // T_j = slice_kernel(j, 0)
  std::vector<double> cumulative;  // T_{<=j}
};

TadpoleTable tadpole_table(const ContinuumCovariance& c);

// Least-squares fit of log slice_kernel(j, r) ~ log K - c M^j r.
struct SliceDecayFit {
  double K = 0.0;
  double c = 0.0;
};

SliceDecayFit fit_slice_decay(const ContinuumCovariance& c, int j);

enum class CutoffMode { SliceHeatKernel, MomentumCutoff };

// Finite torus instantiation used by all oracles. Sites are laid out
// row-major on an Nx x Ny torus with spacing a.
struct LatticeModel {
  int Nx = 1, Ny = 1;
  double a = 1.0;
  double m = 1.0;
  CutoffMode mode = CutoffMode::SliceHeatKernel;
  double M = 2.7454646467;
  int j_max = 10;
  Eigen::MatrixXd covariance;                // (Nx*Ny) x (Nx*Ny), PSD
  std::vector<Eigen::MatrixXd> slices;       // per-j, sums to covariance
  double T = 0.0;                            // per-site tadpole

  int sites() const { return Nx * Ny; }
  const Eigen::MatrixXd& slice(int j) const { return slices.at(j); }
  // sum of slices k <= j
  Eigen::MatrixXd cumulative_slice(int j) const;
};

// Circulant covariance on the torus. SliceHeatKernel mode periodizes the
// sliced continuum kernel (so T grows like j_max log M / 2pi); momentum
// mode inverts the lattice Laplacian mode by mode.
LatticeModel lattice_covariance(int Nx, int Ny, double a, double m,
                                CutoffMode mode = CutoffMode::SliceHeatKernel,
                                double M = 2.7454646467, int j_max = 10);

// Symmetric PSD square root via eigendecomposition. Eigenvalues below
// -1e-10 are an error; small negatives are clamped to zero.
Eigen::MatrixXd matrix_sqrt(const Eigen::MatrixXd& m);

}  // namespace lve

#endif
