#ifndef LVE_WICK_HPP
#define LVE_WICK_HPP

#include <array>
#include <complex>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "lve/covariance.hpp"

namespace lve {

struct MomentRequest {
  Eigen::MatrixXd covariance;
  std::vector<int> indices;  // multiset of site indices
};

// Sum over pair partitions of products of covariance entries (Isserlis).
// Odd degree returns 0 by convention; degree is capped at 16.
double gaussian_moment(const MomentRequest& req);

// Coefficients (1, -6T, 3T^2) of :phi^4: on the monomials (phi^4, phi^2, 1).
std::array<double, 3> wick_order_quartic(double T);

// Moment of a product of Wick-ordered quartics at the given sites,
// computed by enumerating degree-4 contraction multigraphs. Intra-vertex
// contractions carry the factor C(x,x) - T, which vanishes at the
// Wick-ordering point.
double wick_quartic_moment(const Eigen::MatrixXd& cov, double T,
                           const std::vector<int>& sites);

struct SeriesCoefficients {
  std::string model;
  std::string method;  // "oracle" or "lve"
  std::vector<double> coefficients;  // a_0 .. a_N of log Z
  std::vector<double> abs_err;
};

// Cumulant coefficients of log Z in lambda for the interaction
// (lambda/2) a^2 sum_x :phi_x^4: with T the per-site tadpole.
// order <= 3 for up to 16 sites, order <= 4 for up to 4 sites.
SeriesCoefficients logZ_series(const LatticeModel& model, int order);

// Z-series coefficients z_0..z_N (same normalization), for the
// exp-vs-cumulant consistency check.
std::vector<double> Z_series(const LatticeModel& model, int order);

// Nonperturbative log Z on up to 4 sites by tensor Gauss-Hermite
// quadrature; Re(lambda) >= 0, |lambda| <= 1.
std::complex<double> direct_logZ(const LatticeModel& model,
                                 std::complex<double> lambda,
                                 int degree = 48);

// The fixed-degree quadrature sum behind direct_logZ, without the
// domain guard: a finite sum of exponentials, hence entire in lambda.
// Used where derivatives need small excursions off the Re >= 0 axis.
std::complex<double> entire_logZ(const LatticeModel& model,
                                 std::complex<double> lambda,
                                 int degree = 48);

std::string series_to_json(const SeriesCoefficients& s);

}  // namespace lve

#endif
