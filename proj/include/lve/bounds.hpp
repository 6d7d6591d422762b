#ifndef LVE_BOUNDS_HPP
#define LVE_BOUNDS_HPP

#include <array>
#include <complex>
#include <functional>
#include <vector>

namespace lve {

// Finite set of unit squares identified by integer centers; must contain
// the origin square.
struct ClusterSet {
  std::vector<std::array<int, 2>> squares;
};

void validate_cluster(const ClusterSet& g);

// Minimal spanning tree length over square centers in Euclidean distance.
// MST upper-bounds the Steiner length, so decay claims stay conservative.
double cluster_tree_length(const ClusterSet& g);  // |g| <= 14

struct ClusterSumReport {
  std::vector<double> partial_sums;  // by size 1..k
  std::vector<double> increments;    // contribution of each size
};

// Sum of e^{-c tau(Gamma)} over clusters containing the origin with squares
// in the (2R+1)^2 box and |Gamma| <= k. Default enumerates connected-by-
// adjacency sets; exhaustive mode takes every subset (tiny R only).
ClusterSumReport cluster_sum(double c, int radius, int size_cap,
                             bool exhaustive = false);

struct MajorantReport {
  std::vector<double> coeffs;  // n^{n-2}/n! 2^{n-1}, n = 1..
  std::vector<double> terms;   // geometric majorant (lambda K log Lambda)^n
  double partial_sum = 0.0;
  double closed_form = 0.0;    // x/(1-x) when it converges
  bool converges = false;      // lambda K log Lambda < 1
};

// Termwise majorant of the pressure series with log Lambda = j_max log M.
MajorantReport pressure_majorant(double lambda, double K, int j_max,
                                 double M = 2.7454646467, int n_terms = 40);

// e^{-a j^2} j! e^{2 lambda (s j)^2}, evaluated in log space.
double nelson_check(double a, double lambda, int j, double s);

struct TaylorRemainder {
  double direct = 0.0;    // f(lambda) - Taylor partial sum
  double integral = 0.0;  // lambda^{N+1} int (1-t)^N/N! f^{(N+1)}(t lambda)
  double agreement = 0.0; // |direct - integral| / max(|direct|, eps)
  bool widened = false;   // derivative route exceeded the 1e-5 tolerance
};

// taylor0 holds the Taylor coefficients of f at 0 through order N (the
// oracle series supplies them exactly). f must be analytic on Re > 0 in
// a neighborhood of (0, lambda]: the integral-route derivatives come from
// Cauchy circles of radius 0.7 t lambda centered at t lambda. N <= 6.
TaylorRemainder taylor_remainder(
    const std::function<std::complex<double>(std::complex<double>)>& f, int N,
    double lambda, const std::vector<double>& taylor0);

struct RemainderReport {
  int N = 0;
  std::vector<double> lambdas;
  std::vector<double> remainders;
};

struct FactorialFit {
  double A = 0.0;
  double B = 0.0;
  std::vector<double> residuals;  // w.r.t. the final one-sided (A, B)
  bool one_sided = false;         // all residuals <= tolerance
};

// Least squares of log|R^N| - log(N! |lambda|^{N+1}) against N, then A is
// inflated so the bound A B^N N! |lambda|^{N+1} covers every sample.
FactorialFit factorial_bound_fit(const std::vector<RemainderReport>& reports);

struct BorelTransform {
  std::vector<double> values;      // sum a_N u^N / N! on the grid
  std::vector<double> truncation;  // last retained term, per grid point
};

BorelTransform borel_partial_transform(const std::vector<double>& coeffs,
                                       const std::vector<double>& u_grid);

}  // namespace lve

#endif
