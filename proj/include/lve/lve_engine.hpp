#ifndef LVE_LVE_ENGINE_HPP
#define LVE_LVE_ENGINE_HPP

#include <complex>
#include <map>
#include <string>
#include <vector>

#include "lve/covariance.hpp"
#include "lve/dual.hpp"
#include "lve/trees.hpp"
#include "lve/wick.hpp"

namespace lve {

// Two bookkeeping conventions for the tree-line sigma derivatives exist
// in the literature: one derivation per tree line (no extra factor), or
// two derivations with a compensating 1/2 per line. Which one reproduces
// the model is decided by comparison against the wick oracle.
enum class DerivationConvention { SinglePerLine, HalfPerPair };

std::string convention_name(DerivationConvention c);

// One chain from deriving a loop vertex p times: p = 1 gives the single
// subtracted-resolvent term, p >= 2 gives (p-1)! dressed chains indexed by
// the permutations that fix the first derivation position.
struct ResolventChain {
  bool subtracted = false;
  std::vector<int> positions;  // derivation positions in chain order
  Rational prefactor;          // rational part, sign included
  int i_power = 0;             // formal power of i
  int sqrt_lambda_power = 0;   // formal power of sqrt(lambda)
};

std::vector<ResolventChain> derive_loop_vertex(
    int p, const std::vector<int>& positions);

// Coefficients of lambda^0..lambda^order. Imaginary parts must come out
// at rounding level; they are kept for auditing.
struct TreeAmplitude {
  std::vector<std::complex<double>> coefficients;
  std::vector<std::string> inventory;  // JSON lines, one per pairing
};

// Amplitude of one (possibly counterterm-decorated) tree on the lattice
// model: resolvents expanded in sigma, sigma moments taken with covariance
// delta_{xy} w^T(v,v'), w monomials integrated exactly over ordering
// simplices. Tree size <= 4, order <= 3.
TreeAmplitude tree_amplitude_series(
    const DecoratedTree& t, const LatticeModel& model, int order,
    DerivationConvention conv = DerivationConvention::SinglePerLine,
    bool with_inventory = false);

// log Z coefficients from trees up to n_max vertices (n_max <= 4),
// including the counterterm-leaf decorations and the n=1 CC + E[W] term.
SeriesCoefficients lve_logZ_series(
    const LatticeModel& model, int n_max, int order,
    DerivationConvention conv = DerivationConvention::SinglePerLine);

// prefactor * sum_k binom(n,k) A^{n-k} (-B)^k, computed and returned in
// exact rational arithmetic; equals prefactor * (A-B)^n, hence 0 for A=B.
Rational renormalized_planar_sum(int n, const Rational& A, const Rational& B,
                                 const Rational& prefactor);

// Multivariate polynomial in sigma as exponent-vector -> coefficient.
using SigmaPolynomial = std::map<std::vector<int>, double>;

// | E[f(sigma) e^{2i sqrt(lambda) T sum sigma}] - e^{-2 lambda T^2 dim} *
//   E[f(sigma + 2i sqrt(lambda) T)] |, the two sides computed by
// independent routes (oscillatory quadrature vs shifted Gaussian moments).
double reexponentiation_identity(int dim, const SigmaPolynomial& f,
                                 double lambda, double T);

}  // namespace lve

#endif
