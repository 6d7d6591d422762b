#ifndef LVE_FOREST_HPP
#define LVE_FOREST_HPP

#include <functional>
#include <map>
#include <vector>

#include <Eigen/Core>

#include "lve/trees.hpp"

namespace lve {

// A function of symmetric pair couplings x_{vv'} in [0,1]^{n(n-1)/2} with
// unit diagonal. Mixed partials default to central finite differences with
// one Richardson step; polynomial subclasses override them analytically.
class PairFunction {
 public:
  explicit PairFunction(int n) : n_(n) {}
  virtual ~PairFunction() = default;

  int n() const { return n_; }
  virtual double eval(const Eigen::MatrixXd& x) const = 0;
  virtual double mixed_partial(const std::vector<Edge>& d,
                               const Eigen::MatrixXd& x) const;

 private:
  int n_;
};

class CallablePairFunction : public PairFunction {
 public:
  CallablePairFunction(int n, std::function<double(const Eigen::MatrixXd&)> f)
      : PairFunction(n), f_(std::move(f)) {}
  double eval(const Eigen::MatrixXd& x) const override { return f_(x); }

 private:
  std::function<double(const Eigen::MatrixXd&)> f_;
};

// Multilinear polynomial in the off-diagonal pair couplings: a sum of
// coefficients over subsets of pairs. Partials are exact.
class MultilinearPairPolynomial : public PairFunction {
 public:
  explicit MultilinearPairPolynomial(int n) : PairFunction(n) {}

  // term: coefficient times the product of the given (distinct) pairs
  void add_term(std::vector<Edge> pairs, double coeff);

  double eval(const Eigen::MatrixXd& x) const override;
  double mixed_partial(const std::vector<Edge>& d,
                       const Eigen::MatrixXd& x) const override;

  const std::map<std::vector<Edge>, double>& terms() const { return terms_; }

  static MultilinearPairPolynomial random(int n, std::uint64_t seed,
                                          int max_terms = 12);

 private:
  std::map<std::vector<Edge>, double> terms_;
};

struct ForestTerm {
  std::vector<Edge> forest;  // acyclic edge set on n vertices
  double value = 0.0;        // w-integral of the derived integrand
};

// All acyclic edge subsets of the complete graph on n vertices.
std::vector<std::vector<Edge>> enumerate_forests(int n);

// The BKAR Taylor forest formula: sum of term values equals f at the
// all-ones coupling matrix. n <= 6. The coupling matrix inside each term
// takes path infima within forest trees and 0 across components.
std::vector<ForestTerm> bkar_decompose(const PairFunction& f);

double forest_sum(const PairFunction& f);

// Connected (spanning-tree) forest terms only.
std::vector<ForestTerm> bkar_tree_terms(const PairFunction& f);

// An exchangeable family f_1, f_2, ... that factorizes over connected
// components, e.g. the n-th coefficient family of a toy partition
// function. tree_connected_part feeds each member through the forest
// formula and keeps the connected terms.
class PairFunctionFamily {
 public:
  virtual ~PairFunctionFamily() = default;
  virtual const PairFunction& member(int n) const = 0;
};

// Product over pairs of (1 + eps * x_{vv'}): multiplicative over blocks.
class ProductToyFamily : public PairFunctionFamily {
 public:
  ProductToyFamily(int n_max, double eps);
  const PairFunction& member(int n) const override;
  double eps() const { return eps_; }

 private:
  double eps_;
  std::vector<MultilinearPairPolynomial> members_;
};

// Checks factorization on a sampled block split; throws on violation.
void check_multiplicative(const PairFunctionFamily& fam, int n);

// c_n = sum of tree terms of member(n). exp(sum_n c_n/n!) should match
// sum_n (forest sum of member(n))/n! for a factorizing family.
std::vector<double> tree_connected_part(const PairFunctionFamily& fam,
                                        int n_max);

// Tensorized Gauss-Legendre over [0,1]^dim, default order 16 per axis.
double w_quadrature(int dim,
                    const std::function<double(const std::vector<double>&)>& f,
                    int order = 16);

// Same, but integrating over each of the dim! orderings separately so that
// integrands built from min() of coordinates stay smooth per cell.
double w_quadrature_minaware(
    int dim, const std::function<double(const std::vector<double>&)>& f,
    int order = 16);

// Exact rational integral over [0,1]^k of a product of min's of subsets of
// the k coordinates (given as bitmasks), by summing over orderings.
boost::multiprecision::cpp_rational integrate_min_product(
    int k, const std::vector<std::uint32_t>& subset_masks);

}  // namespace lve

#endif
