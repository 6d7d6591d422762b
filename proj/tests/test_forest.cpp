#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "lve/forest.hpp"

using namespace lve;

TEST_CASE("forest enumeration counts") {
  CHECK(enumerate_forests(1).size() == 1);   // empty forest only
  CHECK(enumerate_forests(2).size() == 2);   // empty + one edge
  CHECK(enumerate_forests(3).size() == 7);   // 1 + 3 + 3 spanning trees
  for (const auto& f : enumerate_forests(4)) {
    CHECK(f.size() <= 3);
  }
}

TEST_CASE("single vertex decomposes to the bare value") {
  CallablePairFunction f(1, [](const Eigen::MatrixXd&) { return 7.5; });
  auto terms = bkar_decompose(f);
  CHECK(terms.size() == 1);
  CHECK(terms[0].forest.empty());
  CHECK(terms[0].value == doctest::Approx(7.5));
}

TEST_CASE("two vertices, f(x)=x, fundamental theorem of calculus") {
  MultilinearPairPolynomial f(2);
  f.add_term({{0, 1}}, 1.0);
  auto terms = bkar_decompose(f);
  REQUIRE(terms.size() == 2);
  CHECK(forest_sum(f) == doctest::Approx(1.0).epsilon(1e-12));
  // empty forest contributes f(0) = 0, the one-edge forest the rest
  double empty_val = 0, edge_val = 0;
  for (const auto& t : terms)
    (t.forest.empty() ? empty_val : edge_val) += t.value;
  CHECK(empty_val == doctest::Approx(0.0));
  CHECK(edge_val == doctest::Approx(1.0));
}

TEST_CASE("forest sum reproduces random multilinear polynomials") {
  for (int n = 2; n <= 5; ++n)
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
      auto f = MultilinearPairPolynomial::random(n, seed * 131 + n);
      double direct = f.eval(Eigen::MatrixXd::Ones(n, n));
      double fsum = forest_sum(f);
      CHECK(std::abs(fsum - direct) <=
            1e-9 * std::max(1.0, std::abs(direct)));
    }
}

TEST_CASE("block factorization of the forest sum") {
  // polynomial supported on pairs inside {0,1} times one inside {2,3}
  MultilinearPairPolynomial a(2), b(2), prod(4);
  a.add_term({}, 1.0);
  a.add_term({{0, 1}}, 0.7);
  b.add_term({}, 1.0);
  b.add_term({{0, 1}}, -0.3);
  prod.add_term({}, 1.0);
  prod.add_term({{0, 1}}, 0.7);
  prod.add_term({{2, 3}}, -0.3);
  prod.add_term({{0, 1}, {2, 3}}, 0.7 * -0.3);
  CHECK(forest_sum(prod) ==
        doctest::Approx(forest_sum(a) * forest_sum(b)).epsilon(1e-9));
}

TEST_CASE("tree terms of a factorizing family reexponentiate") {
  double eps = 0.01;
  ProductToyFamily fam(5, eps);
  check_multiplicative(fam, 5);
  auto c = tree_connected_part(fam, 5);
  double log_side = 0.0, fact = 1.0;
  for (int n = 1; n <= 5; ++n) {
    fact *= n;
    log_side += c[n - 1] / fact;
    // the forest sum is the member at all-ones couplings
    CHECK(forest_sum(fam.member(n)) ==
          doctest::Approx(std::pow(1 + eps, n * (n - 1) / 2.0))
              .epsilon(1e-10));
  }
  // the forest side of the exp identity continued past the enumeration cap
  // with the closed form of the all-ones evaluation; the connected side
  // truncates at n = 5 with error ~ eps^5
  double z = 0.0;
  fact = 1.0;
  for (int n = 0; n <= 40; ++n) {
    if (n >= 2) fact *= n;
    z += std::pow(1 + eps, n * (n - 1) / 2.0) / fact;
  }
  CHECK(std::exp(log_side) == doctest::Approx(z).epsilon(1e-8));
}

TEST_CASE("tree sum vanishes when couplings do nothing") {
  MultilinearPairPolynomial f(3);
  f.add_term({}, 2.0);  // constant: every derivative is zero
  for (const auto& t : bkar_tree_terms(f)) CHECK(t.value == doctest::Approx(0.0));
}

TEST_CASE("w quadrature basics") {
  CHECK(w_quadrature(1, [](const std::vector<double>&) { return 1.0; }) ==
        doctest::Approx(1.0));
  CHECK(w_quadrature(2, [](const std::vector<double>& w) {
          return w[0] * w[1];
        }) == doctest::Approx(0.25));
  CHECK(w_quadrature_minaware(2, [](const std::vector<double>& w) {
          return std::min(w[0], w[1]);
        }) == doctest::Approx(1.0 / 3).epsilon(1e-12));
  CHECK_THROWS(w_quadrature(6, [](const std::vector<double>&) { return 0.0; }));
}

TEST_CASE("exact min-product integrals") {
  using R = boost::multiprecision::cpp_rational;
  // int min(w1,w2) over the square
  CHECK(integrate_min_product(2, {0b11}) == R(1, 3));
  // int w1 dw = 1/2 as a degenerate one-element subset
  CHECK(integrate_min_product(1, {0b1}) == R(1, 2));
  // int min(w1,w2)^2 = 1/6
  CHECK(integrate_min_product(2, {0b11, 0b11}) == R(1, 6));
  // int w1 w2 = 1/4 via two singleton subsets
  CHECK(integrate_min_product(2, {0b01, 0b10}) == R(1, 4));
}

TEST_CASE("bkar caps") {
  CallablePairFunction f(7, [](const Eigen::MatrixXd&) { return 0.0; });
  CHECK_THROWS(bkar_decompose(f));
}
