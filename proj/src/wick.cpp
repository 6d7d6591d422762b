#include "lve/wick.hpp"

#include <cmath>
#include <cstdint>
#include <stdexcept>

#include <Eigen/Eigenvalues>
#include <nlohmann/json.hpp>

#include "lve/trees.hpp"

namespace lve {

namespace {

double pair_partition_sum(const Eigen::MatrixXd& C, std::vector<int>& idx) {
  if (idx.empty()) return 1.0;
  // pair the first index with each later one; canonical, duplicate-free
  int a = idx[0];
  double total = 0.0;
  for (size_t p = 1; p < idx.size(); ++p) {
    int b = idx[p];
    std::vector<int> rest;
    rest.reserve(idx.size() - 2);
    for (size_t q = 1; q < idx.size(); ++q)
      if (q != p) rest.push_back(idx[q]);
    total += C(a, b) * pair_partition_sum(C, rest);
  }
  return total;
}

BigInt factorial(int n) {
  BigInt f = 1;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

// Multigraphs with degree 4 at each vertex: m_ij inter-vertex lines plus
// l_i self-loops (2 legs each). The leg-pairing count for one multigraph is
// prod_i 4! / (prod_{i<j} m_ij! * prod_i 2^{l_i} l_i!).
void multigraph_sum(const Eigen::MatrixXd& C, double loop_factor,
                    const std::vector<int>& sites, size_t i, size_t j,
                    std::vector<int>& remaining, double partial,
                    BigInt denom, double& total) {
  size_t n = sites.size();
  if (i == n) {
    BigInt mult = 1;
    for (size_t v = 0; v < n; ++v) mult *= 24;  // 4! per vertex
    double loops = 1.0;
    for (size_t v = 0; v < n; ++v) {
      int l = remaining[v] / 2;
      denom *= factorial(l);
      for (int q = 0; q < l; ++q) {
        denom *= 2;
        loops *= loop_factor;
      }
    }
    Rational r(mult, denom);
    total += partial * loops * static_cast<double>(r);
    return;
  }
  if (j == n) {
    if (remaining[i] % 2 != 0) return;  // leftover legs must pair as loops
    multigraph_sum(C, loop_factor, sites, i + 1, i + 2, remaining, partial,
                   denom, total);
    return;
  }
  int cap = std::min(remaining[i], remaining[j]);
  double c = C(sites[i], sites[j]);
  double pw = 1.0;
  BigInt d = denom;
  for (int m = 0; m <= cap; ++m) {
    remaining[i] -= m;
    remaining[j] -= m;
    multigraph_sum(C, loop_factor, sites, i, j + 1, remaining, partial * pw,
                   d, total);
    remaining[i] += m;
    remaining[j] += m;
    pw *= c;
    d *= (m + 1);
  }
}

// Set partitions of {0..n-1} as block-index vectors, n <= 4.
std::vector<std::vector<int>> set_partitions(int n) {
  std::vector<std::vector<int>> out;
  std::vector<int> block(n, 0);
  auto rec = [&](auto&& self, int pos, int max_block) -> void {
    if (pos == n) {
      out.push_back(block);
      return;
    }
    for (int b = 0; b <= max_block + 1; ++b) {
      block[pos] = b;
      self(self, pos + 1, std::max(max_block, b));
    }
  };
  rec(rec, 0, -1);
  return out;
}

// Joint cumulant of :phi^4: at the given (repeatable) sites via Moebius
// inversion over set partitions.
double quartic_cumulant(const Eigen::MatrixXd& cov, double T,
                        const std::vector<int>& sites) {
  int n = static_cast<int>(sites.size());
  double total = 0.0;
  for (const auto& part : set_partitions(n)) {
    int n_blocks = 0;
    for (int b : part) n_blocks = std::max(n_blocks, b + 1);
    double prod = 1.0;
    for (int b = 0; b < n_blocks; ++b) {
      std::vector<int> block_sites;
      for (int i = 0; i < n; ++i)
        if (part[i] == b) block_sites.push_back(sites[i]);
      prod *= wick_quartic_moment(cov, T, block_sites);
    }
    double sign = (n_blocks % 2 == 1) ? 1.0 : -1.0;
    double fac = static_cast<double>(factorial(n_blocks - 1));
    total += sign * fac * prod;
  }
  return total;
}

void check_series_caps(const LatticeModel& model, int order) {
  if (order < 0) throw std::invalid_argument("negative order");
  if (order > 4) throw std::length_error("series order capped at 4");
  if (order == 4 && model.sites() > 4)
    throw std::length_error("order 4 needs at most 4 sites");
  if (model.sites() > 16) throw std::length_error("at most 16 sites");
}

std::string model_descriptor(const LatticeModel& model) {
  nlohmann::json j;
  j["Nx"] = model.Nx;
  j["Ny"] = model.Ny;
  j["a"] = model.a;
  j["m"] = model.m;
  j["mode"] =
      model.mode == CutoffMode::SliceHeatKernel ? "slice" : "momentum";
  j["M"] = model.M;
  j["j_max"] = model.j_max;
  return j.dump();
}

// Sum over all site tuples of length n of term(sites), where term is
// either a joint moment or a joint cumulant.
template <typename F>
double tuple_sum(int n_sites, int n, F&& term) {
  std::vector<int> tuple(n, 0);
  double total = 0.0;
  while (true) {
    total += term(tuple);
    int pos = n - 1;
    while (pos >= 0 && ++tuple[pos] == n_sites) tuple[pos--] = 0;
    if (pos < 0) break;
  }
  return total;
}

// Gauss-Hermite rule for the standard normal weight, by Golub-Welsch on
// the probabilists' Hermite recurrence.
struct GaussHermite {
  std::vector<double> nodes, weights;
};

GaussHermite gauss_hermite(int n) {
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
  for (int i = 1; i < n; ++i) {
    double b = std::sqrt(static_cast<double>(i));
    J(i, i - 1) = b;
    J(i - 1, i) = b;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
  GaussHermite gh;
  for (int i = 0; i < n; ++i) {
    gh.nodes.push_back(es.eigenvalues()[i]);
    double v = es.eigenvectors()(0, i);
    gh.weights.push_back(v * v);
  }
  return gh;
}

std::complex<double> quadrature_logZ(const LatticeModel& model,
                                     std::complex<double> lambda,
                                     int degree) {
  int S = model.sites();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(model.covariance);
  Eigen::MatrixXd map = es.eigenvectors();
  for (int i = 0; i < S; ++i)
    map.col(i) *= std::sqrt(std::max(0.0, es.eigenvalues()[i]));

  GaussHermite gh = gauss_hermite(degree);
  double vol = model.a * model.a;
  double T = model.T;
  std::vector<int> idx(S, 0);
  Eigen::VectorXd u(S), phi(S);
  auto node_action = [&]() {
    for (int i = 0; i < S; ++i) u[i] = gh.nodes[idx[i]];
    phi.noalias() = map * u;
    double action = 0.0;
    for (int x = 0; x < S; ++x) {
      double p2 = phi[x] * phi[x];
      action += p2 * p2 - 6.0 * T * p2 + 3.0 * T * T;
    }
    return action;
  };
  // log-sum-exp in two passes: for Re(lambda) < 0 individual terms can
  // overflow even though log Z is moderate
  double shift = -1e300;
  while (true) {
    shift = std::max(shift, (-0.5 * lambda * vol * node_action()).real());
    int pos = S - 1;
    while (pos >= 0 && ++idx[pos] == degree) idx[pos--] = 0;
    if (pos < 0) break;
  }
  std::complex<double> Z = 0.0;
  std::fill(idx.begin(), idx.end(), 0);
  while (true) {
    double w = 1.0;
    for (int i = 0; i < S; ++i) w *= gh.weights[idx[i]];
    Z += w * std::exp(-0.5 * lambda * vol * node_action() - shift);
    int pos = S - 1;
    while (pos >= 0 && ++idx[pos] == degree) idx[pos--] = 0;
    if (pos < 0) break;
  }
  return shift + std::log(Z);
}

}  // namespace

double gaussian_moment(const MomentRequest& req) {
  if (req.indices.size() % 2 != 0) return 0.0;  // odd degree, by convention
  if (req.indices.size() > 16)
    throw std::length_error("moment degree capped at 16");
  for (int i : req.indices)
    if (i < 0 || i >= req.covariance.rows())
      throw std::out_of_range("site index");
  std::vector<int> idx = req.indices;
  return pair_partition_sum(req.covariance, idx);
}

std::array<double, 3> wick_order_quartic(double T) {
  if (T < 0) throw std::invalid_argument("negative tadpole");
  return {1.0, -6.0 * T, 3.0 * T * T};
}

double wick_quartic_moment(const Eigen::MatrixXd& cov, double T,
                           const std::vector<int>& sites) {
  for (int s : sites)
    if (s < 0 || s >= cov.rows()) throw std::out_of_range("site index");
  if (sites.empty()) return 1.0;
  // Wick ordering shifts every intra-vertex contraction from C(x,x) to
  // C(x,x) - T, which is the only change relative to plain phi^4 moments.
  double loop_factor = cov(sites[0], sites[0]) - T;
  std::vector<int> remaining(sites.size(), 4);
  double total = 0.0;
  multigraph_sum(cov, loop_factor, sites, 0, 1, remaining, 1.0, 1, total);
  return total;
}

SeriesCoefficients logZ_series(const LatticeModel& model, int order) {
  check_series_caps(model, order);
  SeriesCoefficients out;
  out.model = model_descriptor(model);
  out.method = "oracle";
  out.coefficients.push_back(0.0);  // a_0: normalized measure
  out.abs_err.push_back(0.0);
  double vol = model.a * model.a;
  double pref = 1.0;
  for (int n = 1; n <= order; ++n) {
    pref *= -0.5 * vol / n;  // (-vol/2)^n / n!
    double sum = tuple_sum(model.sites(), n, [&](const std::vector<int>& t) {
      return quartic_cumulant(model.covariance, model.T, t);
    });
    double an = pref * sum;
    out.coefficients.push_back(an);
    out.abs_err.push_back(1e-13 * (1.0 + std::abs(an)));
  }
  return out;
}

std::vector<double> Z_series(const LatticeModel& model, int order) {
  check_series_caps(model, order);
  std::vector<double> z{1.0};
  double vol = model.a * model.a;
  double pref = 1.0;
  for (int n = 1; n <= order; ++n) {
    pref *= -0.5 * vol / n;
    double sum = tuple_sum(model.sites(), n, [&](const std::vector<int>& t) {
      return wick_quartic_moment(model.covariance, model.T, t);
    });
    z.push_back(pref * sum);
  }
  return z;
}

std::complex<double> entire_logZ(const LatticeModel& model,
                                 std::complex<double> lambda, int degree) {
  if (model.sites() > 4) throw std::length_error("at most 4 sites");
  return quadrature_logZ(model, lambda, degree);
}

std::complex<double> direct_logZ(const LatticeModel& model,
                                 std::complex<double> lambda, int degree) {
  if (model.sites() > 4) throw std::length_error("at most 4 sites");
  if (lambda.real() < 0.0) throw std::domain_error("Re(lambda) must be >= 0");
  if (std::abs(lambda) > 1.0) throw std::domain_error("|lambda| must be <= 1");
  if (degree < 40) degree = 40;
  std::complex<double> v = quadrature_logZ(model, lambda, degree);
  std::complex<double> check = quadrature_logZ(model, lambda, degree + 8);
  if (std::abs(v - check) > 1e-8 * (1.0 + std::abs(check)))
    throw std::runtime_error("direct_logZ quadrature did not converge");
  return check;
}

std::string series_to_json(const SeriesCoefficients& s) {
  nlohmann::json j;
  j["model"] = s.model;
  j["method"] = s.method;
  j["coefficients"] = nlohmann::json::array();
  for (size_t n = 0; n < s.coefficients.size(); ++n)
    j["coefficients"].push_back({{"n", n},
                                 {"value", s.coefficients[n]},
                                 {"abs_err", s.abs_err[n]}});
  return j.dump(2);
}

}  // namespace lve
