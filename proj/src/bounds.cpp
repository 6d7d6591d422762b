#include "lve/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>
#include <stdexcept>

namespace lve {

namespace {

constexpr double kPi = std::numbers::pi;

double dist(const std::array<int, 2>& a, const std::array<int, 2>& b) {
  return std::hypot(a[0] - b[0], a[1] - b[1]);
}

}  // namespace

void validate_cluster(const ClusterSet& g) {
  bool origin = false;
  std::set<std::array<int, 2>> seen;
  for (const auto& s : g.squares) {
    if (!seen.insert(s).second)
      throw std::invalid_argument("duplicate square");
    if (s[0] == 0 && s[1] == 0) origin = true;
  }
  if (!origin) throw std::invalid_argument("cluster must contain the origin");
}

double cluster_tree_length(const ClusterSet& g) {
  validate_cluster(g);
  size_t n = g.squares.size();
  if (n > 14) throw std::length_error("cluster size cap exceeded");
  if (n <= 1) return 0.0;
  // Prim
  std::vector<bool> in_tree(n, false);
  std::vector<double> best(n, 1e300);
  in_tree[0] = true;
  for (size_t i = 1; i < n; ++i) best[i] = dist(g.squares[0], g.squares[i]);
  double total = 0.0;
  for (size_t step = 1; step < n; ++step) {
    int next = -1;
    for (size_t i = 0; i < n; ++i)
      if (!in_tree[i] && (next < 0 || best[i] < best[next]))
        next = static_cast<int>(i);
    total += best[next];
    in_tree[next] = true;
    for (size_t i = 0; i < n; ++i)
      if (!in_tree[i])
        best[i] = std::min(best[i], dist(g.squares[next], g.squares[i]));
  }
  return total;
}

namespace {

// connected subsets containing the origin, each produced exactly once:
// grow by picking candidates in order and forbidding earlier picks on
// the recursive branch
void enum_connected(std::vector<std::array<int, 2>>& cur,
                    std::set<std::array<int, 2>>& used,
                    std::set<std::array<int, 2>>& forbidden, int radius,
                    int size_cap,
                    const std::function<void(const ClusterSet&)>& emit) {
  emit(ClusterSet{cur});
  if (static_cast<int>(cur.size()) >= size_cap) return;
  std::vector<std::array<int, 2>> candidates;
  for (const auto& s : cur)
    for (auto [dx, dy] : {std::pair{1, 0}, {-1, 0}, {0, 1}, {0, -1}}) {
      std::array<int, 2> nb{s[0] + dx, s[1] + dy};
      if (std::abs(nb[0]) > radius || std::abs(nb[1]) > radius) continue;
      if (used.count(nb) || forbidden.count(nb)) continue;
      if (std::count(candidates.begin(), candidates.end(), nb)) continue;
      candidates.push_back(nb);
    }
  std::vector<std::array<int, 2>> newly_forbidden;
  for (const auto& c : candidates) {
    cur.push_back(c);
    used.insert(c);
    enum_connected(cur, used, forbidden, radius, size_cap, emit);
    used.erase(c);
    cur.pop_back();
    forbidden.insert(c);
    newly_forbidden.push_back(c);
  }
  for (const auto& c : newly_forbidden) forbidden.erase(c);
}

}  // namespace

ClusterSumReport cluster_sum(double c, int radius, int size_cap,
                             bool exhaustive) {
  if (c <= 0) throw std::invalid_argument("decay rate must be positive");
  if (radius < 0 || size_cap < 1) throw std::invalid_argument("bad caps");
  if (size_cap > 14) throw std::length_error("cluster size cap exceeded");
  ClusterSumReport rep;
  rep.increments.assign(size_cap, 0.0);
  auto emit = [&](const ClusterSet& g) {
    rep.increments[g.squares.size() - 1] +=
        std::exp(-c * cluster_tree_length(g));
  };
  if (exhaustive) {
    int side = 2 * radius + 1;
    int cells = side * side;
    if (cells > 16) throw std::length_error("exhaustive mode needs R <= 1");
    std::vector<std::array<int, 2>> box;
    for (int x = -radius; x <= radius; ++x)
      for (int y = -radius; y <= radius; ++y)
        if (x || y) box.push_back({x, y});
    for (unsigned mask = 0; mask < (1u << box.size()); ++mask) {
      ClusterSet g;
      g.squares.push_back({0, 0});
      for (size_t i = 0; i < box.size(); ++i)
        if (mask & (1u << i)) g.squares.push_back(box[i]);
      if (static_cast<int>(g.squares.size()) <= size_cap) emit(g);
    }
  } else {
    std::vector<std::array<int, 2>> cur{{0, 0}};
    std::set<std::array<int, 2>> used{{0, 0}}, forbidden;
    enum_connected(cur, used, forbidden, radius, size_cap, emit);
  }
  double acc = 0.0;
  for (double inc : rep.increments) {
    acc += inc;
    rep.partial_sums.push_back(acc);
  }
  return rep;
}

MajorantReport pressure_majorant(double lambda, double K, int j_max, double M,
                                 int n_terms) {
  if (lambda <= 0 || K <= 0 || j_max < 1)
    throw std::invalid_argument("majorant needs positive inputs");
  MajorantReport rep;
  double x = lambda * K * j_max * std::log(M);
  rep.converges = x < 1.0;
  for (int n = 1; n <= n_terms; ++n) {
    // n^{n-2}/n! 2^{n-1} in log space
    double lc = (n - 2) * std::log(static_cast<double>(n)) -
                std::lgamma(n + 1.0) + (n - 1) * std::log(2.0);
    rep.coeffs.push_back(std::exp(lc));
    rep.terms.push_back(std::pow(x, n));
    rep.partial_sum += rep.terms.back();
  }
  if (rep.converges) rep.closed_form = x / (1.0 - x);
  return rep;
}

double nelson_check(double a, double lambda, int j, double s) {
  if (a <= 0 || lambda <= 0 || j < 0 || s <= 0)
    throw std::invalid_argument("nelson_check needs positive inputs");
  double jj = static_cast<double>(j);
  double lg = -a * jj * jj + std::lgamma(jj + 1.0) +
              2.0 * lambda * s * s * jj * jj;
  return std::exp(lg);
}

namespace {

// k-th derivative by trapezoid quadrature of the Cauchy integral on a
// circle of radius rho around z0; spectrally accurate for analytic f
std::complex<double> cauchy_derivative(
    const std::function<std::complex<double>(std::complex<double>)>& f,
    std::complex<double> z0, double rho, int k, int points = 256) {
  std::complex<double> acc = 0.0;
  for (int m = 0; m < points; ++m) {
    double th = 2.0 * kPi * m / points;
    std::complex<double> w = std::polar(1.0, th);
    acc += f(z0 + rho * w) * std::polar(1.0, -k * th);
  }
  double fact = 1.0;
  for (int q = 2; q <= k; ++q) fact *= q;
  return acc * fact / (static_cast<double>(points) * std::pow(rho, k));
}

// 16-point Gauss-Legendre on [0, 1]
const double kGLx[8] = {0.0052995325041750, 0.0277124884633837,
                        0.0671843988060841, 0.1222977958224985,
                        0.1910618777986781, 0.2709916111713863,
                        0.3591982246103705, 0.4524937450811813};
const double kGLw[8] = {0.0135762297058770, 0.0311267619693239,
                        0.0475792558412464, 0.0623144856277669,
                        0.0747979944082884, 0.0845782596975013,
                        0.0913017075224618, 0.0947253052275343};

}  // namespace

TaylorRemainder taylor_remainder(
    const std::function<std::complex<double>(std::complex<double>)>& f, int N,
    double lambda, const std::vector<double>& taylor0) {
  if (N < 0 || N > 6) throw std::invalid_argument("order out of range");
  if (lambda <= 0) throw std::invalid_argument("lambda must be positive");
  if (static_cast<int>(taylor0.size()) < N + 1)
    throw std::invalid_argument("need Taylor coefficients through order N");

  TaylorRemainder rep;
  // route 1: f(lambda) minus the known Taylor polynomial at 0
  std::complex<double> direct = f(lambda);
  for (int n = 0; n <= N; ++n)
    direct -= taylor0[n] * std::pow(lambda, n);
  rep.direct = direct.real();

  // route 2: integral form, derivatives on circles inside Re > 0.
  // graded panels toward t = 1 resolve the fast variation of the high
  // derivative without shrinking the Cauchy circles near t = 0
  std::complex<double> integral = 0.0;
  double nfact = 1.0;
  for (int q = 2; q <= N; ++q) nfact *= q;
  const double brk[] = {0.0, 0.5, 0.8, 1.0};
  for (int p = 0; p < 3; ++p) {
    double lo = brk[p], h = brk[p + 1] - brk[p];
    for (int half = 0; half < 2; ++half)
      for (int i = 0; i < 8; ++i) {
        double t = lo + h * (half ? 1.0 - kGLx[i] : kGLx[i]);
        std::complex<double> d =
            cauchy_derivative(f, t * lambda, 0.7 * t * lambda, N + 1);
        integral += h * kGLw[i] * std::pow(1.0 - t, N) / nfact * d;
      }
  }
  integral *= std::pow(lambda, N + 1);
  rep.integral = integral.real();

  rep.agreement = std::abs(rep.direct - rep.integral) /
                  std::max(std::abs(rep.direct), 1e-30);
  rep.widened = rep.agreement > 1e-5;
  return rep;
}

FactorialFit factorial_bound_fit(const std::vector<RemainderReport>& reports) {
  std::vector<double> xs, ys;
  for (const RemainderReport& r : reports) {
    if (r.lambdas.size() != r.remainders.size())
      throw std::invalid_argument("grid/value size mismatch");
    double nfact = 1.0;
    for (int q = 2; q <= r.N; ++q) nfact *= q;
    for (size_t i = 0; i < r.lambdas.size(); ++i) {
      double v = std::abs(r.remainders[i]);
      if (!std::isfinite(v)) throw std::invalid_argument("remainder not finite");
      if (v == 0.0) continue;
      xs.push_back(static_cast<double>(r.N));
      ys.push_back(std::log(v) - std::log(nfact) -
                   (r.N + 1) * std::log(std::abs(r.lambdas[i])));
    }
  }
  std::set<double> orders(xs.begin(), xs.end());
  if (orders.size() < 3) throw std::invalid_argument("need >= 3 orders");
  double n = static_cast<double>(xs.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (size_t i = 0; i < xs.size(); ++i) {
    sx += xs[i];
    sy += ys[i];
    sxx += xs[i] * xs[i];
    sxy += xs[i] * ys[i];
  }
  double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  double logA = (sy - slope * sx) / n;
  // shift A up until the bound covers every sample (one-sided residuals)
  double worst = -1e300;
  for (size_t i = 0; i < xs.size(); ++i)
    worst = std::max(worst, ys[i] - (logA + slope * xs[i]));
  logA += std::max(0.0, worst);
  FactorialFit fit;
  fit.A = std::exp(logA);
  fit.B = std::exp(slope);
  fit.one_sided = true;
  for (size_t i = 0; i < xs.size(); ++i) {
    double res = ys[i] - (logA + slope * xs[i]);
    fit.residuals.push_back(res);
    if (res > 1e-9) fit.one_sided = false;
  }
  return fit;
}

BorelTransform borel_partial_transform(const std::vector<double>& coeffs,
                                       const std::vector<double>& u_grid) {
  if (coeffs.size() < 2) throw std::invalid_argument("need >= 2 coefficients");
  BorelTransform out;
  for (double u : u_grid) {
    double acc = 0.0, term = 0.0, fact = 1.0;
    for (size_t n = 0; n < coeffs.size(); ++n) {
      if (n >= 2) fact *= static_cast<double>(n);
      term = coeffs[n] * std::pow(u, static_cast<double>(n)) / fact;
      acc += term;
    }
    out.values.push_back(acc);
    out.truncation.push_back(std::abs(term));
  }
  return out;
}

}  // namespace lve
