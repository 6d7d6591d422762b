#include "lve/lve_engine.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <Eigen/Eigenvalues>
#include <nlohmann/json.hpp>

#include "lve/forest.hpp"

namespace lve {

namespace {

constexpr std::complex<double> kI{0.0, 1.0};

std::complex<double> ipow(int p) {
  static const std::complex<double> table[4] = {
      {1, 0}, {0, 1}, {-1, 0}, {0, -1}};
  return table[((p % 4) + 4) % 4];
}

// Polynomial in the sigma_{v,x} variables, graded by the formal power of
// sqrt(lambda). Key: (grade, sorted variable ids), id = v * S + x.
using Monomial = std::vector<int>;
using SigmaKey = std::pair<int, Monomial>;
using SigmaPoly = std::map<SigmaKey, std::complex<double>>;

void add_term(SigmaPoly& p, int g, Monomial m, std::complex<double> c) {
  std::sort(m.begin(), m.end());
  auto [it, fresh] = p.try_emplace({g, std::move(m)}, c);
  if (!fresh) it->second += c;
}

SigmaPoly multiply(const SigmaPoly& a, const SigmaPoly& b, int g_max) {
  SigmaPoly out;
  for (const auto& [ka, ca] : a)
    for (const auto& [kb, cb] : b) {
      int g = ka.first + kb.first;
      if (g > g_max) continue;
      Monomial m = ka.second;
      m.insert(m.end(), kb.second.begin(), kb.second.end());
      add_term(out, g, std::move(m), ca * cb);
    }
  return out;
}

SigmaPoly differentiate(const SigmaPoly& p, int var) {
  SigmaPoly out;
  for (const auto& [key, c] : p) {
    const Monomial& m = key.second;
    int count = static_cast<int>(std::count(m.begin(), m.end(), var));
    if (count == 0) continue;
    Monomial rest = m;
    rest.erase(std::find(rest.begin(), rest.end(), var));
    add_term(out, key.first, std::move(rest),
             c * static_cast<double>(count));
  }
  return out;
}

// W_v = -1/2 Tr log_2(1 + 2i sqrt(lambda) a C^{1/2} Sigma_v C^{1/2})
// expanded to sigma-degree q_max; the series starts at q=2 (log_2), which
// is exactly the leaf-tadpole exclusion.
SigmaPoly loop_vertex_poly(const LatticeModel& model, int v, int q_min,
                           int q_max) {
  int S = model.sites();
  const Eigen::MatrixXd& C = model.covariance;
  SigmaPoly out;
  for (int q = std::max(2, q_min); q <= q_max; ++q) {
    double sign = (q % 2 == 0) ? -1.0 : 1.0;  // (-1)^{q-1}
    std::complex<double> pref =
        -0.5 * sign * std::pow(2.0 * model.a, q) * ipow(q) / double(q);
    // Tr (C Sigma)^q = sum over site cycles of prod C * prod sigma
    std::vector<int> x(q, 0);
    while (true) {
      double cprod = 1.0;
      for (int t = 0; t < q; ++t) cprod *= C(x[t], x[(t + 1) % q]);
      Monomial m(q);
      for (int t = 0; t < q; ++t) m[t] = v * S + x[t];
      add_term(out, q, std::move(m), pref * cprod);
      int pos = q - 1;
      while (pos >= 0 && ++x[pos] == S) x[pos--] = 0;
      if (pos < 0) break;
    }
  }
  return out;
}

SigmaPoly counterterm_poly(const LatticeModel& model, int v) {
  int S = model.sites();
  SigmaPoly out;
  std::complex<double> pref = 2.0 * kI * model.T * model.a;
  for (int x = 0; x < S; ++x) add_term(out, 1, {v * S + x}, pref);
  return out;
}

Rational integrate_min_product_cached(int k,
                                      std::vector<std::uint32_t> masks) {
  std::sort(masks.begin(), masks.end());
  static std::map<std::pair<int, std::vector<std::uint32_t>>, Rational>
      cache;
  auto key = std::make_pair(k, masks);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  Rational r = integrate_min_product(k, masks);
  cache.emplace(std::move(key), r);
  return r;
}

struct PairingContext {
  const LatticeModel* model;
  const LabeledTree* tree;
  std::map<Edge, int> edge_index;
  std::vector<int> degrees;
};

std::uint32_t path_mask(const PairingContext& ctx, int v, int vp) {
  std::vector<int> path = ctx.tree->path(v, vp);
  std::uint32_t mask = 0;
  for (size_t i = 0; i + 1 < path.size(); ++i)
    mask |= 1u << ctx.edge_index.at(make_edge(path[i], path[i + 1]));
  return mask;
}

// Sum over pair partitions of the variables; each pair must share a site,
// same-vertex pairs weigh 1, cross-vertex pairs weigh the path infimum of
// the w parameters (integrated exactly at the end of each branch).
void pairing_sum(const PairingContext& ctx, const Monomial& vars,
                 std::vector<bool>& used, std::vector<std::pair<int, int>>& pairs,
                 std::vector<std::uint32_t>& masks, double& total,
                 std::vector<std::string>* inventory,
                 const nlohmann::json& record_base,
                 std::complex<double> coeff) {
  size_t first = 0;
  while (first < vars.size() && used[first]) ++first;
  if (first == vars.size()) {
    int k = ctx.tree->n_vertices - 1;
    Rational w = masks.empty() ? Rational(1)
                               : integrate_min_product_cached(k, masks);
    double wval = static_cast<double>(w);
    total += wval;
    if (inventory) {
      nlohmann::json rec = record_base;
      rec["pairing"] = pairs;
      rec["w_integral"] = w.str();
      std::complex<double> val = coeff * wval;
      rec["value"] = {val.real(), val.imag()};
      inventory->push_back(rec.dump());
    }
    return;
  }
  used[first] = true;
  int S = ctx.model->sites();
  int v1 = vars[first] / S, x1 = vars[first] % S;
  for (size_t j = first + 1; j < vars.size(); ++j) {
    if (used[j]) continue;
    int v2 = vars[j] / S, x2 = vars[j] % S;
    if (x1 != x2) continue;  // ultralocal sigma propagator
    if (v1 == v2 && ctx.degrees[v1] == 1) {
      // a self-pair at a leaf needs sigma-power >= 3 there (one power is
      // eaten by the tree derivation); power 2 would be a leaf tadpole,
      // which log_2 excludes by construction
      long have = std::count_if(vars.begin(), vars.end(), [&](int id) {
        return id / S == v1;
      });
      if (have + 1 <= 2)
        throw std::logic_error("leaf tadpole formed in sigma pairing");
    }
    used[j] = true;
    pairs.emplace_back(static_cast<int>(first), static_cast<int>(j));
    bool pushed = false;
    if (v1 != v2) {
      masks.push_back(path_mask(ctx, v1, v2));
      pushed = true;
    }
    pairing_sum(ctx, vars, used, pairs, masks, total, inventory,
                record_base, coeff);
    if (pushed) masks.pop_back();
    pairs.pop_back();
    used[j] = false;
  }
  used[first] = false;
}

void check_caps(const LatticeModel& model, int n, int order) {
  if (n > 4) throw std::length_error("tree size capped at 4");
  if (order > 3) throw std::length_error("lambda order capped at 3");
  if (order < 0) throw std::invalid_argument("negative order");
  if (model.sites() > 16) throw std::length_error("at most 16 sites");
}

}  // namespace

std::string convention_name(DerivationConvention c) {
  return c == DerivationConvention::SinglePerLine ? "single-per-line"
                                                  : "half-per-pair";
}

std::vector<ResolventChain> derive_loop_vertex(
    int p, const std::vector<int>& positions) {
  if (p < 1) throw std::invalid_argument("need at least one derivation");
  if (static_cast<int>(positions.size()) != p)
    throw std::invalid_argument("positions must match derivation count");
  std::vector<ResolventChain> out;
  if (p == 1) {
    ResolventChain c;
    c.subtracted = true;
    c.positions = positions;
    c.prefactor = -1;
    c.i_power = 1;
    c.sqrt_lambda_power = 1;
    out.push_back(std::move(c));
    return out;
  }
  // -(1/2) (2 i sqrt(lambda))^p (-1)^{p-1}, one chain per permutation
  // fixing the first position (cyclic root)
  BigInt two_p = boost::multiprecision::pow(BigInt(2), p);
  Rational pref = Rational(-1, 2) * Rational(two_p);
  if (p % 2 == 0) pref = -pref;  // (-1)^{p-1}
  std::vector<int> rest(positions.begin() + 1, positions.end());
  std::sort(rest.begin(), rest.end());
  do {
    ResolventChain c;
    c.positions.push_back(positions[0]);
    c.positions.insert(c.positions.end(), rest.begin(), rest.end());
    c.prefactor = pref;
    c.i_power = p;
    c.sqrt_lambda_power = p;
    out.push_back(std::move(c));
  } while (std::next_permutation(rest.begin(), rest.end()));
  return out;
}

TreeAmplitude tree_amplitude_series(const DecoratedTree& t,
                                    const LatticeModel& model, int order,
                                    DerivationConvention conv,
                                    bool with_inventory) {
  int n = t.tree.n_vertices;
  check_caps(model, n, order);
  int g_max = 2 * order;
  int S = model.sites();
  double volume = model.a * model.a * S;

  TreeAmplitude amp;
  amp.coefficients.assign(order + 1, 0.0);

  std::vector<int> deg = t.tree.degrees();
  for (const auto& [v, is_ct] : t.counterterm)
    if (is_ct && (n == 1 || deg[v] != 1))
      throw std::invalid_argument("counterterm mark off a leaf");

  PairingContext ctx{&model, &t.tree, {}, deg};
  for (size_t i = 0; i < t.tree.edges.size(); ++i)
    ctx.edge_index[t.tree.edges[i]] = static_cast<int>(i);

  // product of vertex factors
  SigmaPoly poly{{{0, {}}, 1.0}};
  for (int v = 0; v < n; ++v) {
    SigmaPoly factor;
    if (t.is_counterterm(v)) {
      factor = counterterm_poly(model, v);
    } else {
      factor = loop_vertex_poly(model, v, std::max(2, deg[v]), g_max);
    }
    poly = multiply(poly, factor, g_max);
  }

  // one ultralocal sigma derivation pair per tree line
  double line_factor = conv == DerivationConvention::HalfPerPair ? 0.5 : 1.0;
  for (const Edge& e : t.tree.edges) {
    SigmaPoly derived;
    for (int x = 0; x < S; ++x) {
      SigmaPoly d =
          differentiate(differentiate(poly, e.first * S + x), e.second * S + x);
      for (auto& [key, c] : d) {
        auto [it, fresh] = derived.try_emplace(key, c * line_factor);
        if (!fresh) it->second += c * line_factor;
      }
    }
    poly = std::move(derived);
  }

  // Gaussian expectation term by term
  nlohmann::json base;
  if (with_inventory) {
    base["tree"] = t.tree.edges;
    std::vector<int> cts;
    for (const auto& [v, is_ct] : t.counterterm)
      if (is_ct) cts.push_back(v);
    base["ct"] = cts;
  }
  for (const auto& [key, coeff] : poly) {
    auto [g, vars] = key;
    if (g % 2 != 0 || vars.size() % 2 != 0) continue;
    int lam = g / 2;
    if (lam > order) continue;
    double total = 0.0;
    std::vector<bool> used(vars.size(), false);
    std::vector<std::pair<int, int>> pairs;
    std::vector<std::uint32_t> masks;
    nlohmann::json rec = base;
    if (with_inventory) {
      rec["lambda_power"] = lam;
      std::vector<std::pair<int, int>> vx;
      for (int id : vars) vx.emplace_back(id / S, id % S);
      rec["vars"] = vx;
      rec["prefactor"] = {coeff.real(), coeff.imag()};
    }
    pairing_sum(ctx, vars, used, pairs, masks, total,
                with_inventory ? &amp.inventory : nullptr, rec, coeff);
    amp.coefficients[lam] += coeff * total;
  }

  // CC can bear no derivation: it contributes only to the empty tree
  if (n == 1 && !t.is_counterterm(0) && order >= 1)
    amp.coefficients[1] += 3.0 * volume * model.T * model.T;
  return amp;
}

SeriesCoefficients lve_logZ_series(const LatticeModel& model, int n_max,
                                   int order, DerivationConvention conv) {
  check_caps(model, n_max, order);
  std::vector<std::complex<double>> acc(order + 1, 0.0);
  double inv_fact = 1.0;
  for (int n = 1; n <= n_max; ++n) {
    inv_fact /= n;
    for (const LabeledTree& tree : enumerate_labeled_trees(n)) {
      std::vector<int> deg = tree.degrees();
      std::vector<int> leaves;
      for (int v = 0; v < n; ++v)
        if (n >= 2 && deg[v] == 1) leaves.push_back(v);
      // every leaf is independently a loop vertex or a counterterm
      for (std::uint32_t sub = 0; sub < (1u << leaves.size()); ++sub) {
        DecoratedTree dt;
        dt.tree = tree;
        for (size_t i = 0; i < leaves.size(); ++i)
          if (sub & (1u << i)) dt.counterterm[leaves[i]] = true;
        TreeAmplitude amp = tree_amplitude_series(dt, model, order, conv);
        for (int k = 0; k <= order; ++k)
          acc[k] += inv_fact * amp.coefficients[k];
      }
    }
  }

  SeriesCoefficients out;
  nlohmann::json desc;
  desc["Nx"] = model.Nx;
  desc["Ny"] = model.Ny;
  desc["a"] = model.a;
  desc["m"] = model.m;
  desc["n_max"] = n_max;
  desc["convention"] = convention_name(conv);
  out.model = desc.dump();
  out.method = "lve";
  for (int k = 0; k <= order; ++k) {
    out.coefficients.push_back(acc[k].real());
    out.abs_err.push_back(std::abs(acc[k].imag()) +
                          1e-13 * (1.0 + std::abs(acc[k].real())));
  }
  return out;
}

Rational renormalized_planar_sum(int n, const Rational& A, const Rational& B,
                                 const Rational& prefactor) {
  if (n < 1) throw std::invalid_argument("order must be positive");
  Rational sum = 0;
  BigInt binom = 1;
  for (int k = 0; k <= n; ++k) {
    Rational term = binom;
    for (int i = 0; i < n - k; ++i) term *= A;
    for (int i = 0; i < k; ++i) term *= -B;
    sum += term;
    binom = binom * (n - k) / (k + 1);
  }
  Rational direct = 1;
  for (int i = 0; i < n; ++i) direct *= (A - B);
  if (sum != direct) throw std::logic_error("binomial identity violated");
  return prefactor * sum;
}

namespace {

std::vector<std::pair<double, double>> hermite_rule(int n) {
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
  for (int i = 1; i < n; ++i) {
    double b = std::sqrt(static_cast<double>(i));
    J(i, i - 1) = b;
    J(i - 1, i) = b;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
  std::vector<std::pair<double, double>> rule;
  for (int i = 0; i < n; ++i) {
    double v = es.eigenvectors()(0, i);
    rule.emplace_back(es.eigenvalues()[i], v * v);
  }
  return rule;
}

double double_factorial(int n) {  // (n-1)!! for even moments
  double f = 1.0;
  for (int k = n - 1; k > 1; k -= 2) f *= k;
  return f;
}

}  // namespace

double reexponentiation_identity(int dim, const SigmaPolynomial& f,
                                 double lambda, double T) {
  if (dim < 1 || dim > 3) throw std::length_error("dim must be 1..3");
  for (const auto& [expo, c] : f) {
    (void)c;
    if (static_cast<int>(expo.size()) != dim)
      throw std::invalid_argument("exponent arity mismatch");
    for (int e : expo)
      if (e < 0 || e > 8) throw std::length_error("degree capped at 8");
  }
  double b = 2.0 * std::sqrt(lambda) * T;

  // left side: oscillatory quadrature, factorized per axis
  auto rule = hermite_rule(64);
  std::vector<std::complex<double>> osc(9, 0.0);  // E[sigma^k e^{ib sigma}]
  for (int k = 0; k <= 8; ++k)
    for (auto [x, w] : rule)
      osc[k] += w * std::pow(x, k) * std::exp(kI * b * x);
  std::complex<double> lhs = 0.0;
  for (const auto& [expo, c] : f) {
    std::complex<double> prod = c;
    for (int e : expo) prod *= osc[e];
    lhs += prod;
  }

  // right side: shift sigma -> sigma + ib and use exact Gaussian moments
  std::complex<double> rhs = 0.0;
  for (const auto& [expo, c] : f) {
    std::complex<double> prod = c;
    for (int e : expo) {
      std::complex<double> s = 0.0;
      double binom = 1.0;
      for (int t = 0; t <= e; ++t) {
        if (t % 2 == 0)
          s += binom * double_factorial(t) * std::pow(kI * b, e - t);
        binom = binom * (e - t) / (t + 1);
      }
      prod *= s;
    }
    rhs += prod;
  }
  rhs *= std::exp(-0.5 * b * b * dim);
  return std::abs(lhs - rhs);
}

}  // namespace lve
