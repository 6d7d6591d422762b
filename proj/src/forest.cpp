#include "lve/forest.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>

#include <Eigen/Eigenvalues>

namespace lve {

namespace {

// union-find
struct DSU {
  std::vector<int> p;
  explicit DSU(int n) : p(n) { std::iota(p.begin(), p.end(), 0); }
  int find(int x) { return p[x] == x ? x : p[x] = find(p[x]); }
  bool unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    p[a] = b;
    return true;
  }
};

std::vector<Edge> all_pairs(int n) {
  std::vector<Edge> pairs;
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b) pairs.push_back({a, b});
  return pairs;
}

// Gauss-Legendre nodes/weights on [0,1] by Golub-Welsch.
struct GLRule {
  std::vector<double> x, w;
};

const GLRule& gl_rule(int order) {
  static std::map<int, GLRule> cache;
  auto it = cache.find(order);
  if (it != cache.end()) return it->second;
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(order, order);
  for (int i = 1; i < order; ++i) {
    double b = i / std::sqrt(4.0 * i * i - 1.0);
    J(i, i - 1) = J(i - 1, i) = b;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
  GLRule r;
  for (int i = 0; i < order; ++i) {
    r.x.push_back(0.5 * (es.eigenvalues()[i] + 1.0));
    double v = es.eigenvectors()(0, i);
    r.w.push_back(v * v);  // weights sum to 1 on [0,1]
  }
  return cache.emplace(order, std::move(r)).first->second;
}

// Trees of a forest as LabeledTree plus the vertex relabeling used.
struct ForestComponent {
  std::vector<int> vertices;           // global labels, sorted
  std::vector<int> edge_indices;       // positions into the forest edge list
  LabeledTree tree;                    // on local labels
};

std::vector<ForestComponent> forest_components(int n,
                                               const std::vector<Edge>& F) {
  DSU dsu(n);
  for (auto& [a, b] : F) dsu.unite(a, b);
  std::map<int, ForestComponent> by_root;
  for (int v = 0; v < n; ++v) by_root[dsu.find(v)].vertices.push_back(v);
  for (size_t i = 0; i < F.size(); ++i)
    by_root[dsu.find(F[i].first)].edge_indices.push_back(static_cast<int>(i));
  std::vector<ForestComponent> comps;
  for (auto& [root, c] : by_root) {
    std::map<int, int> local;
    for (size_t i = 0; i < c.vertices.size(); ++i) local[c.vertices[i]] = i;
    std::vector<Edge> edges;
    for (int ei : c.edge_indices)
      edges.push_back(make_edge(local[F[ei].first], local[F[ei].second]));
    c.tree = LabeledTree(static_cast<int>(c.vertices.size()), std::move(edges));
    comps.push_back(std::move(c));
  }
  return comps;
}

// Coupling matrix at the given w, path infima within components, 0 across.
Eigen::MatrixXd forest_couplings(int n, const std::vector<Edge>& F,
                                 const std::vector<double>& w) {
  Eigen::MatrixXd x = Eigen::MatrixXd::Zero(n, n);
  x.diagonal().setOnes();
  for (auto& comp : forest_components(n, F)) {
    WeakeningAssignment wa;
    std::map<int, int> local;
    for (size_t i = 0; i < comp.vertices.size(); ++i)
      local[comp.vertices[i]] = i;
    for (int ei : comp.edge_indices)
      wa.w[make_edge(local[F[ei].first], local[F[ei].second])] = w[ei];
    Eigen::MatrixXd m = path_infimum_matrix(comp.tree, wa);
    for (size_t a = 0; a < comp.vertices.size(); ++a)
      for (size_t b = 0; b < comp.vertices.size(); ++b)
        x(comp.vertices[a], comp.vertices[b]) = m(a, b);
  }
  return x;
}

// For each pair (a,b) connected in F, the bitmask of forest-edge indices
// along the path; otherwise no entry.
std::map<Edge, std::uint32_t> path_edge_masks(int n,
                                              const std::vector<Edge>& F) {
  std::map<Edge, std::uint32_t> masks;
  std::map<Edge, int> edge_pos;
  for (size_t i = 0; i < F.size(); ++i) edge_pos[F[i]] = static_cast<int>(i);
  for (auto& comp : forest_components(n, F)) {
    std::map<int, int> local;
    for (size_t i = 0; i < comp.vertices.size(); ++i)
      local[comp.vertices[i]] = i;
    for (size_t a = 0; a < comp.vertices.size(); ++a)
      for (size_t b = a + 1; b < comp.vertices.size(); ++b) {
        auto p = comp.tree.path(static_cast<int>(a), static_cast<int>(b));
        std::uint32_t m = 0;
        for (size_t i = 0; i + 1 < p.size(); ++i) {
          Edge ge = make_edge(comp.vertices[p[i]], comp.vertices[p[i + 1]]);
          m |= 1u << edge_pos.at(ge);
        }
        masks[make_edge(comp.vertices[a], comp.vertices[b])] = m;
      }
  }
  return masks;
}

double term_value_polynomial(const MultilinearPairPolynomial& f,
                             const std::vector<Edge>& F) {
  auto masks = path_edge_masks(f.n(), F);
  int k = static_cast<int>(F.size());
  std::vector<Edge> Fsorted = F;
  std::sort(Fsorted.begin(), Fsorted.end());
  double total = 0.0;
  for (auto& [pairs, coeff] : f.terms()) {
    // derivative wrt forest edges: term survives iff F is a subset
    if (!std::includes(pairs.begin(), pairs.end(), Fsorted.begin(),
                       Fsorted.end()))
      continue;
    std::vector<std::uint32_t> subset_masks;
    bool zero = false;
    for (auto& p : pairs) {
      if (std::binary_search(Fsorted.begin(), Fsorted.end(), p)) continue;
      auto it = masks.find(p);
      if (it == masks.end()) {  // cross-component coupling is 0
        zero = true;
        break;
      }
      subset_masks.push_back(it->second);
    }
    if (zero) continue;
    Rational r = integrate_min_product(k, subset_masks);
    total += coeff * static_cast<double>(r);
  }
  return total;
}

double term_value_generic(const PairFunction& f, const std::vector<Edge>& F,
                          int order) {
  int k = static_cast<int>(F.size());
  if (k == 0) {
    return f.eval(forest_couplings(f.n(), F, {}));
  }
  auto integrand = [&](const std::vector<double>& w) {
    return f.mixed_partial(F, forest_couplings(f.n(), F, w));
  };
  return w_quadrature_minaware(k, integrand, order);
}

}  // namespace

double PairFunction::mixed_partial(const std::vector<Edge>& d,
                                   const Eigen::MatrixXd& x) const {
  if (d.empty()) return eval(x);
  auto step = [&](double h) {
    std::vector<Edge> rest(d.begin() + 1, d.end());
    Eigen::MatrixXd xp = x, xm = x;
    auto [a, b] = d.front();
    xp(a, b) += h;
    xp(b, a) += h;
    xm(a, b) -= h;
    xm(b, a) -= h;
    return (mixed_partial(rest, xp) - mixed_partial(rest, xm)) / (2.0 * h);
  };
  const double h = 1e-4;
  double d1 = step(h), d2 = step(h / 2.0);
  return (4.0 * d2 - d1) / 3.0;  // one Richardson step
}

void MultilinearPairPolynomial::add_term(std::vector<Edge> pairs,
                                         double coeff) {
  std::sort(pairs.begin(), pairs.end());
  if (std::adjacent_find(pairs.begin(), pairs.end()) != pairs.end())
    throw std::invalid_argument("repeated pair in multilinear term");
  for (auto& [a, b] : pairs)
    if (a < 0 || b >= n()) throw std::invalid_argument("pair out of range");
  terms_[pairs] += coeff;
}

double MultilinearPairPolynomial::eval(const Eigen::MatrixXd& x) const {
  double total = 0.0;
  for (auto& [pairs, coeff] : terms_) {
    double prod = coeff;
    for (auto& [a, b] : pairs) prod *= x(a, b);
    total += prod;
  }
  return total;
}

double MultilinearPairPolynomial::mixed_partial(const std::vector<Edge>& d,
                                                const Eigen::MatrixXd& x) const {
  std::vector<Edge> ds = d;
  std::sort(ds.begin(), ds.end());
  double total = 0.0;
  for (auto& [pairs, coeff] : terms_) {
    if (!std::includes(pairs.begin(), pairs.end(), ds.begin(), ds.end()))
      continue;
    double prod = coeff;
    for (auto& p : pairs)
      if (!std::binary_search(ds.begin(), ds.end(), p)) prod *= x(p.first, p.second);
    total += prod;
  }
  return total;
}

MultilinearPairPolynomial MultilinearPairPolynomial::random(int n,
                                                            std::uint64_t seed,
                                                            int max_terms) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> coeff(-2.0, 2.0);
  auto pairs = all_pairs(n);
  std::uniform_int_distribution<int> nterms(1, max_terms);
  MultilinearPairPolynomial f(n);
  int t = nterms(rng);
  for (int i = 0; i < t; ++i) {
    std::vector<Edge> sel;
    for (auto& p : pairs)
      if (rng() & 1) sel.push_back(p);
    f.add_term(std::move(sel), coeff(rng));
  }
  return f;
}

std::vector<std::vector<Edge>> enumerate_forests(int n) {
  if (n > 6) throw std::length_error("forest enumeration capped at n = 6");
  auto pairs = all_pairs(n);
  int m = static_cast<int>(pairs.size());
  std::vector<std::vector<Edge>> forests;
  for (std::uint32_t mask = 0; mask < (1u << m); ++mask) {
    DSU dsu(n);
    std::vector<Edge> F;
    bool acyclic = true;
    for (int i = 0; i < m && acyclic; ++i)
      if (mask & (1u << i)) {
        if (!dsu.unite(pairs[i].first, pairs[i].second)) acyclic = false;
        else F.push_back(pairs[i]);
      }
    if (acyclic) forests.push_back(std::move(F));
  }
  return forests;
}

std::vector<ForestTerm> bkar_decompose(const PairFunction& f) {
  auto* poly = dynamic_cast<const MultilinearPairPolynomial*>(&f);
  std::vector<ForestTerm> out;
  for (auto& F : enumerate_forests(f.n())) {
    ForestTerm t;
    t.forest = F;
    t.value = poly ? term_value_polynomial(*poly, F)
                   : term_value_generic(f, F, 12);
    out.push_back(std::move(t));
  }
  return out;
}

double forest_sum(const PairFunction& f) {
  double s = 0.0;
  for (auto& t : bkar_decompose(f)) s += t.value;
  return s;
}

std::vector<ForestTerm> bkar_tree_terms(const PairFunction& f) {
  std::vector<ForestTerm> trees;
  for (auto& t : bkar_decompose(f))
    if (static_cast<int>(t.forest.size()) == f.n() - 1)
      trees.push_back(t);
  return trees;
}

ProductToyFamily::ProductToyFamily(int n_max, double eps) : eps_(eps) {
  if (n_max > 5) throw std::length_error("toy family capped at n = 5");
  for (int n = 1; n <= n_max; ++n) {
    MultilinearPairPolynomial f(n);
    auto pairs = all_pairs(n);
    int m = static_cast<int>(pairs.size());
    for (std::uint32_t mask = 0; mask < (1u << m); ++mask) {
      std::vector<Edge> sel;
      for (int i = 0; i < m; ++i)
        if (mask & (1u << i)) sel.push_back(pairs[i]);
      f.add_term(std::move(sel), std::pow(eps, __builtin_popcount(mask)));
    }
    members_.push_back(std::move(f));
  }
}

const PairFunction& ProductToyFamily::member(int n) const {
  if (n < 1 || n > static_cast<int>(members_.size()))
    throw std::out_of_range("family member out of range");
  return members_[n - 1];
}

void check_multiplicative(const PairFunctionFamily& fam, int n) {
  if (n < 2) return;
  // split {0..n-1} into {0..s-1} and {s..n-1} and compare against the
  // product of the block members at matched couplings
  std::mt19937_64 rng(12345);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int s = 1; s < n; ++s) {
    Eigen::MatrixXd x = Eigen::MatrixXd::Zero(n, n);
    x.diagonal().setOnes();
    for (int a = 0; a < n; ++a)
      for (int b = a + 1; b < n; ++b)
        if ((a < s) == (b < s)) x(a, b) = x(b, a) = u(rng);
    Eigen::MatrixXd xa = x.topLeftCorner(s, s);
    Eigen::MatrixXd xb = x.bottomRightCorner(n - s, n - s);
    double lhs = fam.member(n).eval(x);
    double rhs = fam.member(s).eval(xa) * fam.member(n - s).eval(xb);
    if (std::abs(lhs - rhs) > 1e-9 * (1.0 + std::abs(lhs)))
      throw std::domain_error("family does not factorize over blocks");
  }
}

std::vector<double> tree_connected_part(const PairFunctionFamily& fam,
                                        int n_max) {
  std::vector<double> c;
  for (int n = 1; n <= n_max; ++n) {
    check_multiplicative(fam, n);
    double cn = 0.0;
    for (auto& t : bkar_tree_terms(fam.member(n))) cn += t.value;
    c.push_back(cn);
  }
  return c;
}

double w_quadrature(int dim,
                    const std::function<double(const std::vector<double>&)>& f,
                    int order) {
  if (dim < 0 || dim > 5) throw std::length_error("quadrature dim capped at 5");
  if (dim == 0) return f({});
  const auto& r = gl_rule(order);
  std::vector<double> pt(dim);
  std::function<double(int)> rec = [&](int d) {
    double s = 0.0;
    for (int i = 0; i < order; ++i) {
      pt[d] = r.x[i];
      s += r.w[i] * (d + 1 == dim ? f(pt) : rec(d + 1));
    }
    return s;
  };
  return rec(0);
}

double w_quadrature_minaware(
    int dim, const std::function<double(const std::vector<double>&)>& f,
    int order) {
  if (dim < 0 || dim > 5) throw std::length_error("quadrature dim capped at 5");
  if (dim == 0) return f({});
  std::vector<int> perm(dim);
  std::iota(perm.begin(), perm.end(), 0);
  double total = 0.0;
  const auto& r = gl_rule(order);
  do {
    // simplex 0 <= s_{perm[0]} <= ... <= s_{perm[dim-1]} <= 1 via the
    // substitution s_i = prod of u_j for j >= i
    std::vector<double> u(dim), s(dim);
    std::function<double(int)> rec = [&](int d) {
      double acc = 0.0;
      for (int i = 0; i < order; ++i) {
        u[d] = r.x[i];
        double val;
        if (d + 1 == dim) {
          double prod = 1.0, jac = 1.0;
          for (int j = dim - 1; j >= 0; --j) {
            prod *= u[j];
            s[perm[j]] = prod;
          }
          for (int j = 1; j < dim; ++j) jac *= std::pow(u[j], j);
          val = jac * f(s);
        } else {
          val = rec(d + 1);
        }
        acc += r.w[i] * val;
      }
      return acc;
    };
    total += rec(0);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return total;
}

Rational integrate_min_product(int k,
                               const std::vector<std::uint32_t>& subset_masks) {
  for (auto m : subset_masks)
    if (m == 0) throw std::invalid_argument("empty min subset");
  if (k == 0) return subset_masks.empty() ? Rational(1) : Rational(0);
  std::vector<int> perm(k);
  std::iota(perm.begin(), perm.end(), 0);
  Rational total = 0;
  do {
    // exponent of w_{perm[i]} on this simplex: number of min-subsets whose
    // earliest element in perm order sits at position i
    std::vector<int> a(k, 0);
    for (auto m : subset_masks)
      for (int i = 0; i < k; ++i)
        if (m & (1u << perm[i])) {
          ++a[i];
          break;
        }
    Rational piece = 1;
    long long prefix = 0;
    for (int i = 0; i < k; ++i) {
      prefix += a[i];
      piece /= Rational(prefix + i + 1);
    }
    total += piece;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return total;
}

}  // namespace lve
