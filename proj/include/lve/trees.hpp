#ifndef LVE_TREES_HPP
#define LVE_TREES_HPP

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>
#include <boost/multiprecision/cpp_int.hpp>

namespace lve {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

// Unordered vertex pair with a < b, vertices numbered 0..n-1.
using Edge = std::pair<int, int>;

inline Edge make_edge(int a, int b) {
  if (a == b) throw std::invalid_argument("self-loop edge");
  return a < b ? Edge{a, b} : Edge{b, a};
}

// A labeled tree on n vertices: n-1 edges, connected, acyclic.
struct LabeledTree {
  int n_vertices = 0;
  std::vector<Edge> edges;  // sorted lexicographically

  LabeledTree() = default;
  LabeledTree(int n, std::vector<Edge> e);

  std::vector<int> degrees() const;
  std::vector<std::vector<int>> adjacency() const;
  // Vertices on the unique path from a to b, inclusive.
  std::vector<int> path(int a, int b) const;
  bool is_leaf(int v) const { return degrees()[v] == 1; }

  bool operator==(const LabeledTree&) const = default;
};

// Checks connectivity and edge count; throws on failure.
void validate_tree(const LabeledTree& t);

// w_l on every tree edge, each in [0,1].
struct WeakeningAssignment {
  std::map<Edge, double> w;

  double at(const Edge& e) const;
};

// All labeled trees on n vertices via the Pruefer bijection, in
// lexicographic Pruefer-code order. Count is n^{n-2} for n >= 2.
std::vector<LabeledTree> enumerate_labeled_trees(int n, int cap = 9);

LabeledTree tree_from_pruefer(const std::vector<int>& code, int n);
std::vector<int> pruefer_code(const LabeledTree& t);

// Matrix with entry (v,v') = 1 on the diagonal and the infimum of w over
// the unique tree path otherwise. Positive semidefinite.
Eigen::MatrixXd path_infimum_matrix(const LabeledTree& t,
                                    const WeakeningAssignment& w);

// JSON round-trip: {"n": n, "edges": [[a,b],...]}
std::string tree_to_json(const LabeledTree& t);
LabeledTree tree_from_json(const std::string& s);

}  // namespace lve

#endif
