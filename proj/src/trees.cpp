#include "lve/trees.hpp"

#include <algorithm>
#include <queue>
#include <set>

#include <nlohmann/json.hpp>

namespace lve {

LabeledTree::LabeledTree(int n, std::vector<Edge> e)
    : n_vertices(n), edges(std::move(e)) {
  std::sort(edges.begin(), edges.end());
  validate_tree(*this);
}

std::vector<int> LabeledTree::degrees() const {
  std::vector<int> deg(n_vertices, 0);
  for (auto& [a, b] : edges) {
    ++deg[a];
    ++deg[b];
  }
  return deg;
}

std::vector<std::vector<int>> LabeledTree::adjacency() const {
  std::vector<std::vector<int>> adj(n_vertices);
  for (auto& [a, b] : edges) {
    adj[a].push_back(b);
    adj[b].push_back(a);
  }
  for (auto& nb : adj) std::sort(nb.begin(), nb.end());
  return adj;
}

std::vector<int> LabeledTree::path(int a, int b) const {
  auto adj = adjacency();
  std::vector<int> parent(n_vertices, -1);
  std::queue<int> q;
  q.push(a);
  parent[a] = a;
  while (!q.empty()) {
    int v = q.front();
    q.pop();
    if (v == b) break;
    for (int u : adj[v])
      if (parent[u] < 0) {
        parent[u] = v;
        q.push(u);
      }
  }
  std::vector<int> p;
  for (int v = b; v != a; v = parent[v]) p.push_back(v);
  p.push_back(a);
  std::reverse(p.begin(), p.end());
  return p;
}

void validate_tree(const LabeledTree& t) {
  if (t.n_vertices < 1) throw std::invalid_argument("empty tree");
  if (static_cast<int>(t.edges.size()) != t.n_vertices - 1)
    throw std::invalid_argument("tree must have n-1 edges");
  for (auto& [a, b] : t.edges)
    if (a < 0 || b >= t.n_vertices || a >= b)
      throw std::invalid_argument("bad edge");
  // connectivity
  auto adj = t.adjacency();
  std::vector<char> seen(t.n_vertices, 0);
  std::queue<int> q;
  q.push(0);
  seen[0] = 1;
  int count = 1;
  while (!q.empty()) {
    int v = q.front();
    q.pop();
    for (int u : adj[v])
      if (!seen[u]) {
        seen[u] = 1;
        ++count;
        q.push(u);
      }
  }
  if (count != t.n_vertices) throw std::invalid_argument("tree not connected");
}

double WeakeningAssignment::at(const Edge& e) const {
  auto it = w.find(e);
  if (it == w.end())
    throw std::invalid_argument("missing weakening parameter on edge");
  double v = it->second;
  if (v < 0.0 || v > 1.0)
    throw std::invalid_argument("weakening parameter outside [0,1]");
  return v;
}

LabeledTree tree_from_pruefer(const std::vector<int>& code, int n) {
  std::vector<int> deg(n, 1);
  for (int c : code) ++deg[c];
  std::set<int> leaves;
  for (int v = 0; v < n; ++v)
    if (deg[v] == 1) leaves.insert(v);
  std::vector<Edge> edges;
  for (int c : code) {
    int leaf = *leaves.begin();
    leaves.erase(leaves.begin());
    edges.push_back(make_edge(leaf, c));
    if (--deg[c] == 1) leaves.insert(c);
  }
  int u = *leaves.begin();
  int v = *std::next(leaves.begin());
  edges.push_back(make_edge(u, v));
  return LabeledTree(n, std::move(edges));
}

std::vector<int> pruefer_code(const LabeledTree& t) {
  int n = t.n_vertices;
  if (n <= 2) return {};
  auto adj = t.adjacency();
  std::vector<std::set<int>> nb(n);
  for (int v = 0; v < n; ++v) nb[v] = {adj[v].begin(), adj[v].end()};
  std::set<int> leaves;
  for (int v = 0; v < n; ++v)
    if (nb[v].size() == 1) leaves.insert(v);
  std::vector<int> code;
  for (int i = 0; i < n - 2; ++i) {
    int leaf = *leaves.begin();
    leaves.erase(leaves.begin());
    int parent = *nb[leaf].begin();
    code.push_back(parent);
    nb[parent].erase(leaf);
    if (nb[parent].size() == 1) leaves.insert(parent);
  }
  return code;
}

std::vector<LabeledTree> enumerate_labeled_trees(int n, int cap) {
  if (n < 1) throw std::invalid_argument("n must be positive");
  if (n > cap) throw std::length_error("tree enumeration cap exceeded");
  if (n == 1) return {LabeledTree(1, {})};
  if (n == 2) return {LabeledTree(2, {make_edge(0, 1)})};
  std::vector<LabeledTree> trees;
  std::vector<int> code(n - 2, 0);
  for (;;) {
    trees.push_back(tree_from_pruefer(code, n));
    int i = n - 3;
    while (i >= 0 && code[i] == n - 1) code[i--] = 0;
    if (i < 0) break;
    ++code[i];
  }
  return trees;
}

Eigen::MatrixXd path_infimum_matrix(const LabeledTree& t,
                                    const WeakeningAssignment& w) {
  int n = t.n_vertices;
  for (auto& e : t.edges) (void)w.at(e);
  Eigen::MatrixXd m = Eigen::MatrixXd::Ones(n, n);
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b) {
      auto p = t.path(a, b);
      double inf = 1.0;
      for (size_t i = 0; i + 1 < p.size(); ++i)
        inf = std::min(inf, w.at(make_edge(p[i], p[i + 1])));
      m(a, b) = m(b, a) = inf;
    }
  return m;
}

std::string tree_to_json(const LabeledTree& t) {
  nlohmann::json j;
  j["n"] = t.n_vertices;
  j["edges"] = nlohmann::json::array();
  for (auto& [a, b] : t.edges) j["edges"].push_back({a, b});
  return j.dump();
}

LabeledTree tree_from_json(const std::string& s) {
  auto j = nlohmann::json::parse(s);
  std::vector<Edge> edges;
  for (auto& e : j["edges"]) edges.push_back(make_edge(e[0], e[1]));
  return LabeledTree(j["n"].get<int>(), std::move(edges));
}

}  // namespace lve
