#include "lve/dual.hpp"

#include <algorithm>
#include <functional>
#include <stack>
#include <stdexcept>

namespace lve {

void validate_decorated(const DecoratedTree& t) {
  validate_tree(t.tree);
  auto deg = t.tree.degrees();
  int loops = 0;
  for (int v = 0; v < t.tree.n_vertices; ++v) {
    if (t.is_counterterm(v)) {
      if (t.tree.n_vertices > 1 && deg[v] != 1)
        throw std::invalid_argument("counterterm mark on non-leaf vertex");
    } else {
      ++loops;
    }
  }
  if (loops == 0)
    throw std::invalid_argument("decorated tree needs a loop vertex");
}

int DualCycleWord::count(CycleObject o) const {
  return static_cast<int>(std::count(objects.begin(), objects.end(), o));
}

int DualCycleWord::n_vertices() const {
  return 1 + count(CycleObject::CounterDot) + count(CycleObject::HalfLine) / 2;
}

void validate_cycle_word(const DualCycleWord& w) {
  int H = w.count(CycleObject::HalfLine);
  if (static_cast<int>(w.pairing.size()) != H)
    throw std::invalid_argument("pairing does not cover all half lines");
  for (auto& [a, b] : w.pairing) {
    if (a == b || w.pairing.at(b) != a)
      throw std::invalid_argument("pairing not an involution");
    if (w.objects.at(a) != CycleObject::HalfLine)
      throw std::invalid_argument("pairing off a half line");
  }
  // Non-crossing on the cycle: reading from position 0, partners must
  // nest like balanced parentheses.
  std::stack<int> open;
  for (int i = 0; i < static_cast<int>(w.objects.size()); ++i) {
    if (w.objects[i] != CycleObject::HalfLine) continue;
    int j = w.pairing.at(i);
    if (j > i) {
      open.push(i);
    } else {
      if (open.empty() || open.top() != j)
        throw std::invalid_argument("crossing pairing");
      open.pop();
    }
  }
  if (!open.empty()) throw std::invalid_argument("unbalanced pairing");

  int n = w.n_vertices();
  if (n >= 2) {
    int S = w.count(CycleObject::LeafResolvent);
    int B = w.count(CycleObject::CounterDot);
    int L = w.count(CycleObject::Resolvent);
    if (S + B + L != 2 * (n - 1))
      throw std::invalid_argument("object count identity violated");
  }
}

DualCycleWord dualize(const DecoratedTree& t) {
  validate_decorated(t);
  const auto& tree = t.tree;
  int n = tree.n_vertices;
  DualCycleWord w;
  if (n == 1) {
    w.objects = {CycleObject::Resolvent};
    return w;
  }
  int root = -1;
  for (int v = 0; v < n && root < 0; ++v)
    if (!t.is_counterterm(v)) root = v;
  auto adj = tree.adjacency();
  auto deg = tree.degrees();

  auto classify = [&](int v) {
    if (deg[v] == 1 && !t.is_counterterm(v) &&
        !t.is_counterterm(adj[v].front()))
      return CycleObject::LeafResolvent;
    return CycleObject::Resolvent;
  };

  std::stack<int> open;  // positions of open half lines
  std::function<void(int, int)> tour = [&](int v, int parent) {
    for (int c : adj[v]) {
      if (c == parent) continue;
      if (t.is_counterterm(c)) {
        w.objects.push_back(CycleObject::CounterDot);
        w.objects.push_back(classify(v));
      } else {
        int down = static_cast<int>(w.objects.size());
        w.objects.push_back(CycleObject::HalfLine);
        open.push(down);
        w.objects.push_back(classify(c));
        tour(c, v);
        int up = static_cast<int>(w.objects.size());
        w.objects.push_back(CycleObject::HalfLine);
        w.pairing[open.top()] = up;
        w.pairing[up] = open.top();
        open.pop();
        w.objects.push_back(classify(v));
      }
    }
  };
  tour(root, -1);
  // The segment emitted after the final event closes the cycle at the root,
  // so the word already ends on a root resolvent.
  validate_cycle_word(w);
  return w;
}

DecoratedTree primalize(const DualCycleWord& w) {
  validate_cycle_word(w);
  DecoratedTree out;
  if (w.objects.size() == 1 && w.objects[0] == CycleObject::Resolvent) {
    out.tree = LabeledTree(1, {});
    return out;
  }
  int next_id = 1;
  int current = 0;  // root gets id 0
  std::vector<Edge> edges;
  std::map<int, bool> ct;
  std::stack<int> stack;
  for (int i = 0; i < static_cast<int>(w.objects.size()); ++i) {
    switch (w.objects[i]) {
      case CycleObject::CounterDot: {
        int c = next_id++;
        edges.push_back(make_edge(current, c));
        ct[c] = true;
        break;
      }
      case CycleObject::HalfLine: {
        if (w.pairing.at(i) > i) {
          int c = next_id++;
          edges.push_back(make_edge(current, c));
          stack.push(current);
          current = c;
        } else {
          current = stack.top();
          stack.pop();
        }
        break;
      }
      default:
        break;
    }
  }
  out.tree = LabeledTree(next_id, std::move(edges));
  out.counterterm = std::move(ct);
  validate_decorated(out);
  return out;
}

}  // namespace lve
