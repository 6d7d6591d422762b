#ifndef LVE_DUAL_HPP
#define LVE_DUAL_HPP

#include <map>
#include <vector>

#include "lve/trees.hpp"

namespace lve {

// Tree plus a loop-vertex / counterterm flag on each leaf.
struct DecoratedTree {
  LabeledTree tree;
  std::map<int, bool> counterterm;  // leaf -> true if counterterm

  bool is_counterterm(int v) const {
    auto it = counterterm.find(v);
    return it != counterterm.end() && it->second;
  }
};

// Counterterm marks must sit on coordination-1 vertices and at least one
// loop vertex must remain.
void validate_decorated(const DecoratedTree& t);

enum class CycleObject { CounterDot, HalfLine, LeafResolvent, Resolvent };

// The cycle obtained by turning around the tree: a cyclic word of objects
// plus a non-crossing perfect matching on the half-line positions.
struct DualCycleWord {
  std::vector<CycleObject> objects;
  std::map<int, int> pairing;  // position -> partner position, symmetric

  int count(CycleObject o) const;
  int n_vertices() const;  // 1 + |dots| + |half lines|/2
  bool operator==(const DualCycleWord&) const = default;
};

// Throws unless the pairing is a non-crossing matching of exactly the
// half-line positions and the counting identities hold.
void validate_cycle_word(const DualCycleWord& w);

DualCycleWord dualize(const DecoratedTree& t);

// Inverse of dualize up to relabeling: vertices come back numbered in the
// order the cycle first visits them.
DecoratedTree primalize(const DualCycleWord& w);

}  // namespace lve

#endif
