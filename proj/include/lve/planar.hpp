#ifndef LVE_PLANAR_HPP
#define LVE_PLANAR_HPP

#include <string>
#include <vector>

#include "lve/trees.hpp"

namespace lve {

// A cyclic arrangement of n objects (tadpole 'T' or counterterm 'X') on a
// single loop vertex, with a marked line position breaking the cyclic
// symmetry and an ordered attachment of the remaining counterterms.
struct DecorationPattern {
  int marked_line = 0;           // among the 2n-k lines, 0-based
  std::vector<char> objects;     // n entries, 'T' or 'X'
  std::vector<int> attach_order; // slots of counterterms 2..k, in order

  // leading marker character then the T/X word, e.g. "c:XTX"
  std::string to_string() const;
};

// f^k_n = (2n-k)(n-1)!/(n-k)! in exact integer arithmetic.
BigInt count_planar_decorations(int n, int k);

// Exhaustive list under the marked-first-position convention; size must
// match count_planar_decorations for k >= 1. For k = 0 the brute-force
// enumeration yields a single all-tadpole pattern per n while the closed
// form gives 2; see planar_count_report.
std::vector<DecorationPattern> enumerate_planar_decorations(int n, int k);

struct PlanarCountEntry {
  int n = 0, k = 0;
  BigInt closed_form;
  BigInt enumerated;
  bool match = false;
};

// Compares enumeration against the closed form for all k <= n. Mismatches
// are reported with both values, never silently dropped.
std::vector<PlanarCountEntry> planar_count_report(int n_max);

}  // namespace lve

#endif
