#include "lve/planar.hpp"

#include <algorithm>
#include <functional>
#include <stdexcept>

namespace lve {

namespace {

BigInt factorial(int n) {
  BigInt f = 1;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

}  // namespace

std::string DecorationPattern::to_string() const {
  std::string s;
  s += static_cast<char>('a' + marked_line);
  s += ':';
  for (char c : objects) s += c;
  if (!attach_order.empty()) {
    s += '/';
    for (size_t i = 0; i < attach_order.size(); ++i) {
      if (i) s += ',';
      s += std::to_string(attach_order[i]);
    }
  }
  return s;
}

BigInt count_planar_decorations(int n, int k) {
  if (n < 1) throw std::domain_error("order must be positive");
  if (k < 0 || k > n) throw std::domain_error("counterterm count out of range");
  return BigInt(2 * n - k) * factorial(n - 1) / factorial(n - k);
}

std::vector<DecorationPattern> enumerate_planar_decorations(int n, int k) {
  if (n > 6) throw std::length_error("planar enumeration capped at n = 6");
  if (k < 0 || k > n) throw std::domain_error("counterterm count out of range");
  std::vector<DecorationPattern> out;
  if (k == 0) {
    // No counterterm to hang on the marked line: the all-tadpole cycle is
    // the single arrangement the brute force produces.
    DecorationPattern p;
    p.objects.assign(n, 'T');
    out.push_back(p);
    return out;
  }
  int lines = 2 * n - k;
  // First counterterm attaches to one of the 2n-k lines; the cycle then
  // carries n objects of which slot 0 holds that counterterm. The k-1
  // remaining counterterms are placed, in order, on distinct slots among
  // the n-1 others.
  std::vector<int> slots(n - 1);
  for (int i = 0; i < n - 1; ++i) slots[i] = i + 1;
  std::vector<int> pick(k - 1);
  std::vector<char> used(n, 0);
  auto emit = [&](int marked) {
    DecorationPattern p;
    p.marked_line = marked;
    p.objects.assign(n, 'T');
    p.objects[0] = 'X';
    for (int s : pick) p.objects[s] = 'X';
    p.attach_order = pick;
    out.push_back(p);
  };
  std::function<void(int, int)> rec = [&](int depth, int marked) {
    if (depth == k - 1) {
      emit(marked);
      return;
    }
    for (int s : slots)
      if (!used[s]) {
        used[s] = 1;
        pick[depth] = s;
        rec(depth + 1, marked);
        used[s] = 0;
      }
  };
  for (int marked = 0; marked < lines; ++marked) rec(0, marked);
  return out;
}

std::vector<PlanarCountEntry> planar_count_report(int n_max) {
  std::vector<PlanarCountEntry> report;
  for (int n = 1; n <= n_max; ++n)
    for (int k = 0; k <= n; ++k) {
      PlanarCountEntry e;
      e.n = n;
      e.k = k;
      e.closed_form = count_planar_decorations(n, k);
      e.enumerated = BigInt(enumerate_planar_decorations(n, k).size());
      e.match = (e.closed_form == e.enumerated);
      report.push_back(e);
    }
  return report;
}

}  // namespace lve
