#ifndef LVE_CLEANING_HPP
#define LVE_CLEANING_HPP

#include <complex>
#include <map>
#include <string>
#include <vector>

#include "lve/covariance.hpp"
#include "lve/dual.hpp"

namespace lve {

// Operator tokens of the cycle word. With sigma the diagonal field and
// C_j / C_{<=j} the slice / cumulative covariances:
//   Resolvent{j}  (1 + 2i sqrt(lambda) sigma C_{<=j})^{-1}
//   PropC{j}      C_j
//   PropD{j}      2i sqrt(lambda) C_j
//   PropDCum{j}   2i sqrt(lambda) C_{<=j}
//   Sigma         diag(sigma), explicit field awaiting integration by parts
//   SiteProj{pin} diagonal projector on the site carried by the pin
//   Tadpole{j}    scalar 2i sqrt(lambda) T_j
//   CounterDot{j} scalar -2i sqrt(lambda) T_j
//   Identity      1
enum class TokenKind {
  Resolvent,
  PropC,
  PropD,
  PropDCum,
  Sigma,
  SiteProj,
  Tadpole,
  CounterDot,
  Identity,
};

struct Token {
  TokenKind kind;
  int scale = -1;  // slice index where applicable
  int pin = -1;    // site variable id for SiteProj

  bool operator==(const Token&) const = default;
};

struct Word {
  std::vector<Token> tokens;  // cyclic, traced
  int n_pins = 0;

  bool operator==(const Word&) const = default;
};

enum class TermClass { InnerTadpole, Crossing, Nesting, LowerScale, Remainder };

std::string term_class_name(TermClass c);

struct TermRecord {
  Word word;
  int scale = 0;  // working scale of the expansion
  TermClass classification = TermClass::Remainder;
  int sign = 1;
  double bound_factor = 1.0;        // accumulated M^{-2j} per j-line
  std::map<int, int> j_lines;       // N_j counters along this branch
  std::map<int, int> tadpoles;      // inner tadpoles generated per scale
  int stop_scale = -2;              // set when the branch becomes remainder
  bool truncated = false;
  int paired_with = -1;             // counterterm twin index, from pair_tadpoles
};

struct TermLedger {
  std::vector<TermRecord> records;
  std::map<int, int> counters;  // max per-scale j-line count over branches
  int stop_scale = -1;          // max over remainder branches
  bool truncated = false;
};

// The active (leftmost) Resolvent{j} becomes R^{j-1} in one term
// and -R^{j-1} sigma D^j R^j in the other; at j=0 the lowered resolvent is
// the identity. Words without a scale-j resolvent come back unchanged.
std::vector<TermRecord> cleaning_step(const TermRecord& t, int j);

// Contracts the unique explicit Sigma onto every resolvent of the word:
// one output per target, tagged inner-tadpole (adjacent target), crossing
// (contraction across an existing sigma chord), nesting, or lower-scale.
std::vector<TermRecord> integrate_by_parts(const TermRecord& t);

// Splits an adjacent (inner-tadpole tagged) record with R = 1 - sigma D R:
// the delta part exposes an explicit Tadpole{j} scalar, the other part
// carries a fresh Sigma and continues the expansion.
std::vector<TermRecord> split_adjacent(const TermRecord& t);

// Scale-major breadth-first rewriting with stopping rule N_j = ceil(a*j).
// Every leaf of the rewriting tree is kept in the ledger, so the value-sum
// over records always reproduces the starting amplitude.
TermLedger run_cleaning(const DualCycleWord& start, double a, int j_max,
                        int cap = 100000, bool count_nesting = true);

// Adds, for every inner-tadpole record of scale above the stopping scale,
// a twin record with the tadpole replaced by a counterterm dot; the pair
// values cancel exactly (same word up to the scalar 2i sqrt(lambda) T_j
// versus its negative). Unmatched low-scale tadpoles are left flagged.
TermLedger pair_tadpoles(const TermLedger& ledger);

// Net symbolic tadpole coefficient at scale j after pairing: counts of
// Tadpole{j} minus CounterDot{j} tokens over records above the stop scale.
int net_tadpole_count(const TermLedger& ledger, int j);

struct BoundReport {
  double value = 1.0;
  bool within_nelson = true;  // value <= e^{-j0^2}
};

// Product over remainder branches of (M^{-2j})^{N_j} N_j! factors.
BoundReport bound_product(const TermLedger& ledger, double lambda, double M);

// Starting word of the dual cycle at scale j_max; half-line pairs become
// C_{j_max} propagators pinned by the ultralocal sigma tree lines.
Word initial_word(const DualCycleWord& cycle, int j_max);

// E_sigma[ Tr of the cyclic token product ] on the lattice model, sites
// assigned to pins summed over, sigma integrated by tensor Gauss-Hermite.
std::complex<double> word_value(const Word& w, const LatticeModel& model,
                                double lambda, int gh_degree = 32);

std::complex<double> ledger_value(const TermLedger& ledger,
                                  const LatticeModel& model, double lambda,
                                  int gh_degree = 32);

std::string record_to_json(const TermRecord& r);

}  // namespace lve

#endif
