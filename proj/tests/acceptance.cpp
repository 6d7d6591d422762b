// Acceptance gate: one pass/fail line per criterion, nonzero exit on any
// failure. argv[1] is the CLI binary used by the reproducibility check.

#include <cmath>
#include <complex>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <numbers>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Eigenvalues>

#include "lve/bounds.hpp"
#include "lve/cleaning.hpp"
#include "lve/covariance.hpp"
#include "lve/dual.hpp"
#include "lve/forest.hpp"
#include "lve/lve_engine.hpp"
#include "lve/planar.hpp"
#include "lve/trees.hpp"
#include "lve/wick.hpp"

using namespace lve;

namespace {

int g_failures = 0;

void report(int id, const char* what, bool ok) {
  std::printf("%s criterion %2d: %s\n", ok ? "PASS" : "FAIL", id, what);
  if (!ok) ++g_failures;
}

bool tree_census() {
  for (int n = 2; n <= 8; ++n) {
    std::uint64_t expect = 1;
    for (int i = 0; i < n - 2; ++i) expect *= n;
    if (enumerate_labeled_trees(n).size() != expect) return false;
  }
  return true;
}

bool bkar_identity() {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    int n = 2 + static_cast<int>(rng() % 4);  // up to 5
    auto f = MultilinearPairPolynomial::random(n, rng());
    double direct = f.eval(Eigen::MatrixXd::Ones(n, n));
    double fsum = forest_sum(f);
    if (std::abs(fsum - direct) > 1e-9 * std::max(1.0, std::abs(direct)))
      return false;
  }
  return true;
}

bool path_infimum_psd() {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (int trial = 0; trial < 1000; ++trial) {
    int n = 2 + static_cast<int>(rng() % 7);
    std::vector<int> code(n >= 3 ? n - 2 : 0);
    for (int& c : code) c = static_cast<int>(rng() % n);
    LabeledTree t = tree_from_pruefer(code, n);
    WeakeningAssignment w;
    for (const Edge& e : t.edges) w.w[e] = unif(rng);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(
        path_infimum_matrix(t, w));
    if (es.eigenvalues().minCoeff() < -1e-10) return false;
  }
  return true;
}

bool planar_count_consistency() {
  auto rep = planar_count_report(6);
  bool saw_k0 = false;
  for (const auto& e : rep) {
    if (e.k == 0) {
      // closed form vs brute force differ here by design; the report
      // carrying both values is the pass condition
      saw_k0 = true;
      if (e.closed_form == 0 && e.enumerated == 0) return false;
    } else if (!e.match) {
      return false;
    }
  }
  return saw_k0;
}

bool planar_cancellation() {
  for (int n = 1; n <= 30; ++n)
    if (renormalized_planar_sum(n, Rational(3, 7), Rational(3, 7), 1) != 0)
      return false;
  // primary divergent ledgers of order <= 4: every high-scale tadpole
  // acquires a counterterm twin, net symbolic weight zero
  for (int order = 1; order <= 4; ++order) {
    TermLedger led;
    led.stop_scale = -1;
    for (int i = 0; i < order; ++i) {
      TermRecord r;
      r.classification = TermClass::InnerTadpole;
      r.scale = 3;
      r.word.tokens.push_back({TokenKind::Tadpole, 3, -1});
      for (int q = 0; q <= i; ++q)
        r.word.tokens.push_back({TokenKind::Resolvent, 2, -1});
      led.records.push_back(std::move(r));
    }
    if (net_tadpole_count(pair_tadpoles(led), 3) != 0) return false;
  }
  return true;
}

bool order_lambda_cancellation() {
  for (int sites : {1, 2, 3}) {
    LatticeModel m = lattice_covariance(sites, 1, 1.0, 1.0);
    double vol = m.a * m.a * m.sites();
    double ref = 2.0 * vol * m.T * m.T;

    DecoratedTree one;
    one.tree = LabeledTree(1, {});
    double z1 = tree_amplitude_series(one, m, 1).coefficients[1].real();
    if (std::abs(z1 - ref) > 1e-10 * ref) return false;

    DecoratedTree ctct;
    ctct.tree = LabeledTree(2, {{0, 1}});
    ctct.counterterm[0] = true;
    ctct.counterterm[1] = true;
    double z2 =
        0.5 * tree_amplitude_series(ctct, m, 1).coefficients[1].real();
    if (std::abs(z2 + ref) > 1e-10 * ref) return false;

    if (std::abs(lve_logZ_series(m, 2, 1).coefficients[1]) > 1e-12)
      return false;
  }
  return true;
}

bool lve_oracle_equivalence() {
  for (int sites : {1, 2, 3}) {
    LatticeModel m = lattice_covariance(sites, 1, 1.0, 1.0);
    auto oracle = logZ_series(m, 3);
    auto good = lve_logZ_series(m, 4, 3, DerivationConvention::SinglePerLine);
    auto bad = lve_logZ_series(m, 4, 3, DerivationConvention::HalfPerPair);
    for (int k = 2; k <= 3; ++k) {
      double ref = std::abs(oracle.coefficients[k]);
      if (std::abs(good.coefficients[k] - oracle.coefficients[k]) > 1e-8 * ref)
        return false;
      // exactly one convention may match
      if (std::abs(bad.coefficients[k] - oracle.coefficients[k]) <= 1e-8 * ref)
        return false;
    }
  }
  return true;
}

bool tadpole_slope() {
  ContinuumCovariance c;
  c.j_max = 12;
  TadpoleTable table = tadpole_table(c);
  double limit = std::log(c.M) / (2.0 * std::numbers::pi);
  for (int j = 8; j <= c.j_max; ++j)
    if (std::abs(table.per_slice[j] - limit) > 0.01 * limit) return false;

  std::vector<double> xs, ys;
  for (int jm = 4; jm <= 12; ++jm) {
    ContinuumCovariance cc;
    cc.j_max = jm;
    xs.push_back(jm);
    ys.push_back(kernel(cc, 0.0));
  }
  double n = xs.size(), sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
  for (size_t i = 0; i < xs.size(); ++i) {
    sx += xs[i]; sy += ys[i]; sxx += xs[i] * xs[i];
    sxy += xs[i] * ys[i]; syy += ys[i] * ys[i];
  }
  double r = (n * sxy - sx * sy) /
             std::sqrt((n * sxx - sx * sx) * (n * syy - sy * sy));
  return r * r >= 0.999;
}

bool cleaning_conservation() {
  DecoratedTree t;
  t.tree = LabeledTree(2, {{0, 1}});
  DualCycleWord cyc = dualize(t);
  LatticeModel m = lattice_covariance(2, 1, 1.0, 1.0,
                                      CutoffMode::SliceHeatKernel,
                                      2.7454646467, 1);
  TermLedger led = run_cleaning(cyc, 1.0, 1);
  std::complex<double> direct = word_value(initial_word(cyc, 1), m, 0.03, 24);
  std::complex<double> sum = ledger_value(led, m, 0.03, 24);
  if (std::abs(direct - sum) > 1e-9 * std::max(1.0, std::abs(direct)))
    return false;

  std::ifstream in("tests/data/cleaning_two_resolvent.jsonl");
  if (!in) in.open("../tests/data/cleaning_two_resolvent.jsonl");
  if (!in) return false;
  std::vector<std::string> fixture;
  for (std::string line; std::getline(in, line);)
    if (!line.empty()) fixture.push_back(line);
  if (fixture.size() != led.records.size()) return false;
  for (size_t i = 0; i < fixture.size(); ++i)
    if (record_to_json(led.records[i]) != fixture[i]) return false;
  return true;
}

bool nelson_crossover() {
  // measured slope of the per-slice tadpole at high scales
  ContinuumCovariance c;
  c.j_max = 12;
  TadpoleTable table = tadpole_table(c);
  double s = table.per_slice.back();
  double lam = 0.1;
  for (int j = 15; j <= 60; ++j) {
    if (nelson_check(3 * lam, lam, j, s) >= 1.0) return false;
    if (nelson_check(lam / 10, lam, j, s) <= 1.0) return false;
  }
  return true;
}

bool cluster_convergence() {
  // geometric convergence of the cluster sum: increments decay and their
  // ratio settles to below 1% change between the last two sizes
  auto rep = cluster_sum(2.0, 5, 6);
  size_t n = rep.increments.size();
  for (size_t k = 2; k < n; ++k)
    if (rep.increments[k] >= rep.increments[k - 1]) return false;
  double r_prev = rep.increments[n - 2] / rep.increments[n - 3];
  double r_last = rep.increments[n - 1] / rep.increments[n - 2];
  return r_last < 1.0 && std::abs(r_last - r_prev) <= 0.01;
}

bool borel_remainder() {
  LatticeModel m = lattice_covariance(1, 1, 1.0, 1.0,
                                      CutoffMode::SliceHeatKernel,
                                      2.7454646467, 5);
  auto series = logZ_series(m, 4);
  auto f = [&](std::complex<double> lam) { return entire_logZ(m, lam); };
  std::vector<RemainderReport> reps;
  for (int N = 1; N <= 3; ++N) {
    RemainderReport r;
    r.N = N;
    for (double lam : {0.02, 0.05, 0.1}) {
      auto tr = taylor_remainder(f, N, lam, series.coefficients);
      if (tr.agreement > 1e-5) return false;
      r.lambdas.push_back(lam);
      r.remainders.push_back(tr.direct);
    }
    reps.push_back(r);
  }
  auto fit = factorial_bound_fit(reps);
  return std::isfinite(fit.A) && std::isfinite(fit.B) && fit.A > 0 &&
         fit.one_sided;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

bool cli_reproducibility(const std::string& cli) {
  const char* cmds[] = {
      "trees --n 5",
      "bkar-check --n 4 --seed 9 --cap 40",
      "cleaning --jmax 1 --a 1",
  };
  for (const char* args : cmds) {
    std::string out1 = "acc_run1.json", out2 = "acc_run2.json";
    for (const std::string& out : {out1, out2}) {
      std::string cmd = "'" + cli + "' " + args + " --out " + out +
                        " >/dev/null 2>&1";
      if (std::system(cmd.c_str()) != 0) return false;
    }
    std::string a = slurp(out1), b = slurp(out2);
    if (a.empty() || a != b) return false;
    std::remove(out1.c_str());
    std::remove(out2.c_str());
    std::remove((out1 + ".manifest.json").c_str());
    std::remove((out2 + ".manifest.json").c_str());
  }
  return true;
}

}  // namespace

int main(int argc, char** argv) {
  report(1, "tree census n^{n-2} for n = 2..8", tree_census());
  report(2, "BKAR forest identity on 200 random polynomials", bkar_identity());
  report(3, "path-infimum matrices PSD over 1000 draws", path_infimum_psd());
  report(4, "planar decoration counts with k=0 two-value report",
         planar_count_consistency());
  report(5, "exact planar cancellation and tadpole pairing",
         planar_cancellation());
  report(6, "order-lambda cancellation with both intermediates",
         order_lambda_cancellation());
  report(7, "LVE matches the oracle for exactly one convention",
         lve_oracle_equivalence());
  report(8, "tadpole slope log M / 2 pi and linear growth", tadpole_slope());
  report(9, "cleaning ledger conservation and golden fixture",
         cleaning_conservation());
  report(10, "Nelson crossover on j in [15, 60]", nelson_crossover());
  report(11, "cluster sum converges at c = 2", cluster_convergence());
  report(12, "factorial remainder bound on the one-site oracle",
         borel_remainder());
  if (argc > 1) {
    report(13, "CLI runs are byte-identical", cli_reproducibility(argv[1]));
  } else {
    report(13, "CLI runs are byte-identical (no CLI path given)", false);
  }
  return g_failures == 0 ? 0 : 1;
}
