#include <chrono>
#include <numbers>
#include <cmath>
#include <complex>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "lve/bounds.hpp"
#include "lve/cleaning.hpp"
#include "lve/covariance.hpp"
#include "lve/dual.hpp"
#include "lve/forest.hpp"
#include "lve/lve_engine.hpp"
#include "lve/planar.hpp"
#include "lve/trees.hpp"
#include "lve/wick.hpp"

using nlohmann::json;

namespace {

constexpr const char* kVersion = "0.1.0";

std::chrono::steady_clock::time_point g_start;

struct Config {
  int sites = 2;
  double spacing = 1.0;
  double mass = 1.0;
  double slice_ratio = 2.7454646467;
  int jmax = 5;
  int order = 2;
  int nmax = 3;
  int n = 4;
  double a = 1.0;          // cleaning stopping slope
  double lambda = 0.01;
  double decay = 2.0;
  int radius = 4;
  int cap = 10000;
  std::uint64_t seed = 1;
  double slope = 0.0;      // nelson tadpole slope; 0 = use log M / 2 pi
  int jlo = 15, jhi = 60;
  std::string out;
  std::string format = "json";
  bool dry_run = false;
};

void add_common(CLI::App* cmd, Config& c) {
  cmd->add_option("--sites", c.sites, "lattice sites (Nx, with Ny = 1)");
  cmd->add_option("--spacing", c.spacing, "lattice spacing a");
  cmd->add_option("--mass", c.mass, "mass m");
  cmd->add_option("--slice-ratio", c.slice_ratio, "multiscale ratio M");
  cmd->add_option("--jmax", c.jmax, "number of UV slices");
  cmd->add_option("--order", c.order, "lambda order");
  cmd->add_option("--nmax", c.nmax, "max tree size");
  cmd->add_option("--n", c.n, "combinatorial size parameter");
  cmd->add_option("--a", c.a, "cleaning stopping slope");
  cmd->add_option("--lambda", c.lambda, "coupling for evaluations");
  cmd->add_option("--decay", c.decay, "cluster decay rate c");
  cmd->add_option("--radius", c.radius, "cluster enumeration radius");
  cmd->add_option("--cap", c.cap, "record / draw cap");
  cmd->add_option("--seed", c.seed, "seed for randomized sweeps");
  cmd->add_option("--slope", c.slope, "nelson tadpole slope s (0 = measured)");
  cmd->add_option("--jlo", c.jlo, "nelson scan lower j");
  cmd->add_option("--jhi", c.jhi, "nelson scan upper j");
  cmd->add_option("--out", c.out, "output path (default: stdout)");
  cmd->add_option("--format", c.format, "json or csv")
      ->check(CLI::IsMember({"json", "csv"}));
  cmd->add_flag("--dry-run", c.dry_run, "print resolved config and exit");
}

json config_json(const Config& c, const std::string& command) {
  json j;
  j["command"] = command;
  j["sites"] = c.sites;
  j["spacing"] = c.spacing;
  j["mass"] = c.mass;
  j["slice_ratio"] = c.slice_ratio;
  j["jmax"] = c.jmax;
  j["order"] = c.order;
  j["nmax"] = c.nmax;
  j["n"] = c.n;
  j["a"] = c.a;
  j["lambda"] = c.lambda;
  j["decay"] = c.decay;
  j["radius"] = c.radius;
  j["cap"] = c.cap;
  j["seed"] = c.seed;
  j["slope"] = c.slope;
  j["jlo"] = c.jlo;
  j["jhi"] = c.jhi;
  j["format"] = c.format;
  return j;
}

lve::LatticeModel make_model(const Config& c) {
  return lve::lattice_covariance(c.sites, 1, c.spacing, c.mass,
                                 lve::CutoffMode::SliceHeatKernel,
                                 c.slice_ratio, c.jmax);
}

// payload goes to --out or stdout; the manifest (timing, versions) is kept
// separate so payloads stay byte-identical across runs
void emit(const Config& c, const std::string& command,
          const std::string& payload) {
  double wall_ms = std::chrono::duration<double, std::milli>(
                       std::chrono::steady_clock::now() - g_start)
                       .count();
  json manifest;
  manifest["config"] = config_json(c, command);
  manifest["versions"] = {{"lve", kVersion}};
  manifest["walltime_ms"] = wall_ms;
  manifest["convention"] = lve::convention_name(
      lve::DerivationConvention::SinglePerLine);
  if (c.out.empty()) {
    std::cout << payload << "\n";
    std::cerr << manifest.dump(2) << "\n";
  } else {
    std::ofstream f(c.out);
    if (!f) throw std::runtime_error("cannot open output file");
    f << payload << "\n";
    std::ofstream mf(c.out + ".manifest.json");
    mf << manifest.dump(2) << "\n";
  }
}

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

int cmd_trees(const Config& c) {
  auto trees = lve::enumerate_labeled_trees(c.n);
  std::string payload;
  if (c.format == "csv") {
    std::ostringstream os;
    os << "tree,vertex_a,vertex_b\n";
    for (size_t i = 0; i < trees.size(); ++i)
      for (const auto& [a, b] : trees[i].edges)
        os << i << "," << a << "," << b << "\n";
    payload = os.str();
    payload.pop_back();
  } else {
    json j;
    j["n"] = c.n;
    j["count"] = trees.size();
    json arr = json::array();
    for (const auto& t : trees) arr.push_back(json::parse(tree_to_json(t)));
    j["trees"] = arr;
    payload = j.dump(2);
  }
  lve::BigInt expect = 1;
  for (int i = 0; i < c.n - 2; ++i) expect *= c.n;
  bool ok = c.n < 2 || lve::BigInt(trees.size()) == expect;
  emit(c, "trees", payload);
  return ok ? 0 : 1;
}

int cmd_bkar_check(const Config& c) {
  if (c.n > 5) throw std::invalid_argument("bkar-check needs n <= 5");
  int draws = std::min(c.cap, 500);
  double max_rel = 0.0;
  Eigen::MatrixXd ones = Eigen::MatrixXd::Ones(c.n, c.n);
  for (int d = 0; d < draws; ++d) {
    auto poly = lve::MultilinearPairPolynomial::random(
        c.n, c.seed + static_cast<std::uint64_t>(d));
    double direct = poly.eval(ones);
    double via_forests = lve::forest_sum(poly);
    double rel = std::abs(direct - via_forests) /
                 std::max(1.0, std::abs(direct));
    max_rel = std::max(max_rel, rel);
  }
  bool ok = max_rel < 1e-9;
  json j;
  j["n"] = c.n;
  j["draws"] = draws;
  j["max_rel_error"] = max_rel;
  j["pass"] = ok;
  std::string payload;
  if (c.format == "csv")
    payload = "n,draws,max_rel_error,pass\n" + std::to_string(c.n) + "," +
              std::to_string(draws) + "," + fmt_double(max_rel) + "," +
              (ok ? "1" : "0");
  else
    payload = j.dump(2);
  emit(c, "bkar-check", payload);
  return ok ? 0 : 1;
}

int cmd_covariance(const Config& c) {
  lve::ContinuumCovariance cc{c.mass, c.slice_ratio, c.jmax};
  auto table = lve::tadpole_table(cc);
  double target = std::log(c.slice_ratio) / (2.0 * std::numbers::pi);
  std::string payload;
  if (c.format == "csv") {
    std::ostringstream os;
    os << "j,T_j,T_cumulative\n";
    for (int j = 0; j <= c.jmax; ++j)
      os << j << "," << fmt_double(table.per_slice[j]) << ","
         << fmt_double(table.cumulative[j]) << "\n";
    payload = os.str();
    payload.pop_back();
  } else {
    json j;
    j["mass"] = c.mass;
    j["M"] = c.slice_ratio;
    j["jmax"] = c.jmax;
    j["per_slice"] = table.per_slice;
    j["cumulative"] = table.cumulative;
    j["slope_target"] = target;  // log M / 2 pi
    auto model = make_model(c);
    j["lattice_tadpole"] = model.T;
    payload = j.dump(2);
  }
  emit(c, "covariance", payload);
  return 0;
}

int cmd_series(const Config& c) {
  auto model = make_model(c);
  auto s = lve::logZ_series(model, c.order);
  std::string payload;
  if (c.format == "csv") {
    std::ostringstream os;
    os << "order,coefficient,abs_err\n";
    for (size_t i = 0; i < s.coefficients.size(); ++i)
      os << i << "," << fmt_double(s.coefficients[i]) << ","
         << fmt_double(s.abs_err[i]) << "\n";
    payload = os.str();
    payload.pop_back();
  } else {
    payload = json::parse(lve::series_to_json(s)).dump(2);
  }
  emit(c, "series", payload);
  return 0;
}

int cmd_lve(const Config& c) {
  auto model = make_model(c);
  auto s = lve::lve_logZ_series(model, c.nmax, c.order);
  std::string payload;
  if (c.format == "csv") {
    std::ostringstream os;
    os << "order,coefficient,abs_err\n";
    for (size_t i = 0; i < s.coefficients.size(); ++i)
      os << i << "," << fmt_double(s.coefficients[i]) << ","
         << fmt_double(s.abs_err[i]) << "\n";
    payload = os.str();
    payload.pop_back();
  } else {
    payload = json::parse(lve::series_to_json(s)).dump(2);
  }
  emit(c, "lve", payload);
  return 0;
}

int cmd_cancel(const Config& c) {
  lve::Rational A(3, 7);
  lve::Rational sum = lve::renormalized_planar_sum(c.n, A, A, 1);
  bool zero = sum == 0;
  auto model = make_model(c);
  auto s = lve::lve_logZ_series(model, std::min(c.nmax, 2), 1);
  double a1 = s.coefficients.at(1);
  double vol = model.a * model.a * model.sites();
  double tree1 = 2.0 * vol * model.T * model.T;  // +2 lambda |V| T^2
  json j;
  j["n"] = c.n;
  j["A"] = "3/7";
  j["B"] = "3/7";
  j["renormalized_sum"] = sum.str();
  j["exact_zero"] = zero;
  j["a1"] = a1;
  j["tree1_value"] = tree1;
  j["counterterm_value"] = -tree1;
  bool ok = zero && std::abs(a1) <= 1e-12;
  j["pass"] = ok;
  std::string payload;
  if (c.format == "csv")
    payload = "n,sum,exact_zero,a1,pass\n" + std::to_string(c.n) + "," +
              sum.str() + "," + (zero ? "1" : "0") + "," + fmt_double(a1) +
              "," + (ok ? "1" : "0");
  else
    payload = j.dump(2);
  emit(c, "cancel", payload);
  return ok ? 0 : 1;
}

int cmd_cleaning(const Config& c) {
  Config cc = c;
  cc.sites = std::min(c.sites, 2);
  cc.jmax = std::min(c.jmax, 2);
  auto model = make_model(cc);
  lve::DecoratedTree t;
  t.tree = lve::LabeledTree(2, {{0, 1}});
  auto cycle = lve::dualize(t);
  auto ledger = lve::run_cleaning(cycle, cc.a, cc.jmax, cc.cap);
  auto paired = lve::pair_tadpoles(ledger);

  std::map<std::string, int> counts;
  for (const auto& r : ledger.records)
    counts[lve::term_class_name(r.classification)] += 1;
  json j;
  j["records"] = ledger.records.size();
  j["by_class"] = counts;
  j["stop_scale"] = ledger.stop_scale;
  j["truncated"] = ledger.truncated;
  json net = json::array();
  for (int sc = 0; sc <= cc.jmax; ++sc)
    net.push_back(lve::net_tadpole_count(paired, sc));
  j["net_tadpoles"] = net;
  auto bound = lve::bound_product(ledger, cc.lambda, cc.slice_ratio);
  j["bound_product"] = bound.value;
  j["within_nelson"] = bound.within_nelson;

  double diff = -1.0;
  if (!ledger.truncated || static_cast<int>(ledger.records.size()) < 5000) {
    auto base = lve::word_value(lve::initial_word(cycle, cc.jmax), model,
                                cc.lambda, 16);
    auto total = lve::ledger_value(ledger, model, cc.lambda, 16);
    diff = std::abs(total - base);
    j["uncleaned"] = base.real();
    j["ledger_sum"] = total.real();
    j["conservation_diff"] = diff;
  }
  bool ok = diff >= 0 && diff < 1e-9;
  j["pass"] = ok;
  std::string payload;
  if (c.format == "csv")
    payload = "records,stop_scale,conservation_diff,pass\n" +
              std::to_string(ledger.records.size()) + "," +
              std::to_string(ledger.stop_scale) + "," + fmt_double(diff) +
              "," + (ok ? "1" : "0");
  else
    payload = j.dump(2);
  emit(c, "cleaning", payload);
  return ok ? 0 : 1;
}

int cmd_cluster(const Config& c) {
  auto rep = lve::cluster_sum(c.decay, c.radius, std::min(c.cap, 8));
  std::string payload;
  if (c.format == "csv") {
    std::ostringstream os;
    os << "k,increment,partial_sum\n";
    for (size_t i = 0; i < rep.partial_sums.size(); ++i)
      os << (i + 1) << "," << fmt_double(rep.increments[i]) << ","
         << fmt_double(rep.partial_sums[i]) << "\n";
    payload = os.str();
    payload.pop_back();
  } else {
    json j;
    j["decay"] = c.decay;
    j["radius"] = c.radius;
    j["increments"] = rep.increments;
    j["partial_sums"] = rep.partial_sums;
    payload = j.dump(2);
  }
  emit(c, "cluster", payload);
  return 0;
}

int cmd_nelson(const Config& c) {
  double s = c.slope > 0
                 ? c.slope
                 : std::log(c.slice_ratio) / (2.0 * std::numbers::pi);
  json rows = json::array();
  std::ostringstream os;
  os << "j,value\n";
  int crossover = -1;
  for (int j = c.jlo; j <= c.jhi; ++j) {
    double v = lve::nelson_check(c.a, c.lambda, j, s);
    rows.push_back({{"j", j}, {"value", v}});
    os << j << "," << fmt_double(v) << "\n";
    if (crossover < 0 && v < 1.0) crossover = j;
  }
  std::string payload;
  if (c.format == "csv") {
    payload = os.str();
    payload.pop_back();
  } else {
    json j;
    j["a"] = c.a;
    j["lambda"] = c.lambda;
    j["slope"] = s;
    j["rows"] = rows;
    j["first_j_below_one"] = crossover;
    payload = j.dump(2);
  }
  emit(c, "nelson", payload);
  return 0;
}

int cmd_borel(const Config& c) {
  Config cc = c;
  cc.sites = 1;
  auto model = make_model(cc);
  auto series = lve::logZ_series(model, std::min(c.order + 1, 4));
  auto f = [&](std::complex<double> lam) {
    return lve::entire_logZ(model, lam);
  };
  std::vector<double> grid{0.02, 0.05, 0.1};
  std::vector<lve::RemainderReport> reports;
  json rem = json::array();
  std::ostringstream os;
  os << "N,lambda,remainder,integral_route,agreement\n";
  for (int N = 0; N <= std::min(c.order + 1, 3); ++N) {
    lve::RemainderReport rr;
    rr.N = N;
    for (double lam : grid) {
      auto tr = lve::taylor_remainder(f, N, lam, series.coefficients);
      rr.lambdas.push_back(lam);
      rr.remainders.push_back(tr.direct);
      rem.push_back({{"N", N},
                     {"lambda", lam},
                     {"direct", tr.direct},
                     {"integral", tr.integral},
                     {"agreement", tr.agreement},
                     {"widened", tr.widened}});
      os << N << "," << fmt_double(lam) << "," << fmt_double(tr.direct)
         << "," << fmt_double(tr.integral) << ","
         << fmt_double(tr.agreement) << "\n";
    }
    reports.push_back(rr);
  }
  auto fit = lve::factorial_bound_fit(reports);
  std::vector<double> u;
  for (int i = 0; i <= 10; ++i) u.push_back(0.01 * i);
  auto bt = lve::borel_partial_transform(series.coefficients, u);
  json j;
  j["remainders"] = rem;
  j["fit_A"] = fit.A;
  j["fit_B"] = fit.B;
  j["one_sided"] = fit.one_sided;
  j["u_grid"] = u;
  j["borel_values"] = bt.values;
  j["borel_truncation"] = bt.truncation;
  std::string payload = c.format == "csv" ? os.str() : j.dump(2);
  if (c.format == "csv") payload.pop_back();
  emit(c, "borel", payload);
  return fit.one_sided ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"loop-vertex-expansion desk-scale laboratory"};
  app.require_subcommand(1);
  Config c;

  std::map<std::string, std::function<int(const Config&)>> handlers{
      {"trees", cmd_trees},         {"bkar-check", cmd_bkar_check},
      {"covariance", cmd_covariance}, {"series", cmd_series},
      {"lve", cmd_lve},             {"cancel", cmd_cancel},
      {"cleaning", cmd_cleaning},   {"cluster", cmd_cluster},
      {"nelson", cmd_nelson},       {"borel", cmd_borel}};
  for (auto& [name, fn] : handlers) {
    CLI::App* sub = app.add_subcommand(name);
    add_common(sub, c);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  std::string name = app.get_subcommands().front()->get_name();
  if (c.dry_run) {
    std::cout << config_json(c, name).dump(2) << "\n";
    return 0;
  }
  try {
    g_start = std::chrono::steady_clock::now();
    return handlers.at(name)(c);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
