#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "lve/bounds.hpp"
#include "lve/cleaning.hpp"
#include "lve/covariance.hpp"
#include "lve/dual.hpp"
#include "lve/forest.hpp"
#include "lve/lve_engine.hpp"
#include "lve/planar.hpp"
#include "lve/trees.hpp"
#include "lve/wick.hpp"

namespace py = pybind11;
using namespace lve;

namespace {

py::int_ big_to_py(const BigInt& v) {
  std::string s = v.str();
  return py::reinterpret_steal<py::int_>(
      PyLong_FromString(s.c_str(), nullptr, 10));
}

LabeledTree tree_from_edges(int n, const std::vector<std::pair<int, int>>& e) {
  std::vector<Edge> edges;
  for (auto [a, b] : e) edges.push_back(make_edge(a, b));
  return LabeledTree(n, std::move(edges));
}

DecoratedTree decorated_from_edges(int n,
                                   const std::vector<std::pair<int, int>>& e,
                                   const std::vector<int>& ct) {
  DecoratedTree t;
  t.tree = tree_from_edges(n, e);
  for (int v : ct) t.counterterm[v] = true;
  validate_decorated(t);
  return t;
}

}  // namespace

PYBIND11_MODULE(_lve, m) {
  m.doc() = "loop-vertex-expansion toolkit core";

  // trees
  py::class_<LabeledTree>(m, "LabeledTree")
      .def(py::init(&tree_from_edges), py::arg("n"), py::arg("edges"))
      .def_readonly("n_vertices", &LabeledTree::n_vertices)
      .def_property_readonly(
          "edges", [](const LabeledTree& t) { return t.edges; })
      .def("degrees", &LabeledTree::degrees)
      .def("path", &LabeledTree::path)
      .def("__eq__", [](const LabeledTree& a, const LabeledTree& b) {
        return a == b;
      });
  m.def("enumerate_labeled_trees", &enumerate_labeled_trees, py::arg("n"),
        py::arg("cap") = 9);
  m.def("pruefer_code", &pruefer_code);
  m.def("tree_from_pruefer", &tree_from_pruefer);
  m.def("tree_to_json", &tree_to_json);
  m.def("tree_from_json", &tree_from_json);
  m.def("path_infimum_matrix",
        [](const LabeledTree& t,
           const std::map<std::pair<int, int>, double>& weights) {
          WeakeningAssignment w;
          for (const auto& [e, v] : weights) w.w[make_edge(e.first, e.second)] = v;
          return path_infimum_matrix(t, w);
        },
        py::arg("tree"), py::arg("weights"));

  // forests / BKAR
  m.def("forest_count",
        [](int n) { return enumerate_forests(n).size(); });
  m.def("bkar_check",
        [](int n, std::uint64_t seed) {
          auto f = MultilinearPairPolynomial::random(n, seed);
          double direct = f.eval(Eigen::MatrixXd::Ones(n, n));
          return std::make_pair(forest_sum(f), direct);
        },
        py::arg("n"), py::arg("seed"),
        "forest-sum and direct evaluation of a random multilinear pair "
        "polynomial; the two must agree");

  // covariance
  py::class_<ContinuumCovariance>(m, "ContinuumCovariance")
      .def(py::init<>())
      .def_readwrite("m", &ContinuumCovariance::m)
      .def_readwrite("M", &ContinuumCovariance::M)
      .def_readwrite("j_max", &ContinuumCovariance::j_max);
  m.def("kernel", &kernel);
  m.def("slice_kernel", &slice_kernel);
  py::class_<TadpoleTable>(m, "TadpoleTable")
      .def_readonly("per_slice", &TadpoleTable::per_slice)
      .def_readonly("cumulative", &TadpoleTable::cumulative);
  m.def("tadpole_table", &tadpole_table);

  py::enum_<CutoffMode>(m, "CutoffMode")
      .value("SliceHeatKernel", CutoffMode::SliceHeatKernel)
      .value("MomentumCutoff", CutoffMode::MomentumCutoff);
  py::class_<LatticeModel>(m, "LatticeModel")
      .def_readonly("Nx", &LatticeModel::Nx)
      .def_readonly("Ny", &LatticeModel::Ny)
      .def_readonly("a", &LatticeModel::a)
      .def_readonly("m", &LatticeModel::m)
      .def_readonly("j_max", &LatticeModel::j_max)
      .def_readonly("T", &LatticeModel::T)
      .def_readonly("covariance", &LatticeModel::covariance)
      .def("sites", &LatticeModel::sites)
      .def("slice", &LatticeModel::slice, py::return_value_policy::copy);
  m.def("lattice_covariance", &lattice_covariance, py::arg("Nx"),
        py::arg("Ny"), py::arg("a"), py::arg("m"),
        py::arg("mode") = CutoffMode::SliceHeatKernel,
        py::arg("M") = 2.7454646467, py::arg("j_max") = 10);
  m.def("matrix_sqrt", &matrix_sqrt);

  // wick oracle
  m.def("gaussian_moment",
        [](const Eigen::MatrixXd& cov, const std::vector<int>& idx) {
          return gaussian_moment({cov, idx});
        },
        py::arg("covariance"), py::arg("indices"));
  m.def("wick_order_quartic", &wick_order_quartic);
  m.def("wick_quartic_moment", &wick_quartic_moment);
  py::class_<SeriesCoefficients>(m, "SeriesCoefficients")
      .def_readonly("model", &SeriesCoefficients::model)
      .def_readonly("method", &SeriesCoefficients::method)
      .def_readonly("coefficients", &SeriesCoefficients::coefficients)
      .def_readonly("abs_err", &SeriesCoefficients::abs_err);
  m.def("logZ_series", &logZ_series, py::arg("model"), py::arg("order"));
  m.def("Z_series", &Z_series, py::arg("model"), py::arg("order"));
  m.def("direct_logZ", &direct_logZ, py::arg("model"), py::arg("lam"),
        py::arg("degree") = 48);
  m.def("entire_logZ", &entire_logZ, py::arg("model"), py::arg("lam"),
        py::arg("degree") = 48);
  m.def("series_to_json", &series_to_json);

  // lve engine
  py::enum_<DerivationConvention>(m, "DerivationConvention")
      .value("SinglePerLine", DerivationConvention::SinglePerLine)
      .value("HalfPerPair", DerivationConvention::HalfPerPair);
  m.def("convention_name", &convention_name);
  m.def("lve_logZ_series", &lve_logZ_series, py::arg("model"),
        py::arg("n_max"), py::arg("order"),
        py::arg("convention") = DerivationConvention::SinglePerLine);
  m.def("renormalized_planar_sum",
        [](int n, long long a_num, long long a_den, long long b_num,
           long long b_den) {
          Rational r = renormalized_planar_sum(
              n, Rational(a_num, a_den), Rational(b_num, b_den), 1);
          return r.str();
        },
        py::arg("n"), py::arg("a_num"), py::arg("a_den"), py::arg("b_num"),
        py::arg("b_den"));
  m.def("count_planar_decorations",
        [](int n, int k) { return big_to_py(count_planar_decorations(n, k)); });

  // dual cycle and cleaning
  py::class_<DecoratedTree>(m, "DecoratedTree")
      .def(py::init(&decorated_from_edges), py::arg("n"), py::arg("edges"),
           py::arg("counterterm_leaves") = std::vector<int>{});
  py::class_<DualCycleWord>(m, "DualCycleWord")
      .def("n_vertices", &DualCycleWord::n_vertices)
      .def("__len__",
           [](const DualCycleWord& w) { return w.objects.size(); })
      .def("counts", [](const DualCycleWord& w) {
        std::map<std::string, int> out;
        out["counter_dot"] = w.count(CycleObject::CounterDot);
        out["half_line"] = w.count(CycleObject::HalfLine);
        out["leaf_resolvent"] = w.count(CycleObject::LeafResolvent);
        out["resolvent"] = w.count(CycleObject::Resolvent);
        return out;
      });
  m.def("dualize", &dualize);

  py::class_<TermLedger>(m, "TermLedger")
      .def_readonly("stop_scale", &TermLedger::stop_scale)
      .def_readonly("truncated", &TermLedger::truncated)
      .def("__len__",
           [](const TermLedger& l) { return l.records.size(); })
      .def("record_json", [](const TermLedger& l, size_t i) {
        return record_to_json(l.records.at(i));
      });
  m.def("run_cleaning", &run_cleaning, py::arg("cycle"), py::arg("a"),
        py::arg("j_max"), py::arg("cap") = 100000,
        py::arg("count_nesting") = true);
  m.def("ledger_value", &ledger_value, py::arg("ledger"), py::arg("model"),
        py::arg("lam"), py::arg("gh_degree") = 32);
  m.def("uncleaned_value",
        [](const DualCycleWord& cycle, const LatticeModel& model, double lam,
           int gh_degree) {
          return word_value(initial_word(cycle, model.j_max), model, lam,
                            gh_degree);
        },
        py::arg("cycle"), py::arg("model"), py::arg("lam"),
        py::arg("gh_degree") = 32);
  m.def("pair_tadpoles", &pair_tadpoles);
  m.def("net_tadpole_count", &net_tadpole_count);

  // bounds and diagnostics
  py::class_<ClusterSumReport>(m, "ClusterSumReport")
      .def_readonly("partial_sums", &ClusterSumReport::partial_sums)
      .def_readonly("increments", &ClusterSumReport::increments);
  m.def("cluster_sum", &cluster_sum, py::arg("c"), py::arg("radius"),
        py::arg("size_cap"), py::arg("exhaustive") = false);
  m.def("cluster_tree_length",
        [](const std::vector<std::array<int, 2>>& squares) {
          return cluster_tree_length({squares});
        });
  m.def("nelson_check", &nelson_check, py::arg("a"), py::arg("lam"),
        py::arg("j"), py::arg("s"));
  py::class_<MajorantReport>(m, "MajorantReport")
      .def_readonly("coeffs", &MajorantReport::coeffs)
      .def_readonly("converges", &MajorantReport::converges)
      .def_readonly("closed_form", &MajorantReport::closed_form)
      .def_readonly("partial_sum", &MajorantReport::partial_sum)
      .def_readonly("terms", &MajorantReport::terms);
  m.def("pressure_majorant", &pressure_majorant, py::arg("lam"), py::arg("K"),
        py::arg("j_max"), py::arg("M") = 2.7454646467, py::arg("n_terms") = 40);
  py::class_<TaylorRemainder>(m, "TaylorRemainder")
      .def_readonly("direct", &TaylorRemainder::direct)
      .def_readonly("integral", &TaylorRemainder::integral)
      .def_readonly("agreement", &TaylorRemainder::agreement)
      .def_readonly("widened", &TaylorRemainder::widened);
  m.def("taylor_remainder", &taylor_remainder, py::arg("f"), py::arg("N"),
        py::arg("lam"), py::arg("taylor0"));
  py::class_<BorelTransform>(m, "BorelTransform")
      .def_readonly("values", &BorelTransform::values)
      .def_readonly("truncation", &BorelTransform::truncation);
  m.def("borel_partial_transform", &borel_partial_transform,
        py::arg("coeffs"), py::arg("u_grid"));
}
