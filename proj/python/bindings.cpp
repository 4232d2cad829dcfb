#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "threshcal/calibrator.hpp"
#include "threshcal/merge_tree.hpp"
#include "threshcal/reduction.hpp"
#include "threshcal/solvers.hpp"

namespace py = pybind11;
using namespace threshcal;

namespace {

std::string solution_repr(const ThresholdSolution& s) {
  return "ThresholdSolution(x0=" + std::to_string(s.x0) + ", x1=" + std::to_string(s.x1) +
         ", l0=" + std::to_string(s.l0) + ", l1=" + std::to_string(s.l1) +
         ", loss=" + std::to_string(s.loss) + ", n=" + std::to_string(s.n) + ")";
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Optimal threshold calibration for binary-classification scores under linear losses";

  m.attr("LOW") = kLow;
  m.attr("HIGH") = kHigh;

  py::enum_<LossMode>(m, "LossMode")
      .value("PLAIN", LossMode::kPlain)
      .value("CLASS_WEIGHTED", LossMode::kClassWeighted)
      .value("SAMPLE_WEIGHTED", LossMode::kSampleWeighted)
      .value("RAW", LossMode::kRaw);

  py::class_<Sample>(m, "Sample")
      .def(py::init<Real, Real>(), py::arg("x"), py::arg("z"))
      .def_readonly("x", &Sample::x)
      .def_readonly("z", &Sample::z)
      .def("__repr__", [](const Sample& s) {
        return "Sample(x=" + std::to_string(s.x) + ", z=" + std::to_string(s.z) + ")";
      });

  py::class_<LabeledObservation>(m, "LabeledObservation")
      .def(py::init<Real, int, Real>(), py::arg("x"), py::arg("y"), py::arg("beta") = 1.0)
      .def_readonly("x", &LabeledObservation::x)
      .def_readonly("y", &LabeledObservation::y)
      .def_readonly("beta", &LabeledObservation::beta);

  py::class_<LossSpec>(m, "LossSpec")
      .def(py::init<LossMode, Real>(), py::arg("mode"), py::arg("alpha") = 1.0)
      .def_readonly("mode", &LossSpec::mode)
      .def_readonly("alpha", &LossSpec::alpha);

  py::class_<MappingBounds>(m, "MappingBounds")
      .def(py::init<Real, Real>(), py::arg("q0") = 0.0, py::arg("q1") = 1.0)
      .def_readonly("q0", &MappingBounds::q0)
      .def_readonly("q1", &MappingBounds::q1);

  py::class_<ThresholdSolution>(m, "ThresholdSolution")
      .def_readonly("x0", &ThresholdSolution::x0)
      .def_readonly("x1", &ThresholdSolution::x1)
      .def_readonly("l0", &ThresholdSolution::l0)
      .def_readonly("l1", &ThresholdSolution::l1)
      .def_readonly("loss", &ThresholdSolution::loss)
      .def_readonly("n", &ThresholdSolution::n)
      .def("__eq__", [](const ThresholdSolution& a, const ThresholdSolution& b) { return a == b; })
      .def("__repr__", &solution_repr);

  py::class_<AuxSummary>(m, "AuxSummary")
      .def_readonly("x0", &AuxSummary::x0)
      .def_readonly("x1", &AuxSummary::x1)
      .def_readonly("l0", &AuxSummary::l0)
      .def_readonly("l1", &AuxSummary::l1)
      .def_readonly("x_min", &AuxSummary::x_min)
      .def_readonly("x_max", &AuxSummary::x_max)
      .def_readonly("count", &AuxSummary::count);

  py::class_<Metrics>(m, "Metrics")
      .def_readonly("loss", &Metrics::loss)
      .def_readonly("weighted_error", &Metrics::weighted_error)
      .def_readonly("accuracy", &Metrics::accuracy)
      .def_readonly("n", &Metrics::n);

  py::class_<AuditReport>(m, "AuditReport")
      .def_readonly("depth", &AuditReport::depth)
      .def_readonly("level_sizes", &AuditReport::level_sizes)
      .def_readonly("violations", &AuditReport::violations)
      .def("ok", &AuditReport::ok);

  py::class_<OptimalityReport>(m, "OptimalityReport")
      .def_readonly("threshold_loss", &OptimalityReport::threshold_loss)
      .def_readonly("best_grid_loss", &OptimalityReport::best_grid_loss)
      .def_readonly("witness", &OptimalityReport::witness)
      .def_readonly("threshold_is_optimal", &OptimalityReport::threshold_is_optimal);

  m.def("reduce_to_linear", &reduce_to_linear, py::arg("obs"), py::arg("spec"));
  m.def(
      "weighted_error_offset",
      [](const std::vector<LabeledObservation>& obs, const LossSpec& spec) {
        return weighted_error_offset(obs, spec);
      },
      py::arg("observations"), py::arg("spec"));
  m.def(
      "evaluate_threshold",
      [](const std::vector<Sample>& samples, std::size_t k, const MappingBounds& b) {
        return evaluate_threshold(samples, k, b);
      },
      py::arg("samples"), py::arg("split_index"), py::arg("bounds"));

  py::class_<SortedInstance>(m, "SortedInstance")
      .def(py::init<std::vector<Sample>, MappingBounds>(), py::arg("samples"), py::arg("bounds"))
      .def_static("from_unsorted", &SortedInstance::from_unsorted, py::arg("samples"),
                  py::arg("bounds"))
      .def_readonly("samples", &SortedInstance::samples)
      .def_readonly("bounds", &SortedInstance::bounds);

  m.def("solve_brute_force", &solve_brute_force, py::arg("instance"));
  m.def("solve_iterative", &solve_iterative, py::arg("instance"));
  m.def("monotone_assignment_count", &monotone_assignment_count, py::arg("n"),
        py::arg("grid_levels"));
  m.def("verify_threshold_optimality", &verify_threshold_optimality, py::arg("instance"),
        py::arg("grid_levels"));

  m.def("singleton", &singleton, py::arg("sample"));
  m.def("merge_aux", &merge_aux, py::arg("left"), py::arg("right"), py::arg("tie_tol") = 0.0);

  py::class_<MergeTree>(m, "MergeTree")
      .def(py::init<Real>(), py::arg("tie_tol") = 0.0)
      .def("insert", &MergeTree::insert, py::arg("sample"))
      .def("update_leaf", &MergeTree::update_leaf, py::arg("x"), py::arg("z"))
      .def("contains", &MergeTree::contains, py::arg("x"))
      .def("empty", &MergeTree::empty)
      .def("__len__", &MergeTree::size)
      .def_property_readonly("depth", &MergeTree::depth)
      .def_property_readonly("update_counter", &MergeTree::update_counter)
      .def_property_readonly("root", [](const MergeTree& t) { return t.root(); })
      .def("root_solution", &MergeTree::root_solution, py::arg("bounds"))
      .def("audit", &MergeTree::audit)
      .def("level_summaries", &MergeTree::level_summaries);

  m.def("batch_build", &batch_build, py::arg("instance"), py::arg("tie_tol") = 0.0);

  py::register_exception<SnapshotError>(m, "SnapshotError", PyExc_ValueError);

  py::class_<Calibrator>(m, "Calibrator")
      .def(py::init<LossSpec, MappingBounds, Real>(), py::arg("spec"), py::arg("bounds"),
           py::arg("tie_tol") = 0.0)
      .def("observe",
           py::overload_cast<const LabeledObservation&>(&Calibrator::observe), py::arg("obs"))
      .def("observe", py::overload_cast<const Sample&>(&Calibrator::observe), py::arg("sample"))
      .def("solution", &Calibrator::solution)
      .def("predict", &Calibrator::predict, py::arg("x"))
      .def("metrics", &Calibrator::metrics)
      .def("empty", &Calibrator::empty)
      .def_property_readonly("observations", &Calibrator::observations)
      .def_property_readonly("distinct_scores", &Calibrator::distinct_scores)
      .def_property_readonly("last_update_count", &Calibrator::last_update_count)
      .def_property_readonly("update_counter", &Calibrator::update_counter)
      .def_property_readonly("spec", &Calibrator::spec)
      .def_property_readonly("bounds", &Calibrator::bounds)
      .def("snapshot",
           [](const Calibrator& cal) {
             const std::vector<std::uint8_t> bytes = cal.snapshot();
             return py::bytes(reinterpret_cast<const char*>(bytes.data()), bytes.size());
           })
      .def_static("restore", [](const py::bytes& data) {
        const std::string_view view = data;
        return Calibrator::restore(std::span<const std::uint8_t>(
            reinterpret_cast<const std::uint8_t*>(view.data()), view.size()));
      });
}
