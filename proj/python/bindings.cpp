// Python bindings for the core fitting pipeline: data generation, per-batch
// robust fits, distributed and online consolidation, and the metrics used to
// compare them. Matrices cross the boundary as numpy arrays via Eigen.

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cstdint>
#include <sstream>
#include <utility>
#include <vector>

#include "robustlsq/batch.hpp"
#include "robustlsq/consolidation.hpp"
#include "robustlsq/datagen.hpp"
#include "robustlsq/drlr.hpp"
#include "robustlsq/errors.hpp"
#include "robustlsq/hrr.hpp"
#include "robustlsq/metrics.hpp"
#include "robustlsq/orlr.hpp"

namespace py = pybind11;
using namespace robustlsq;

PYBIND11_MODULE(_core, m) {
  m.doc() = "Robust least-squares regression over corrupted mini-batches";

  py::register_exception<numerical_error>(m, "NumericalError", PyExc_ArithmeticError);
  py::register_exception<data_error>(m, "DataError", PyExc_ValueError);
  py::register_exception<capability_error>(m, "CapabilityError", PyExc_ValueError);

  py::class_<Coefficients>(m, "Coefficients",
                           "A p-dimensional coefficient vector; entries are "
                           "validated finite at construction.")
      .def(py::init<Eigen::VectorXd>(), py::arg("beta"))
      .def_property_readonly("vec", &Coefficients::vec)
      .def("__len__", [](const Coefficients& c) { return c.dim(); })
      .def("__repr__", [](const Coefficients& c) {
        std::ostringstream out;
        out << "Coefficients(dim=" << c.dim() << ")";
        return out.str();
      });

  py::class_<IndexSet>(m, "IndexSet",
                       "Sorted duplicate-free sample positions within a batch.")
      .def(py::init<std::vector<int>, int>(), py::arg("indices"), py::arg("universe"))
      .def_static("full", &IndexSet::full, py::arg("n"))
      .def_property_readonly("indices", &IndexSet::indices)
      .def_property_readonly("universe", &IndexSet::universe)
      .def("__len__", &IndexSet::size)
      .def("__contains__", &IndexSet::contains);

  py::class_<MiniBatch>(m, "MiniBatch",
                        "One sample block: covariates x of shape (p, n), one "
                        "column per sample, next to the response vector y.")
      .def(py::init<Eigen::MatrixXd, Eigen::VectorXd, std::int64_t>(), py::arg("x"),
           py::arg("y"), py::arg("id"))
      .def_property_readonly("x", &MiniBatch::x)
      .def_property_readonly("y", &MiniBatch::y)
      .def_property_readonly("id", &MiniBatch::id)
      .def_property_readonly("p", &MiniBatch::p)
      .def_property_readonly("n", &MiniBatch::n);

  py::class_<GroundTruth>(m, "GroundTruth",
                          "Generator-side knowledge: true coefficients, "
                          "per-batch uncorrupted sets, corruption vectors.")
      .def_readonly("beta_star", &GroundTruth::beta_star)
      .def_readonly("uncorrupted_sets", &GroundTruth::uncorrupted_sets)
      .def_readonly("corruption_vectors", &GroundTruth::corruption_vectors);

  py::class_<HrrConfig>(m, "HrrConfig")
      .def(py::init([](double tolerance_eps, int max_iterations, double ridge_fallback) {
             return HrrConfig{tolerance_eps, max_iterations, ridge_fallback};
           }),
           py::arg("tolerance_eps") = 1e-6, py::arg("max_iterations") = 100,
           py::arg("ridge_fallback") = 1e-10)
      .def_readwrite("tolerance_eps", &HrrConfig::tolerance_eps)
      .def_readwrite("max_iterations", &HrrConfig::max_iterations)
      .def_readwrite("ridge_fallback", &HrrConfig::ridge_fallback);

  py::class_<MedianConfig>(m, "MedianConfig")
      .def(py::init([](int max_iterations, double step_tolerance,
                       double singularity_epsilon) {
             return MedianConfig{max_iterations, step_tolerance, singularity_epsilon};
           }),
           py::arg("max_iterations") = 1000, py::arg("step_tolerance") = 1e-10,
           py::arg("singularity_epsilon") = 1e-12)
      .def_readwrite("max_iterations", &MedianConfig::max_iterations)
      .def_readwrite("step_tolerance", &MedianConfig::step_tolerance)
      .def_readwrite("singularity_epsilon", &MedianConfig::singularity_epsilon);

  py::class_<HrrResult>(m, "HrrResult")
      .def_readonly("beta", &HrrResult::beta)
      .def_readonly("uncorrupted", &HrrResult::uncorrupted)
      .def_readonly("iterations", &HrrResult::iterations)
      .def_readonly("converged", &HrrResult::converged);

  py::class_<DominatingSet>(m, "DominatingSet",
                            "Pool positions nearest the pivot; pivot included.")
      .def_readonly("members", &DominatingSet::members)
      .def_readonly("pivot", &DominatingSet::pivot)
      .def("__contains__", &DominatingSet::contains);

  py::class_<EstimatePool>(m, "EstimatePool",
                           "Bounded pool of per-batch estimates in age order.")
      .def(py::init<int>(), py::arg("capacity"))
      .def("append", &EstimatePool::append, py::arg("batch_id"), py::arg("beta"))
      .def("estimate", &EstimatePool::estimate, py::arg("position"))
      .def("batch_id", &EstimatePool::batch_id, py::arg("position"))
      .def("__len__", &EstimatePool::size);

  py::class_<DrlrReport>(m, "DrlrReport")
      .def_readonly("consolidated", &DrlrReport::consolidated)
      .def_readonly("pool", &DrlrReport::pool)
      .def_readonly("dominating", &DrlrReport::dominating)
      .def_readonly("per_batch", &DrlrReport::per_batch)
      .def_readonly("failed_batch_ids", &DrlrReport::failed_batch_ids)
      .def_readonly("fit_seconds", &DrlrReport::fit_seconds)
      .def_readonly("consolidate_seconds", &DrlrReport::consolidate_seconds);

  py::class_<OrlrState>(m, "OrlrState")
      .def_readonly("pool", &OrlrState::pool)
      .def_readonly("dominating", &OrlrState::dominating)
      .def_readonly("next_batch_id", &OrlrState::next_batch_id);

  py::class_<OrlrUpdateResult>(m, "OrlrUpdateResult")
      .def_readonly("consolidated", &OrlrUpdateResult::consolidated)
      .def_readonly("state", &OrlrUpdateResult::state);

  py::class_<UniformRatiosLayout>(m, "UniformRatiosLayout").def(py::init<>());

  py::class_<KHeavyLayout>(m, "KHeavyLayout")
      .def(py::init([](int k, double heavy_ratio, double light_ratio) {
             return KHeavyLayout{k, heavy_ratio, light_ratio};
           }),
           py::arg("k"), py::arg("heavy_ratio") = 0.9, py::arg("light_ratio") = 0.1)
      .def_readwrite("k", &KHeavyLayout::k)
      .def_readwrite("heavy_ratio", &KHeavyLayout::heavy_ratio)
      .def_readwrite("light_ratio", &KHeavyLayout::light_ratio);

  py::class_<SynthSpec>(m, "SynthSpec")
      .def(py::init([](int p, int n, int m, double gamma, double sigma,
                       CorruptionLayout layout, std::uint64_t seed) {
             return SynthSpec{p, n, m, gamma, sigma, std::move(layout), seed};
           }),
           py::arg("p") = 20, py::arg("n") = 1000, py::arg("m") = 10,
           py::arg("gamma") = 0.2, py::arg("sigma") = 0.1,
           py::arg("layout") = CorruptionLayout{UniformRatiosLayout{}},
           py::arg("seed") = 0)
      .def_readwrite("p", &SynthSpec::p)
      .def_readwrite("n", &SynthSpec::n)
      .def_readwrite("m", &SynthSpec::m)
      .def_readwrite("gamma", &SynthSpec::gamma)
      .def_readwrite("sigma", &SynthSpec::sigma)
      .def_readwrite("layout", &SynthSpec::layout)
      .def_readwrite("seed", &SynthSpec::seed);

  m.def("k_heavy_gamma", &k_heavy_gamma, py::arg("layout"), py::arg("n"), py::arg("m"),
        "gamma consistent with a k-heavy layout's exact per-batch counts.");

  m.def(
      "generate",
      [](const SynthSpec& spec, int threads) {
        validate_spec(spec);
        GroundTruth truth = gen_ground_truth(spec);
        std::vector<MiniBatch> batches = gen_batches(spec, truth, threads);
        return std::make_pair(std::move(truth), std::move(batches));
      },
      py::arg("spec"), py::arg("threads") = 0,
      "Synthesize (truth, batches) for the spec. Deterministic under seed.");

  m.def("inject_corruption", &inject_corruption, py::arg("y"), py::arg("ratio"),
        py::arg("seed"),
        "Corrupt a random floor(ratio * n) subset of responses; returns the "
        "modified vector and the chosen positions.");

  m.def("predict", &predict, py::arg("batch"), py::arg("beta"),
        "x.T @ beta for every sample of the batch.");

  m.def("hrr_fit", &hrr_fit, py::arg("batch"), py::arg("config") = HrrConfig{},
        "Alternating hard-thresholding fit of one batch.");

  m.def("drlr_fit", &drlr_fit, py::arg("batches"), py::arg("hrr_config") = HrrConfig{},
        py::arg("median_config") = MedianConfig{}, py::arg("threads") = 0,
        "Fit every batch independently, then robustly consolidate.",
        py::call_guard<py::gil_scoped_release>());

  m.def("orlr_init", &orlr_init, py::arg("batches"), py::arg("capacity"),
        py::arg("hrr_config") = HrrConfig{}, py::arg("median_config") = MedianConfig{},
        py::arg("threads") = 0,
        "Bootstrap the online state from a distributed fit over the initial "
        "batches.",
        py::call_guard<py::gil_scoped_release>());

  m.def("orlr_update", &orlr_update, py::arg("state"), py::arg("new_batch"),
        "Fit the new batch, admit its estimate through the swap rule, and "
        "reconsolidate.");

  m.def("admit_estimate", &admit_estimate, py::arg("state"), py::arg("beta"),
        "Admit an externally computed estimate through the swap rule.");

  m.def("consolidate", &consolidate, py::arg("pool"),
        py::arg("config") = MedianConfig{},
        "Pivot, dominating set, then geometric median of the dominating "
        "members; returns (estimate, dominating_set).");

  m.def("geometric_median", &geometric_median, py::arg("points"),
        py::arg("config") = MedianConfig{},
        "Minimizer of the sum of Euclidean distances to the points.");

  m.def("l2_error", &l2_error, py::arg("estimate"), py::arg("truth"),
        "Euclidean distance between an estimate and the reference.");

  m.def("mae", &mae, py::arg("pred"), py::arg("truth"),
        "Mean absolute deviation between two equal-length vectors.");

  m.def("baseline_ols_avg", &baseline_ols_avg, py::arg("batches"),
        "Mean of the per-batch full-sample least-squares fits.");

  m.def("baseline_hrr_avg", &baseline_hrr_avg, py::arg("batches"),
        py::arg("config") = HrrConfig{}, py::arg("threads") = 0,
        "Mean of the per-batch robust fits.",
        py::call_guard<py::gil_scoped_release>());
}
