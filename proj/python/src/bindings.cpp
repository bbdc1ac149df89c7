#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "conjproc/errors.hpp"
#include "conjproc/estimate.hpp"
#include "conjproc/harness.hpp"
#include "conjproc/latent.hpp"
#include "conjproc/measure.hpp"
#include "conjproc/mixing.hpp"
#include "conjproc/observe.hpp"
#include "conjproc/spectral.hpp"

namespace py = pybind11;
using namespace conjproc;

namespace {

py::object to_python(const nlohmann::json& j) {
  return py::module_::import("json").attr("loads")(j.dump());
}

nlohmann::json from_python(const py::object& o) {
  return nlohmann::json::parse(py::module_::import("json").attr("dumps")(o).cast<std::string>());
}

TwoPointLatentConfig latent_config(std::uint64_t seed, std::optional<std::vector<double>> levels) {
  TwoPointLatentConfig c{seed, std::move(levels)};
  c.validate();
  return c;
}

ExperimentConfig experiment_config(const py::dict& overrides, ExperimentConfig base) {
  return ExperimentConfig::from_json(from_python(overrides), std::move(base));
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Conjugate-process simulation and covariance-operator estimation";

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<UsageError>(m, "UsageError", PyExc_ValueError);
  py::register_exception<NumericError>(m, "NumericError", PyExc_ArithmeticError);
  py::register_exception<ResourceError>(m, "ResourceError", PyExc_MemoryError);
  py::register_exception<IoError>(m, "IoError", PyExc_OSError);

  py::class_<Measure>(m, "Measure")
      .def_static("logistic", &Measure::logistic, py::arg("location") = 0.5, py::arg("scale") = 1.0)
      .def_static("gaussian", &Measure::gaussian, py::arg("mean") = 0.5, py::arg("sd") = 1.0)
      .def_static("uniform", &Measure::uniform, py::arg("lower") = 0.0, py::arg("upper") = 1.0)
      .def_property_readonly("name", &Measure::name)
      .def("cdf", &Measure::cdf)
      .def("quantile", &Measure::quantile)
      .def("density", &Measure::density)
      .def("mass", [](const Measure& mu, double a, double b) { return measure_mass(mu, a, b); });

  py::class_<QuadratureGrid>(m, "QuadratureGrid")
      .def(py::init<const Measure&, int>(), py::arg("measure"), py::arg("m"))
      .def_property_readonly("size", &QuadratureGrid::size)
      .def_property_readonly("weight", &QuadratureGrid::weight)
      .def_property_readonly("points", &QuadratureGrid::points)
      .def_property_readonly("measure", &QuadratureGrid::measure)
      .def("mass", &QuadratureGrid::mass)
      .def("integrate", [](const QuadratureGrid& g, const GridFunction& f) { return integrate(f, g); })
      .def("inner_product",
           [](const QuadratureGrid& g, const GridFunction& f, const GridFunction& h) {
             return inner_product(f, h, g);
           });

  py::class_<CovKernelGrid>(m, "CovKernelGrid")
      .def_readonly("grid", &CovKernelGrid::grid)
      .def_readonly("values", &CovKernelGrid::values)
      .def_property_readonly("kind", [](const CovKernelGrid& k) { return std::string(to_string(k.kind)); })
      .def("to_dict", [](const CovKernelGrid& k) { return to_python(k.to_json()); });

  py::class_<Spectrum>(m, "Spectrum")
      .def_readonly("grid", &Spectrum::grid)
      .def_readonly("eigenvalues", &Spectrum::eigenvalues)
      .def_readonly("eigenfunctions", &Spectrum::eigenfunctions)
      .def_readonly("sweeps", &Spectrum::sweeps)
      .def("reconstruct", &reconstruct)
      .def("to_dict", [](const Spectrum& s) { return to_python(s.to_json()); });

  py::class_<FiniteConjugateModel>(m, "FiniteConjugateModel")
      .def(py::init([](std::vector<double> levels, std::vector<double> probs, bool moving_average) {
             FiniteConjugateModel model{std::move(levels), std::move(probs), moving_average};
             if (model.theta_probs.empty()) {
               model.theta_probs.assign(model.theta_levels.size(), 1.0 / model.theta_levels.size());
             }
             model.validate();
             return model;
           }),
           py::arg("theta_levels"), py::arg("theta_probs") = std::vector<double>{},
           py::arg("moving_average") = true)
      .def_static("toy", &FiniteConjugateModel::toy)
      .def_readonly("theta_levels", &FiniteConjugateModel::theta_levels)
      .def_readonly("theta_probs", &FiniteConjugateModel::theta_probs)
      .def("xi_levels", &FiniteConjugateModel::xi_levels);

  m.def(
      "generate_latent",
      [](std::uint64_t seed, long n, std::optional<std::vector<double>> levels) {
        const LatentSequence s = generate_latent(latent_config(seed, std::move(levels)), n);
        std::vector<double> mass(s.size());
        for (std::size_t t = 0; t < s.size(); ++t) mass[t] = s.mass_at_zero(static_cast<long>(t));
        return py::make_tuple(mass, s.theta_draws);
      },
      py::arg("seed"), py::arg("n"), py::arg("theta_levels") = py::none(),
      "Masses ξ_t({0}) for t = 0..n and the underlying θ draws.");

  m.def(
      "simulate_conjugate",
      [](std::uint64_t seed, long n, int q, double q0, std::optional<std::vector<double>> levels) {
        const LatentSequence s =
            generate_latent(latent_config(derive_seed(seed, {stream_tag::kLatent}), std::move(levels)), n - 1);
        return simulate_conjugate(s, CTMCConfig{q0}, SamplingScheme(q), derive_seed(seed, {stream_tag::kObserve}));
      },
      py::arg("seed"), py::arg("n"), py::arg("q") = 1, py::arg("q0") = 10.0, py::arg("theta_levels") = py::none(),
      "Within-cycle samples for cycles 0..n-1, q equally spaced per cycle.");

  m.def(
      "c1_hat",
      [](const std::vector<std::vector<double>>& samples, const QuadratureGrid& grid) {
        const auto cdfs = empirical_cdfs(samples);
        return c1_hat(std::span<const EmpiricalCDF>(cdfs), grid);
      },
      py::arg("samples"), py::arg("grid"));
  m.def(
      "c1_hat_oracle",
      [](std::uint64_t seed, long n, const QuadratureGrid& grid) {
        const LatentSequence s = generate_latent(latent_config(seed, std::nullopt), n - 1);
        return c1_hat(project(std::span<const LatentState>(s.states), grid), grid);
      },
      py::arg("seed"), py::arg("n"), py::arg("grid"), "Ĉ₁ from the exact latent CDFs of cycles 0..n-1.");
  m.def("r_hat", &r_hat, py::arg("c1"));
  m.def("true_c1_grid", &true_c1_grid, py::arg("grid"));
  m.def("true_r_grid", &true_r_grid, py::arg("grid"));
  m.def("hs_norm", &hs_norm, py::arg("kernel"));
  m.def("hs_distance", &hs_distance, py::arg("a"), py::arg("b"));
  m.def(
      "eigendecompose",
      [](const CovKernelGrid& k, double tol, int max_sweeps) {
        return eigendecompose(k, JacobiOptions{tol, max_sweeps});
      },
      py::arg("kernel"), py::arg("tol") = 1e-12, py::arg("max_sweeps") = 100);

  m.def(
      "psi_coefficient",
      [](const FiniteConjugateModel& model, int k, int w, const std::string& which) {
        if (which != "latent" && which != "observed") throw UsageError("which must be 'latent' or 'observed'");
        return psi_coefficient(model, k, w, which == "latent" ? Coordinates::Latent : Coordinates::Observed).value;
      },
      py::arg("model"), py::arg("k"), py::arg("w"), py::arg("which") = "latent");
  m.def(
      "mixing_report",
      [](const FiniteConjugateModel& model, std::vector<int> ks, std::vector<int> ws, int trials,
         std::uint64_t seed) { return to_python(mixing_report(model, ks, ws, trials, seed).to_json(model)); },
      py::arg("model"), py::arg("k_values") = std::vector<int>{1, 2, 3},
      py::arg("w_values") = std::vector<int>{1, 2, 3}, py::arg("trials") = 100, py::arg("seed") = 20240501);

  m.def(
      "run_c1_experiment",
      [](const py::dict& overrides) {
        const ExperimentConfig c = experiment_config(overrides, ExperimentConfig::c1_defaults());
        py::gil_scoped_release release;
        const C1Experiment e = run_c1_experiment(c);
        py::gil_scoped_acquire acquire;
        return to_python(e.summary_json());
      },
      py::arg("config") = py::dict(), "Replicated Ĉ₁(0,0); returns the summary as a dict.");
  m.def(
      "run_rate_experiment",
      [](const py::dict& overrides) {
        const ExperimentConfig c = experiment_config(overrides, ExperimentConfig::rate_defaults());
        py::gil_scoped_release release;
        const RateExperiment r = run_rate_experiment(c);
        py::gil_scoped_acquire acquire;
        return to_python(r.summary_json());
      },
      py::arg("config") = py::dict());
  m.def(
      "fit_rate",
      [](const std::vector<long>& ns, const std::vector<double>& rmse) {
        return to_python(fit_rate(ns, rmse).to_json());
      },
      py::arg("n_values"), py::arg("rmse"));
}
