#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "floqspec/correlations.hpp"
#include "floqspec/dpo.hpp"
#include "floqspec/errors.hpp"
#include "floqspec/floquet.hpp"
#include "floqspec/sampled_system.hpp"
#include "floqspec/spectra.hpp"

namespace py = pybind11;
namespace fs = floqspec;

namespace {

fs::IntegrationTolerances tolerances(double rel, double abs) {
  fs::IntegrationTolerances t{rel, abs};
  t.validate();
  return t;
}

fs::DetectionMode detection(int kd, double tr) {
  if (kd < 0) throw fs::ConfigError("kd", "must be non-negative");
  if (kd == 0) return fs::InfiniteDetection{};
  return fs::FiniteDetection{kd, tr};
}

// Python callables are only entered with the GIL held; the generic-system
// entry points below never release it and never spawn workers.
fs::PeriodicLinearSystem python_system(std::size_t dimension, std::size_t noise_count, double period,
                                       const std::function<fs::CMatrix(double)>& drift,
                                       const std::function<fs::CMatrix(double)>& noise,
                                       const fs::CMatrix& g, std::vector<double> breakpoints) {
  fs::PeriodicLinearSystem system(dimension, noise_count, period, drift, noise, g, std::move(breakpoints));
  system.set_description("python callables");
  system.validate();
  return system;
}

py::dict table_dict(const fs::SpectralCovarianceTable& table) {
  const auto n = static_cast<py::ssize_t>(table.size());
  py::array_t<double> omega(n), v(std::vector<py::ssize_t>{n, 2, 2}), v1(n), v2(n), det(n), db(n), residue(n);
  auto o = omega.mutable_unchecked<1>();
  auto m = v.mutable_unchecked<3>();
  auto a = v1.mutable_unchecked<1>();
  auto b = v2.mutable_unchecked<1>();
  auto d = det.mutable_unchecked<1>();
  auto s = db.mutable_unchecked<1>();
  auto r = residue.mutable_unchecked<1>();
  for (py::ssize_t i = 0; i < n; ++i) {
    const auto& p = table[static_cast<std::size_t>(i)];
    o(i) = p.omega;
    for (int j = 0; j < 2; ++j)
      for (int k = 0; k < 2; ++k) m(i, j, k) = p.covariance(j, k);
    a(i) = p.v1;
    b(i) = p.v2;
    d(i) = p.determinant;
    s(i) = p.v2_db;
    r(i) = p.imaginary_residue;
  }
  py::dict out;
  out["omega"] = omega;
  out["V"] = v;
  out["V1"] = v1;
  out["V2"] = v2;
  out["detV"] = det;
  out["V2_dB"] = db;
  out["imaginary_residue"] = residue;
  return out;
}

py::dict decomposition_dict(const fs::FloquetDecomposition& d) {
  py::dict out;
  out["exponents"] = d.exponents();
  out["multipliers"] = d.multipliers();
  out["modes"] = d.modes();
  out["monodromy"] = d.monodromy();
  out["mode_condition"] = d.mode_condition();
  out["max_growth_rate"] = d.max_growth_rate();
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Floquet spectra of periodically driven linear Langevin systems";

  auto error = py::register_exception<fs::Error>(m, "FloqspecError", PyExc_RuntimeError);
  py::register_exception<fs::ConfigError>(m, "ConfigError", error.ptr());
  py::register_exception<fs::UnstableSystemError>(m, "UnstableSystemError", error.ptr());
  py::register_exception<fs::IntegrationError>(m, "IntegrationError", error.ptr());
  py::register_exception<fs::NonDiagonalizableError>(m, "NonDiagonalizableError", error.ptr());
  py::register_exception<fs::QuadratureError>(m, "QuadratureError", error.ptr());

  m.def(
      "dpo_spectral_covariance",
      [](double q, double sigma, const std::vector<double>& omegas, const std::string& mode, int kd, double tr,
         unsigned threads, double rel, double abs) {
        fs::SpectralCovarianceTable table;
        {
          py::gil_scoped_release release;
          table = fs::spectral_covariance({q, sigma}, fs::parse_dpo_mode(mode), omegas, tolerances(rel, abs),
                                          threads, detection(kd, tr));
        }
        return table_dict(table);
      },
      py::arg("Q"), py::arg("sigma"), py::arg("omegas"), py::arg("mode") = "full", py::arg("kd") = 0,
      py::arg("tr") = 0.0, py::arg("threads") = 1, py::arg("tol_rel") = 1e-10, py::arg("tol_abs") = 1e-12);

  m.def(
      "rwa_closed_form",
      [](double sigma, double omega) {
        const auto v = fs::rwa_closed_form(sigma, omega);
        return py::make_tuple(v.v1, v.v2);
      },
      py::arg("sigma"), py::arg("omega"));

  m.def(
      "find_instability",
      [](double q, const std::string& mode) { return fs::find_instability(q, fs::parse_dpo_mode(mode)); },
      py::arg("Q"), py::arg("mode") = "full", py::call_guard<py::gil_scoped_release>());

  m.def(
      "find_optimal_squeezing",
      [](double q, const std::string& mode) {
        fs::OptimalSqueezing opt;
        {
          py::gil_scoped_release release;
          opt = fs::find_optimal_squeezing(q, fs::parse_dpo_mode(mode));
        }
        py::dict out;
        out["sigma_opt"] = opt.sigma;
        out["V2"] = opt.v2;
        out["V2_dB"] = opt.v2_db;
        out["sigma_ins"] = opt.sigma_instability;
        return out;
      },
      py::arg("Q"), py::arg("mode") = "full");

  py::class_<fs::PeriodicLinearSystem>(m, "PeriodicLinearSystem")
      .def(py::init(&python_system), py::arg("dimension"), py::arg("noise_count"), py::arg("period"),
           py::arg("drift"), py::arg("noise"), py::arg("G"), py::arg("breakpoints") = std::vector<double>{})
      .def_static("dpo",
                  [](double q, double sigma, const std::string& mode) {
                    return fs::build_dpo_system({q, sigma}, fs::parse_dpo_mode(mode));
                  },
                  py::arg("Q"), py::arg("sigma"), py::arg("mode") = "full")
      .def_static("load", &fs::load_sampled_system, py::arg("path"))
      .def_property_readonly("dimension", &fs::PeriodicLinearSystem::dimension)
      .def_property_readonly("noise_count", &fs::PeriodicLinearSystem::noise_count)
      .def_property_readonly("period", &fs::PeriodicLinearSystem::period)
      .def_property_readonly("description", &fs::PeriodicLinearSystem::description)
      .def("drift", &fs::PeriodicLinearSystem::drift, py::arg("t"))
      .def("noise_matrix", &fs::PeriodicLinearSystem::noise_matrix, py::arg("t"))
      .def_property_readonly("G", &fs::PeriodicLinearSystem::noise_correlation);

  m.def(
      "decompose",
      [](const fs::PeriodicLinearSystem& system, double rel, double abs) {
        return decomposition_dict(fs::FloquetDecomposition::build(system, tolerances(rel, abs)));
      },
      py::arg("system"), py::arg("tol_rel") = 1e-10, py::arg("tol_abs") = 1e-12);

  m.def(
      "correlation",
      [](const fs::PeriodicLinearSystem& system, const std::vector<std::pair<double, double>>& pairs, double rel,
         double abs) {
        const auto kernel = fs::NoiseKernel::build(fs::FloquetDecomposition::build(system, tolerances(rel, abs)),
                                                   tolerances(rel, abs));
        std::vector<fs::CMatrix> out;
        for (const auto& [t, tp] : pairs) out.push_back(fs::fluctuation_correlation(kernel, t, tp));
        return out;
      },
      py::arg("system"), py::arg("pairs"), py::arg("tol_rel") = 1e-10, py::arg("tol_abs") = 1e-12);

  m.def(
      "fluctuation_spectrum",
      [](const fs::PeriodicLinearSystem& system, const std::vector<double>& omegas, int kd, double tr, double rel,
         double abs) {
        const auto kernel = fs::NoiseKernel::build(fs::FloquetDecomposition::build(system, tolerances(rel, abs)),
                                                   tolerances(rel, abs));
        return fs::fluctuation_spectrum(kernel, omegas, detection(kd, tr), tolerances(rel, abs));
      },
      py::arg("system"), py::arg("omegas"), py::arg("kd") = 0, py::arg("tr") = 0.0, py::arg("tol_rel") = 1e-10,
      py::arg("tol_abs") = 1e-12);
}
