// Python bindings for the core simulation and analysis operations.

#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "lgt/errors.hpp"
#include "lgt/experiment.hpp"
#include "lgt/observables.hpp"
#include "lgt/oracle.hpp"
#include "lgt/sampler.hpp"
#include "lgt/stats.hpp"

namespace py = pybind11;
using namespace lgt;

namespace {

Site make_site(const std::vector<int>& coords) {
  if (coords.size() > kMaxDims)
    throw usage_error("site: too many coordinates");
  Site s;
  for (std::size_t i = 0; i < coords.size(); ++i) s.c[i] = coords[i];
  return s;
}

}  // namespace

PYBIND11_MODULE(_lgt, m) {
  m.doc() = "Lattice gauge theory Monte Carlo engine (compact groups "
            "Z2, U(1), SU(2), SU(3))";

  py::register_exception<usage_error>(m, "UsageError", PyExc_ValueError);
  py::register_exception<numerical_error>(m, "NumericalError", PyExc_ArithmeticError);

  py::enum_<Group>(m, "Group")
      .value("Z2", Group::Z2)
      .value("U1", Group::U1)
      .value("SU2", Group::SU2)
      .value("SU3", Group::SU3);
  py::enum_<Boundary>(m, "Boundary")
      .value("Periodic", Boundary::Periodic)
      .value("Open", Boundary::Open);
  py::enum_<Algorithm>(m, "Algorithm")
      .value("Metropolis", Algorithm::Metropolis)
      .value("Heatbath", Algorithm::Heatbath)
      .value("OverrelaxMix", Algorithm::OverrelaxMix);

  m.def("group_from_name", &group_from_name);
  m.def("matrix_order", &matrix_order);

  py::class_<Lattice, std::shared_ptr<Lattice>>(m, "Lattice")
      .def(py::init<int, const std::vector<int>&, Boundary>(), py::arg("ndims"),
           py::arg("extents"), py::arg("boundary") = Boundary::Periodic)
      .def_property_readonly("ndims", &Lattice::ndims)
      .def_property_readonly("n_sites", &Lattice::n_sites)
      .def_property_readonly("n_links", &Lattice::n_links)
      .def_property_readonly("n_plaquettes", &Lattice::n_plaquettes)
      .def("extent", &Lattice::extent);

  py::class_<LoopSpec>(m, "LoopSpec")
      .def(py::init([](const std::vector<int>& start, std::vector<int> steps) {
             LoopSpec s;
             s.start = make_site(start);
             s.steps = std::move(steps);
             return s;
           }),
           py::arg("start"), py::arg("steps"));

  py::class_<Configuration>(m, "Configuration")
      .def_property_readonly("group", &Configuration::group)
      .def("link", [](const Configuration& c, std::int64_t ord) {
        return Eigen::MatrixXcd(c.link(ord));
      });

  m.def("cold_start",
        [](std::shared_ptr<Lattice> lat, Group g) {
          return cold_start(std::move(lat), g);
        },
        py::arg("lattice"), py::arg("group"));
  m.def("hot_start",
        [](std::shared_ptr<Lattice> lat, Group g, std::uint64_t seed) {
          return hot_start(std::move(lat), g, seed);
        },
        py::arg("lattice"), py::arg("group"), py::arg("seed"));
  m.def("wilson_action", &wilson_action);
  m.def("plaquette_average", &plaquette_average);
  m.def("wilson_loop", &wilson_loop);
  m.def("rectangular_loop",
        [](const Lattice& lat, const std::vector<int>& origin, int mu, int nu,
           int R, int T) {
          return lat.rectangular_loop(make_site(origin), mu, nu, R, T);
        },
        py::arg("lattice"), py::arg("origin"), py::arg("mu"), py::arg("nu"),
        py::arg("R"), py::arg("T"));

  py::class_<SamplerParams>(m, "SamplerParams")
      .def(py::init<>())
      .def_readwrite("beta", &SamplerParams::beta)
      .def_readwrite("algorithm", &SamplerParams::algorithm)
      .def_readwrite("proposal_spread", &SamplerParams::proposal_spread)
      .def_readwrite("or_ratio", &SamplerParams::or_ratio)
      .def_readwrite("seed", &SamplerParams::seed)
      .def_readwrite("workers", &SamplerParams::workers);

  m.def("run_chain",
        [](Configuration& cfg, const SamplerParams& params, std::int64_t n_sweeps,
           std::int64_t cadence, const std::function<void(std::uint64_t, double)>& on_plaquette,
           std::uint64_t first_sweep) {
          MeasureHook hook;
          if (on_plaquette)
            hook = [&](const Configuration& c, std::uint64_t sweep) {
              on_plaquette(sweep, plaquette_average(c));
            };
          ChainStats s = run_chain(cfg, params, n_sweeps, cadence, hook, first_sweep);
          return py::make_tuple(s.sweeps, s.mean_acceptance);
        },
        py::arg("cfg"), py::arg("params"), py::arg("n_sweeps"),
        py::arg("cadence") = 0, py::arg("on_plaquette") = nullptr,
        py::arg("first_sweep") = 0);

  m.def("jackknife_mean_error",
        [](const std::vector<double>& v, int bin_size) {
          Jackknife jk = jackknife_mean_error(v, bin_size);
          return py::make_tuple(jk.mean, jk.error);
        },
        py::arg("values"), py::arg("bin_size") = 1);
  m.def("integrated_autocorrelation_time", [](const std::vector<double>& v) {
    TauInt t = integrated_autocorrelation_time(v);
    return py::make_tuple(t.tau, t.error, t.converged);
  });

  m.def("single_plaquette_expectation", &single_plaquette_expectation);
  m.def("two_dim_exact_loop", &two_dim_exact_loop);
  m.def("strong_coupling_leading", &strong_coupling_leading);
  m.def("exact_tiny_plaquette_mean", [](const Lattice& lat, double beta) {
    return exact_tiny_lattice(lat, beta, [](const Configuration& c) {
      return plaquette_average(c);
    });
  });

  py::class_<ExperimentConfig>(m, "ExperimentConfig")
      .def_static("parse_file", &ExperimentConfig::parse_file)
      .def("validate", &ExperimentConfig::validate)
      .def_property_readonly("output_dir",
                             [](const ExperimentConfig& c) { return c.output_dir; });
  m.def("run_experiment",
        [](const ExperimentConfig& c, const std::filesystem::path& resume) {
          RunOutcome o = run_experiment(c, resume);
          return py::make_tuple(o.dir, o.sweeps_done, o.finished);
        },
        py::arg("config"), py::arg("resume") = std::filesystem::path());
  m.def("scan_experiment", &scan_experiment);
  m.def("write_report", &write_report);
}
