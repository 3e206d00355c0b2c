/**
 * @file bindings.cpp
 * @brief Python module exposing the main simulator operations: configured
 *        ensemble runs and sweeps (same config text as the CLI), the
 *        concurrence measure, and the frozen analytic references used by the
 *        acceptance suite.
 */

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "cmfb/config.hpp"
#include "cmfb/errors.hpp"
#include "cmfb/oscillator.hpp"
#include "cmfb/quantum.hpp"
#include "cmfb/runner.hpp"
#include "cmfb/twoqubit.hpp"

namespace py = pybind11;

namespace {

py::dict run_to_dict(const cmfb::RunResult& r) {
  py::dict d;
  d["system"] = cmfb::to_string(r.cfg.system);
  d["feedback"] = cmfb::to_string(r.cfg.feedback);
  d["times"] = r.stats.times;
  d["observables"] = r.stats.observables;
  d["mean"] = r.stats.mean;
  d["std_dev"] = r.stats.std_dev;
  d["steady_window"] = r.stats.steady_window;
  d["steady_max_std"] = r.steady_max_std;
  d["reducer_mean"] = r.reducer_mean;
  d["reducer_se"] = r.reducer_se;
  d["delta_metric"] = r.delta_metric;
  d["delta_se"] = r.delta_se;
  d["bias_X"] = r.bias_X;
  d["bias_P"] = r.bias_P;
  d["compensation_alpha"] = r.compensation_alpha;
  d["analytic_T0"] = r.analytic_T0;
  d["positivity_warnings"] = r.positivity_warnings;
  d["summary_json"] = cmfb::summary_json(r);
  return d;
}

py::dict sweep_to_dict(const cmfb::SweepResult& s) {
  py::dict d;
  d["axis"] = cmfb::to_string(s.axis);
  d["theta_opt"] = s.theta_opt;
  py::list points;
  for (const cmfb::SweepPoint& p : s.points) {
    py::dict row;
    row["value"] = p.value;
    row["feedback"] = cmfb::to_string(p.feedback);
    row["steady_max_std"] = p.result.steady_max_std;
    row["reducer_mean"] = p.result.reducer_mean;
    row["reducer_se"] = p.result.reducer_se;
    row["delta_metric"] = p.result.delta_metric;
    row["delta_se"] = p.result.delta_se;
    row["bias_X"] = p.result.bias_X;
    row["bias_P"] = p.result.bias_P;
    points.append(row);
  }
  d["points"] = points;
  return d;
}

}  // namespace

PYBIND11_MODULE(_cmfb, m) {
  m.doc() =
      "Trajectory-level simulation of continuously measured quantum systems "
      "under proportional-integral feedback.";

  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const cmfb::ConfigError& e) {
      PyErr_SetString(PyExc_ValueError, e.what());
    } catch (const cmfb::IoError& e) {
      PyErr_SetString(PyExc_OSError, e.what());
    }
  });

  m.def(
      "run",
      [](const std::string& config_text, const std::vector<std::string>& overrides) {
        cmfb::ExperimentConfig cfg;
        {
          py::gil_scoped_release release;
          cfg = cmfb::parse_config_text(config_text, overrides);
        }
        cmfb::RunResult r;
        {
          py::gil_scoped_release release;
          r = cmfb::run_experiment(cfg);
        }
        return run_to_dict(r);
      },
      py::arg("config_text"), py::arg("overrides") = std::vector<std::string>{},
      "Run one configured ensemble (same config text and key=value overrides "
      "as the CLI) and return the statistics and summary metrics as a dict.");

  m.def(
      "sweep",
      [](const std::string& config_text, const std::vector<std::string>& overrides) {
        cmfb::ExperimentConfig cfg;
        {
          py::gil_scoped_release release;
          cfg = cmfb::parse_config_text(config_text, overrides);
        }
        cmfb::SweepResult s;
        {
          py::gil_scoped_release release;
          s = cmfb::run_sweep(cfg);
        }
        return sweep_to_dict(s);
      },
      py::arg("config_text"), py::arg("overrides") = std::vector<std::string>{},
      "Run the sweep described by the config's [sweep] section with common "
      "random numbers across grid points; returns per-point summaries.");

  m.def("concurrence", &cmfb::concurrence, py::arg("rho"),
        "Concurrence of a two-qubit density matrix in the computational "
        "basis (4x4 complex, Hermitian, unit trace).");

  m.def("collective_to_computational", &cmfb::collective_to_computational,
        py::arg("rho"),
        "Change of basis from the collective ordering {T1, T0, T-1, S} to the "
        "computational product basis.");

  m.def(
      "analytic_T0_steady",
      [](double h, double k, double eta, double alpha_p) {
        return cmfb::analytic_T0_steady(cmfb::TwoQubitModel(h, h, k, eta), alpha_p);
      },
      py::arg("h"), py::arg("k"), py::arg("eta"), py::arg("alpha_p"),
      "Closed-form steady target-state population for deterministic "
      "proportional feedback with equal qubit splittings.");

  m.def(
      "oscillator_steady",
      [](double m_, double omega, double gamma, double n_bath, double k, double eta,
         double dt, double t_final) {
        cmfb::OscillatorModel md;
        md.m = m_;
        md.omega = omega;
        md.gamma = gamma;
        md.n_bath = n_bath;
        md.k = k;
        md.eta = eta;
        cmfb::SecondMomentTable table;
        double alpha = 0.0;
        {
          py::gil_scoped_release release;
          const double step = dt > 0.0 ? dt : md.period() / 250.0;
          table = cmfb::second_moments_evolve(md, {0.5, 0.5, 0.0}, step, t_final);
          alpha = cmfb::compensation_factor(md, table);
        }
        py::dict d;
        d["Vs"] = table.Vs;
        d["Vps"] = table.Vps;
        d["Cs"] = table.Cs;
        d["converged"] = table.converged;
        d["compensation_alpha"] = alpha;
        return d;
      },
      py::arg("m") = 1.0, py::arg("omega") = 1.0, py::arg("gamma") = 0.02,
      py::arg("n_bath") = 1.0, py::arg("k") = 0.02, py::arg("eta") = 0.4,
      py::arg("dt") = 0.0, py::arg("t_final") = 400.0,
      "Integrate the conditional second-moment flow to steady state and "
      "return the steady variances plus the x-only drive compensation "
      "factor. dt <= 0 selects one 1/250th of the oscillator period.");
}
