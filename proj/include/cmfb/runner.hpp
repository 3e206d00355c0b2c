#pragma once

/**
 * @file runner.hpp
 * @brief Experiment orchestration: run one configured ensemble (or a sweep),
 *        reduce the steady window, and emit the CSV/JSON artifacts.
 */

#include <limits>
#include <string>
#include <vector>

#include "cmfb/config.hpp"
#include "cmfb/ensemble.hpp"

namespace cmfb {

/// One complete experiment outcome. NaN marks metrics that do not apply to
/// the configured system (e.g. delta_metric for the two-qubit case).
struct RunResult {
  ExperimentConfig cfg;  ///< effective configuration (echoed verbatim)
  EnsembleStats stats;
  double steady_max_std = 0.0;  ///< max window std over all observables

  /// Per-trajectory window reduction: mean concurrence for the two-qubit
  /// system, the quadratic error form q = (m w X~^2 + P~^2/(m w))/2 for the
  /// oscillator; reducer_se is the standard error over trajectories.
  double reducer_mean = std::numeric_limits<double>::quiet_NaN();
  double reducer_se = std::numeric_limits<double>::quiet_NaN();

  // Oscillator-only summary metrics.
  double delta_metric = std::numeric_limits<double>::quiet_NaN();
  double delta_se = std::numeric_limits<double>::quiet_NaN();
  double bias_X = std::numeric_limits<double>::quiet_NaN();
  double bias_P = std::numeric_limits<double>::quiet_NaN();
  double compensation_alpha = std::numeric_limits<double>::quiet_NaN();

  // Two-qubit-only summary metrics.
  double analytic_T0 = std::numeric_limits<double>::quiet_NaN();
  std::uint64_t positivity_warnings = 0;
};

/// Run the configured ensemble and reduce it. Throws ConfigError /
/// NumericalError on the corresponding failures.
RunResult run_experiment(const ExperimentConfig& cfg);

/// Time-series CSV (schema fixed per system, 9 significant digits).
std::string timeseries_csv(const RunResult& r);

/// Summary JSON text (keys: effective_config, steady_window, steady_means,
/// steady_max_std, plus the applicable optional metrics).
std::string summary_json(const RunResult& r);

/// One sweep grid point.
struct SweepPoint {
  double value = 0.0;
  FeedbackKind feedback = FeedbackKind::P;
  RunResult result;
};

/// Sweep outcome over cfg.sweep_values x cfg.sweep_feedback.
struct SweepResult {
  ExperimentConfig base;
  SweepAxis axis = SweepAxis::Theta;
  std::vector<SweepPoint> points;
  /// theta sweeps: argmax of steady concurrence (two-qubit) or argmin of the
  /// error metric (oscillator); NaN for other axes.
  double theta_opt = std::numeric_limits<double>::quiet_NaN();
};

/// Run every grid point with the same base seed (common random numbers, so
/// neighboring points differ by the parameter and not by the noise draw).
SweepResult run_sweep(const ExperimentConfig& cfg);

/// Per-point summary table CSV (schema fixed per system).
std::string sweep_csv(const SweepResult& r);

/// Sweep summary JSON (effective_config, axis, values, rows, theta_opt).
std::string sweep_summary_json(const SweepResult& r);

/// Write the configured artifacts: CSV when cfg.csv_path is set, summary
/// JSON to cfg.summary_path or stdout. Throws IoError on write failure.
void write_run_outputs(const RunResult& r);
void write_sweep_outputs(const SweepResult& r);

}  // namespace cmfb
