#pragma once

/**
 * @file config.hpp
 * @brief Experiment configuration: flat key=value files with section headers
 *        ([system], [controller], [ensemble], [output], [sweep]), flag
 *        overrides, defaults, and cross-field validation.
 *
 * Keys are globally unique, so a --key=value flag override never needs a
 * section prefix. Unknown keys and constraint violations raise ConfigError.
 */

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cmfb/ensemble.hpp"

namespace cmfb {

enum class SystemKind { TwoQubit, Oscillator };
enum class FeedbackKind { P, I, PI };
enum class ActuationKind { Xp, XOnly };
enum class SweepAxis { Theta, TauI, TauP, Eta, Epsilon };

/// Drive-compensation policy for x-only actuation.
enum class CompensationMode { Auto, Off, Value };

/// Fully resolved experiment description (defaults filled, constraints
/// checked, delay/filter times rounded to the integration grid).
struct ExperimentConfig {
  SystemKind system = SystemKind::TwoQubit;
  FeedbackKind feedback = FeedbackKind::I;
  ActuationKind actuation = ActuationKind::Xp;  ///< oscillator only

  // Two-qubit model parameters (times in 1/k).
  double h1 = 0.1;
  double h2 = 0.1;

  // Oscillator model parameters (T = 2 pi / omega).
  double mass = 1.0;
  double omega = 1.0;
  double gamma = 0.02;
  double n_bath = 1.0;
  double Xg = 6.0;
  double Pg = 4.0;
  double x0 = 10.0;
  double p0 = 10.0;

  // Shared measurement parameters.
  double k = 1.0;    ///< two-qubit default; oscillator configs use 0.02
  double eta = 0.4;

  // Controller. Exactly one of (alpha_p/alpha_i) or (theta & f_pi) may be
  // given for the two-qubit system; the oscillator derives its gains from the
  // second moments and uses theta only as the x-only PI mixing weight.
  std::optional<double> alpha_p;
  std::optional<double> alpha_i;
  std::optional<double> theta;
  std::optional<double> f_pi;
  double tau_p = 0.0;
  double tau_i = 0.0;
  double epsilon = 0.0;  ///< extra delay beyond tau_p (x-only P robustness)
  CompensationMode compensation = CompensationMode::Auto;
  double compensation_value = 0.0;  ///< used when compensation == Value

  // Ensemble parameters.
  std::size_t n_traj = 2000;
  std::uint64_t base_seed = 12345;
  double dt = 0.01;
  double t_final = 400.0;
  std::size_t output_stride = 0;  ///< 0 = system default (50 / 5)
  std::size_t n_workers = 0;      ///< 0 = hardware concurrency
  double steady_t0 = -1.0;        ///< window start; < 0 = 0.75 * t_final

  // Output paths; empty = CSV skipped / summary printed to stdout.
  std::string csv_path;
  std::string summary_path;

  // Sweep request (used by the sweep driver only).
  std::optional<SweepAxis> sweep_axis;
  std::vector<double> sweep_values;
  std::vector<FeedbackKind> sweep_feedback;  ///< defaults to {feedback}

  // Effective (grid-rounded) delay/filter times, echoed in the summary.
  double tau_p_effective = 0.0;
  double tau_i_effective = 0.0;
  double epsilon_effective = 0.0;

  /// Resolved steady window [steady_t0, t_final].
  std::pair<double, double> steady_window() const;
  /// Resolved output stride (system default when unset).
  std::size_t stride() const;
  /// Oscillator period 2 pi / omega.
  double period() const;
};

/// Parse configuration text (file contents) plus key=value override strings.
/// Overrides are applied after the text, last occurrence wins.
ExperimentConfig parse_config_text(const std::string& text,
                                   const std::vector<std::string>& overrides = {});

/// Read the file at path and delegate to parse_config_text. A missing or
/// unreadable file raises IoError. An empty path parses overrides alone.
ExperimentConfig parse_config(const std::string& path,
                              const std::vector<std::string>& overrides = {});

/// Set the swept field to value and refresh the grid-rounded echoes
/// (silently; the parser's rounding warning fired once already).
void apply_axis_value(ExperimentConfig& cfg, SweepAxis axis, double value);

/// Map the scenario onto the simulation types.
TwoQubitScenario to_twoqubit_scenario(const ExperimentConfig& cfg);
OscillatorScenario to_oscillator_scenario(const ExperimentConfig& cfg);

const char* to_string(SystemKind v);
const char* to_string(FeedbackKind v);
const char* to_string(ActuationKind v);
const char* to_string(SweepAxis v);

}  // namespace cmfb
