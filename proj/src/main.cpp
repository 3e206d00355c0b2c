/**
 * @file main.cpp
 * @brief Command-line front end: `run` executes one configured experiment,
 *        `sweep` drives a parameter sweep. Every config key can be overridden
 *        with a --key=value flag. Exit codes: 0 success, 2 configuration
 *        error, 3 numerical failure, 4 I/O error; failures emit a
 *        machine-readable JSON object on stderr.
 */

#include <cstdio>
#include <exception>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include <nlohmann/json.hpp>

#include "cmfb/config.hpp"
#include "cmfb/errors.hpp"
#include "cmfb/runner.hpp"

namespace {

int fail_with(const char* type, int code, const std::string& message) {
  const nlohmann::json j = {
      {"error", {{"type", type}, {"message", message}, {"exit_code", code}}}};
  std::fprintf(stderr, "%s\n", j.dump().c_str());
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Trajectory-level simulator for continuously measured quantum systems "
      "under P/I/PI feedback: two-qubit remote entanglement stabilization and "
      "harmonic-oscillator state stabilization.\n"
      "Units: hbar = 1. Two-qubit rates and times are expressed in units of "
      "the measurement strength k (k = 1 makes times read in 1/k). Oscillator "
      "times are absolute, with the period T = 2*pi/omega; a trailing 'T' on "
      "a time value means periods (e.g. tau_i=0.5T).\n"
      "Any config key can be overridden by appending --key=value."};
  app.allow_extras();

  std::string run_config, sweep_config;
  CLI::App* cmd_run = app.add_subcommand(
      "run", "Run one configured experiment (time-series CSV + summary JSON)");
  cmd_run->add_option("--config", run_config, "Configuration file (key=value)");
  cmd_run->allow_extras();

  CLI::App* cmd_sweep = app.add_subcommand(
      "sweep", "Sweep one axis (theta, tau_i, tau_p, eta, epsilon) over a value grid");
  cmd_sweep->add_option("--config", sweep_config, "Configuration file (key=value)");
  cmd_sweep->allow_extras();

  app.require_subcommand(1);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return fail_with("config", 2, e.what());
  }

  std::vector<std::string> overrides = app.remaining();
  const bool is_run = cmd_run->parsed();
  {
    const auto sub = is_run ? cmd_run->remaining() : cmd_sweep->remaining();
    overrides.insert(overrides.end(), sub.begin(), sub.end());
  }

  try {
    const cmfb::ExperimentConfig cfg =
        cmfb::parse_config(is_run ? run_config : sweep_config, overrides);
    if (is_run) {
      cmfb::write_run_outputs(cmfb::run_experiment(cfg));
    } else {
      cmfb::write_sweep_outputs(cmfb::run_sweep(cfg));
    }
    return 0;
  } catch (const cmfb::ConfigError& e) {
    return fail_with("config", 2, e.what());
  } catch (const std::invalid_argument& e) {
    return fail_with("config", 2, e.what());
  } catch (const cmfb::NumericalError& e) {
    return fail_with("numerical", 3, e.what());
  } catch (const cmfb::IoError& e) {
    return fail_with("io", 4, e.what());
  } catch (const std::exception& e) {
    return fail_with("internal", 3, e.what());
  }
}
