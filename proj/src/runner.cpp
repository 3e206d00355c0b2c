/**
 * @file runner.cpp
 * @brief Experiment orchestration and artifact emission.
 */

#include "cmfb/runner.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <memory>

#include <nlohmann/json.hpp>

#include "cmfb/errors.hpp"
#include "cmfb/twoqubit.hpp"

namespace cmfb {

namespace {

using nlohmann::json;

std::string fmt9(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

EnsembleConfig ensemble_config(const ExperimentConfig& cfg,
                               const TrajectoryProducer& producer) {
  EnsembleConfig ec;
  ec.n_traj = cfg.n_traj;
  ec.base_seed = cfg.base_seed;
  ec.dt = cfg.dt;
  ec.t_final = cfg.t_final;
  ec.output_stride = cfg.stride();
  ec.observables = producer.observable_names();
  ec.n_workers = cfg.n_workers;
  return ec;
}

/// Rows of the output grid inside the steady window.
std::vector<std::size_t> window_rows(const TrajectoryProducer& producer,
                                     std::pair<double, double> window) {
  std::vector<std::size_t> rows;
  for (std::size_t r = 0; r < producer.rows(); ++r) {
    const double t = producer.row_time(r);
    if (t >= window.first - 1e-9 && t <= window.second + 1e-9) rows.push_back(r);
  }
  if (rows.empty()) throw ConfigError("steady window contains no output rows");
  return rows;
}

void finish_common(RunResult& out, std::pair<double, double> window) {
  out.stats.steady_window = window;
  out.stats.steady_summary = steady_window_summary(out.stats, window);
  out.steady_max_std = 0.0;
  for (const SteadySummary& s : out.stats.steady_summary)
    out.steady_max_std = std::max(out.steady_max_std, s.max_std);
  if (!out.stats.traj_scalars.empty()) {
    const auto [m, sd] = aggregate(out.stats.traj_scalars);
    out.reducer_mean = m;
    out.reducer_se =
        out.stats.traj_scalars.size() > 1
            ? sd / std::sqrt(static_cast<double>(out.stats.traj_scalars.size()))
            : 0.0;
  }
}

RunResult run_twoqubit(const ExperimentConfig& cfg) {
  const TwoQubitScenario sc = to_twoqubit_scenario(cfg);
  const TwoQubitTrajectoryProducer producer(sc);
  const auto window = cfg.steady_window();
  const auto rows = window_rows(producer, window);

  // Per-trajectory steady concurrence (observable index 3).
  const TrajectoryReducer reducer = [rows](const double* data, std::size_t,
                                           std::size_t obs) {
    double acc = 0.0;
    for (const std::size_t r : rows) acc += data[r * obs + 3];
    return acc / static_cast<double>(rows.size());
  };

  RunResult out;
  out.cfg = cfg;
  out.stats = run_ensemble(producer, ensemble_config(cfg, producer), reducer);
  finish_common(out, window);
  out.positivity_warnings = producer.positivity_warnings();
  if (cfg.feedback == FeedbackKind::P && cfg.tau_p_effective == 0.0)
    out.analytic_T0 = analytic_T0_steady(sc.model, sc.ctrl.alpha_p);
  return out;
}

RunResult run_oscillator(const ExperimentConfig& cfg) {
  const OscillatorScenario sc = to_oscillator_scenario(cfg);
  const OscillatorTrajectoryProducer producer(sc);
  const auto window = cfg.steady_window();
  const auto rows = window_rows(producer, window);

  // Per-trajectory steady quadratic error against the true targets.
  const double mw = cfg.mass * cfg.omega;
  const double Xg = cfg.Xg, Pg = cfg.Pg;
  const TrajectoryReducer reducer = [rows, mw, Xg, Pg](const double* data,
                                                       std::size_t,
                                                       std::size_t obs) {
    double acc = 0.0;
    for (const std::size_t r : rows) {
      const double dx = data[r * obs] - Xg;
      const double dp = data[r * obs + 1] - Pg;
      acc += 0.5 * (mw * dx * dx + dp * dp / mw);
    }
    return acc / static_cast<double>(rows.size());
  };

  RunResult out;
  out.cfg = cfg;
  out.stats = run_ensemble(producer, ensemble_config(cfg, producer), reducer);
  finish_common(out, window);

  out.delta_metric = std::sqrt(std::max(out.reducer_mean, 0.0));
  out.delta_se = out.delta_metric > 1e-12 ? out.reducer_se / (2.0 * out.delta_metric)
                                          : out.reducer_se;
  out.bias_X = out.stats.steady_summary[0].mean - cfg.Xg;
  out.bias_P = out.stats.steady_summary[1].mean - cfg.Pg;
  if (cfg.actuation == ActuationKind::XOnly) {
    out.compensation_alpha = cfg.compensation == CompensationMode::Value
                                 ? cfg.compensation_value
                                 : producer.plan().alpha();
  }
  return out;
}

json config_json(const ExperimentConfig& cfg) {
  json model;
  if (cfg.system == SystemKind::TwoQubit) {
    model = {{"h1", cfg.h1}, {"h2", cfg.h2}, {"k", cfg.k}, {"eta", cfg.eta}};
  } else {
    model = {{"mass", cfg.mass}, {"omega", cfg.omega}, {"gamma", cfg.gamma},
             {"n_bath", cfg.n_bath}, {"k", cfg.k}, {"eta", cfg.eta},
             {"Xg", cfg.Xg}, {"Pg", cfg.Pg}, {"x0", cfg.x0}, {"p0", cfg.p0},
             {"period", cfg.period()}};
  }

  json controller = {{"feedback", to_string(cfg.feedback)},
                     {"tau_p", cfg.tau_p},
                     {"tau_p_effective", cfg.tau_p_effective},
                     {"tau_i", cfg.tau_i},
                     {"tau_i_effective", cfg.tau_i_effective}};
  if (cfg.system == SystemKind::Oscillator) {
    controller["actuation"] = to_string(cfg.actuation);
    controller["epsilon"] = cfg.epsilon;
    controller["epsilon_effective"] = cfg.epsilon_effective;
    switch (cfg.compensation) {
      case CompensationMode::Auto: controller["compensation"] = "auto"; break;
      case CompensationMode::Off: controller["compensation"] = "off"; break;
      case CompensationMode::Value: controller["compensation"] = cfg.compensation_value; break;
    }
    if (cfg.theta.has_value()) controller["theta"] = *cfg.theta;
  } else {
    if (cfg.theta.has_value()) {
      controller["theta"] = *cfg.theta;
      controller["f_pi"] = *cfg.f_pi;
      const auto [ap, ai] = from_mixing(*cfg.theta, *cfg.f_pi);
      controller["alpha_p"] = ap;
      controller["alpha_i"] = ai;
    } else {
      controller["alpha_p"] = cfg.alpha_p.value_or(0.0);
      controller["alpha_i"] = cfg.alpha_i.value_or(0.0);
    }
  }

  const json ensemble = {{"n_traj", cfg.n_traj},
                         {"base_seed", cfg.base_seed},
                         {"dt", cfg.dt},
                         {"t_final", cfg.t_final},
                         {"output_stride", cfg.stride()},
                         {"n_workers", cfg.n_workers},
                         {"steady_t0", cfg.steady_window().first}};
  return {{"system", to_string(cfg.system)},
          {"model", model},
          {"controller", controller},
          {"ensemble", ensemble},
          {"output", {{"csv", cfg.csv_path}, {"summary", cfg.summary_path}}}};
}

json steady_means_json(const RunResult& r) {
  json means = json::object();
  for (std::size_t j = 0; j < r.stats.observables.size(); ++j)
    means[r.stats.observables[j]] = r.stats.steady_summary[j].mean;
  return means;
}

json point_json(const SweepPoint& p) {
  json row = {{"value", p.value},
              {"feedback", to_string(p.feedback)},
              {"steady_means", steady_means_json(p.result)},
              {"steady_max_std", p.result.steady_max_std}};
  if (p.result.cfg.system == SystemKind::TwoQubit) {
    row["steady_concurrence"] = p.result.reducer_mean;
    row["concurrence_se"] = p.result.reducer_se;
  } else {
    row["delta_metric"] = p.result.delta_metric;
    row["delta_se"] = p.result.delta_se;
    row["bias_X"] = p.result.bias_X;
    row["bias_P"] = p.result.bias_P;
  }
  return row;
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open output file '" + path + "'");
  out << text;
  out.flush();
  if (!out) throw IoError("error writing output file '" + path + "'");
}

}  // namespace

RunResult run_experiment(const ExperimentConfig& cfg) {
  if (cfg.system == SystemKind::TwoQubit) return run_twoqubit(cfg);
  return run_oscillator(cfg);
}

std::string timeseries_csv(const RunResult& r) {
  std::string out;
  const EnsembleStats& s = r.stats;
  if (r.cfg.system == SystemKind::TwoQubit) {
    out = "t,mean_Tm1,mean_T0,mean_T1,mean_concurrence,std_concurrence\n";
    for (std::size_t row = 0; row < s.times.size(); ++row) {
      out += fmt9(s.times[row]) + ',' + fmt9(s.mean[0][row]) + ',' +
             fmt9(s.mean[1][row]) + ',' + fmt9(s.mean[2][row]) + ',' +
             fmt9(s.mean[3][row]) + ',' + fmt9(s.std_dev[3][row]) + '\n';
    }
  } else {
    out = "t,mean_X,mean_P,std_X,std_P,single_traj_X,single_traj_P\n";
    for (std::size_t row = 0; row < s.times.size(); ++row) {
      out += fmt9(s.times[row]) + ',' + fmt9(s.mean[0][row]) + ',' +
             fmt9(s.mean[1][row]) + ',' + fmt9(s.std_dev[0][row]) + ',' +
             fmt9(s.std_dev[1][row]) + ',' + fmt9(s.traj0[0][row]) + ',' +
             fmt9(s.traj0[1][row]) + '\n';
    }
  }
  return out;
}

std::string summary_json(const RunResult& r) {
  json j = {{"effective_config", config_json(r.cfg)},
            {"steady_window", {r.stats.steady_window.first, r.stats.steady_window.second}},
            {"steady_means", steady_means_json(r)},
            {"steady_max_std", r.steady_max_std}};
  if (r.cfg.system == SystemKind::TwoQubit) {
    j["steady_concurrence"] = r.reducer_mean;
    j["concurrence_se"] = r.reducer_se;
    j["positivity_warnings"] = r.positivity_warnings;
    if (!std::isnan(r.analytic_T0)) j["analytic_T0"] = r.analytic_T0;
  } else {
    j["delta_metric"] = r.delta_metric;
    j["delta_se"] = r.delta_se;
    j["bias_X"] = r.bias_X;
    j["bias_P"] = r.bias_P;
    if (!std::isnan(r.compensation_alpha))
      j["compensation_alpha"] = r.compensation_alpha;
  }
  return j.dump(2) + "\n";
}

SweepResult run_sweep(const ExperimentConfig& cfg) {
  if (!cfg.sweep_axis.has_value())
    throw ConfigError("sweep requested without an axis; set axis and values");
  SweepResult out;
  out.base = cfg;
  out.axis = *cfg.sweep_axis;
  for (const FeedbackKind fb : cfg.sweep_feedback) {
    for (const double v : cfg.sweep_values) {
      ExperimentConfig point = cfg;
      point.feedback = fb;
      point.sweep_axis.reset();
      point.sweep_values.clear();
      point.sweep_feedback = {fb};
      // PI points need theta even when another axis is swept; P points must
      // not carry a two-qubit integral gain requirement backwards, so the
      // scenario mapping resolves gains per point from the same base fields.
      apply_axis_value(point, out.axis, v);
      SweepPoint sp;
      sp.value = v;
      sp.feedback = fb;
      sp.result = run_experiment(point);
      out.points.push_back(std::move(sp));
    }
  }

  if (out.axis == SweepAxis::Theta && !out.points.empty()) {
    const bool twoqubit = cfg.system == SystemKind::TwoQubit;
    std::size_t best = 0;
    for (std::size_t i = 1; i < out.points.size(); ++i) {
      const double a = twoqubit ? out.points[i].result.reducer_mean
                                : -out.points[i].result.delta_metric;
      const double b = twoqubit ? out.points[best].result.reducer_mean
                                : -out.points[best].result.delta_metric;
      if (a > b) best = i;
    }
    out.theta_opt = out.points[best].value;
  }
  return out;
}

std::string sweep_csv(const SweepResult& r) {
  std::string out;
  const std::string axis = to_string(r.axis);
  if (r.base.system == SystemKind::TwoQubit) {
    out = axis + ",feedback,steady_concurrence,concurrence_se,steady_T0,max_std\n";
    for (const SweepPoint& p : r.points) {
      out += fmt9(p.value) + ',' + to_string(p.feedback) + ',' +
             fmt9(p.result.reducer_mean) + ',' + fmt9(p.result.reducer_se) + ',' +
             fmt9(p.result.stats.steady_summary[1].mean) + ',' +
             fmt9(p.result.steady_max_std) + '\n';
    }
  } else {
    out = axis + ",feedback,delta,delta_se,bias_X,bias_P,max_std\n";
    for (const SweepPoint& p : r.points) {
      out += fmt9(p.value) + ',' + to_string(p.feedback) + ',' +
             fmt9(p.result.delta_metric) + ',' + fmt9(p.result.delta_se) + ',' +
             fmt9(p.result.bias_X) + ',' + fmt9(p.result.bias_P) + ',' +
             fmt9(p.result.steady_max_std) + '\n';
    }
  }
  return out;
}

std::string sweep_summary_json(const SweepResult& r) {
  json rows = json::array();
  for (const SweepPoint& p : r.points) rows.push_back(point_json(p));
  json j = {{"effective_config", config_json(r.base)},
            {"axis", to_string(r.axis)},
            {"values", r.base.sweep_values},
            {"steady_window", {r.base.steady_window().first, r.base.steady_window().second}},
            {"rows", rows}};
  if (!std::isnan(r.theta_opt)) j["theta_opt"] = r.theta_opt;
  return j.dump(2) + "\n";
}

void write_run_outputs(const RunResult& r) {
  if (!r.cfg.csv_path.empty()) write_text_file(r.cfg.csv_path, timeseries_csv(r));
  const std::string summary = summary_json(r);
  if (r.cfg.summary_path.empty()) {
    std::fputs(summary.c_str(), stdout);
  } else {
    write_text_file(r.cfg.summary_path, summary);
  }
}

void write_sweep_outputs(const SweepResult& r) {
  if (!r.base.csv_path.empty()) write_text_file(r.base.csv_path, sweep_csv(r));
  const std::string summary = sweep_summary_json(r);
  if (r.base.summary_path.empty()) {
    std::fputs(summary.c_str(), stdout);
  } else {
    write_text_file(r.base.summary_path, summary);
  }
}

}  // namespace cmfb
