/**
 * @file config.cpp
 * @brief Config parsing: flat key=value text with section headers, flag
 *        overrides, defaults, validation, and mapping onto scenario structs.
 */

#include "cmfb/config.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "cmfb/errors.hpp"

namespace cmfb {

namespace {

std::string trim(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

/// Section each key belongs to; keys are globally unique so flag overrides
/// need no section prefix.
const std::map<std::string, std::string>& key_sections() {
  static const std::map<std::string, std::string> table = {
      {"system", "system"},   {"h", "system"},      {"h1", "system"},
      {"h2", "system"},       {"k", "system"},      {"eta", "system"},
      {"mass", "system"},     {"omega", "system"},  {"gamma", "system"},
      {"n_bath", "system"},   {"Xg", "system"},     {"Pg", "system"},
      {"x0", "system"},       {"p0", "system"},
      {"feedback", "controller"},     {"actuation", "controller"},
      {"alpha_p", "controller"},      {"alpha_i", "controller"},
      {"alpha_p1", "controller"},     {"alpha_i1", "controller"},
      {"alpha_p2", "controller"},     {"alpha_i2", "controller"},
      {"theta", "controller"},        {"f_pi", "controller"},
      {"tau_p", "controller"},        {"tau_i", "controller"},
      {"epsilon", "controller"},      {"compensation", "controller"},
      {"n_traj", "ensemble"},         {"base_seed", "ensemble"},
      {"dt", "ensemble"},             {"t_final", "ensemble"},
      {"output_stride", "ensemble"},  {"n_workers", "ensemble"},
      {"steady_t0", "ensemble"},
      {"csv", "output"},              {"summary", "output"},
      {"axis", "sweep"},              {"values", "sweep"},
  };
  return table;
}

[[noreturn]] void fail(const std::string& msg) { throw ConfigError(msg); }

double parse_double(const std::string& key, const std::string& raw) {
  const std::string s = trim(raw);
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    fail("key '" + key + "': cannot parse number from '" + raw + "'");
  }
  if (used != s.size()) fail("key '" + key + "': trailing characters in '" + raw + "'");
  if (!std::isfinite(v)) fail("key '" + key + "': value is not finite");
  return v;
}

std::uint64_t parse_uint(const std::string& key, const std::string& raw) {
  const std::string s = trim(raw);
  if (s.empty() || s[0] == '-') fail("key '" + key + "': expected a non-negative integer");
  std::size_t used = 0;
  std::uint64_t v = 0;
  try {
    v = std::stoull(s, &used);
  } catch (const std::exception&) {
    fail("key '" + key + "': cannot parse integer from '" + raw + "'");
  }
  if (used != s.size()) fail("key '" + key + "': trailing characters in '" + raw + "'");
  return v;
}

/// A time value with an optional trailing 'T' meaning oscillator periods.
double parse_time(const std::string& key, const std::string& raw, SystemKind system,
                  double period) {
  std::string s = trim(raw);
  if (!s.empty() && (s.back() == 'T' || s.back() == 't')) {
    if (system != SystemKind::Oscillator)
      fail("key '" + key + "': the period suffix 'T' applies to the oscillator system");
    s.pop_back();
    return parse_double(key, s) * period;
  }
  return parse_double(key, s);
}

/// Round a delay/filter time to the grid; warn when rounding moves it.
double grid_round(const std::string& key, double value, double dt) {
  if (value <= 0.0) return 0.0;
  const auto steps = static_cast<long long>(std::llround(value / dt));
  const double eff = static_cast<double>(steps < 1 ? 1 : steps) * dt;
  if (std::abs(eff - value) > 1e-9 * std::max(value, dt)) {
    std::fprintf(stderr,
                 "config: %s = %.12g is not grid-aligned; using %.12g (%lld steps of dt = %.12g)\n",
                 key.c_str(), value, eff, steps < 1 ? 1LL : steps, dt);
  }
  return eff;
}

struct RawConfig {
  std::map<std::string, std::string> kv;
  bool has(const std::string& key) const { return kv.count(key) != 0; }
  const std::string& at(const std::string& key) const { return kv.at(key); }
};

RawConfig collect(const std::string& text, const std::vector<std::string>& overrides) {
  RawConfig raw;
  static const std::set<std::string> sections = {"system", "controller", "ensemble",
                                                 "output", "sweep"};
  std::istringstream in(text);
  std::string line, section;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::size_t hash = line.find_first_of("#;");
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') fail("line " + std::to_string(lineno) + ": unterminated section header");
      section = trim(line.substr(1, line.size() - 2));
      if (!sections.count(section))
        fail("line " + std::to_string(lineno) + ": unknown section [" + section + "]");
      continue;
    }
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos)
      fail("line " + std::to_string(lineno) + ": expected key=value, got '" + line + "'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    const auto it = key_sections().find(key);
    if (it == key_sections().end()) fail("unknown key '" + key + "'");
    if (!section.empty() && it->second != section)
      fail("key '" + key + "' belongs to section [" + it->second + "], found in [" + section + "]");
    raw.kv[key] = value;
  }
  for (const std::string& ov : overrides) {
    std::string s = trim(ov);
    if (s.rfind("--", 0) == 0) s.erase(0, 2);
    const std::size_t eq = s.find('=');
    if (eq == std::string::npos) fail("override '" + ov + "' is not of the form key=value");
    const std::string key = trim(s.substr(0, eq));
    if (!key_sections().count(key)) fail("unknown key '" + key + "'");
    raw.kv[key] = trim(s.substr(eq + 1));
  }
  return raw;
}

FeedbackKind parse_feedback(const std::string& raw) {
  const std::string v = lower(trim(raw));
  if (v == "p") return FeedbackKind::P;
  if (v == "i") return FeedbackKind::I;
  if (v == "pi") return FeedbackKind::PI;
  fail("feedback must be one of P, I, PI (got '" + raw + "')");
}

void validate(ExperimentConfig& cfg, const RawConfig& raw) {
  const bool osc = cfg.system == SystemKind::Oscillator;

  // Grid sanity.
  if (cfg.dt <= 0.0) fail("dt must be positive");
  if (cfg.t_final < cfg.dt) fail("t_final must be at least dt");
  if (cfg.n_traj == 0) fail("n_traj must be at least 1");
  if (raw.has("output_stride") && cfg.output_stride == 0)
    fail("output_stride must be at least 1");
  if (cfg.eta <= 0.0 || cfg.eta > 1.0) fail("eta must lie in (0, 1]");
  if (cfg.k <= 0.0) fail("k must be positive");
  if (cfg.steady_t0 >= 0.0 && cfg.steady_t0 >= cfg.t_final)
    fail("steady_t0 must be below t_final");

  // Keys that belong to the other system.
  if (osc) {
    for (const char* key : {"h", "h1", "h2"})
      if (raw.has(key)) fail(std::string("key '") + key + "' applies to the two-qubit system");
  } else {
    for (const char* key : {"mass", "omega", "gamma", "n_bath", "Xg", "Pg", "x0",
                            "p0", "actuation", "epsilon"})
      if (raw.has(key)) fail(std::string("key '") + key + "' applies to the oscillator system");
    if (raw.has("compensation")) fail("key 'compensation' applies to the oscillator system");
  }
  if (raw.has("h") && (raw.has("h1") || raw.has("h2")))
    fail("give either h (shared Rabi rate) or h1/h2, not both");

  // Controller gain groups.
  const bool grp_alpha = cfg.alpha_p.has_value() || cfg.alpha_i.has_value();
  const bool grp_mix = cfg.theta.has_value() || cfg.f_pi.has_value();
  if (!osc) {
    if (grp_alpha && grp_mix)
      fail("give either (alpha_p, alpha_i) or (theta, f_pi), not a mix");
    if (!grp_alpha && !grp_mix)
      fail("the two-qubit controller needs (alpha_p, alpha_i) or (theta, f_pi)");
    if (grp_mix) {
      if (!cfg.theta.has_value() || !cfg.f_pi.has_value())
        fail("the mixing parameterization needs both theta and f_pi");
      if (*cfg.theta < 0.0 || *cfg.theta > 1.0) fail("theta must lie in [0, 1]");
      if (cfg.feedback != FeedbackKind::PI)
        fail("(theta, f_pi) parameterizes PI feedback");
    } else {
      switch (cfg.feedback) {
        case FeedbackKind::P:
          if (!cfg.alpha_p.has_value()) fail("P feedback needs alpha_p");
          if (cfg.alpha_i.has_value() && *cfg.alpha_i != 0.0)
            fail("P feedback does not use alpha_i");
          if (cfg.tau_i != 0.0) fail("tau_i applies to integral feedback");
          break;
        case FeedbackKind::I:
          if (!cfg.alpha_i.has_value()) fail("I feedback needs alpha_i");
          if (cfg.alpha_p.has_value() && *cfg.alpha_p != 0.0)
            fail("I feedback does not use alpha_p");
          if (cfg.tau_p != 0.0) fail("tau_p applies to proportional feedback");
          break;
        case FeedbackKind::PI:
          if (!cfg.alpha_p.has_value() || !cfg.alpha_i.has_value())
            fail("PI feedback needs both alpha_p and alpha_i (or theta, f_pi)");
          break;
      }
    }
    if ((cfg.feedback == FeedbackKind::I || cfg.feedback == FeedbackKind::PI) &&
        cfg.tau_i <= 0.0)
      fail("integral feedback needs tau_i > 0");
  } else {
    // The oscillator derives its gains from the measured second moments.
    if (grp_alpha) fail("oscillator gains derive from the second moments; alpha_p/alpha_i do not apply");
    if (cfg.f_pi.has_value()) fail("f_pi applies to the two-qubit controller");
    if (cfg.theta.has_value()) {
      if (cfg.feedback != FeedbackKind::PI) fail("theta parameterizes PI feedback");
      if (*cfg.theta < 0.0 || *cfg.theta > 1.0) fail("theta must lie in [0, 1]");
    }
    const bool needs_integral =
        cfg.feedback == FeedbackKind::I || cfg.feedback == FeedbackKind::PI;
    if (needs_integral && cfg.tau_i <= 0.0) fail("integral feedback needs tau_i > 0");
    if (cfg.feedback == FeedbackKind::PI) {
      if (cfg.actuation != ActuationKind::XOnly)
        fail("PI mixing is defined for x-only actuation");
      if (!cfg.theta.has_value()) fail("oscillator PI feedback needs theta");
    }
    if (cfg.actuation == ActuationKind::XOnly &&
        (cfg.feedback == FeedbackKind::P || cfg.feedback == FeedbackKind::PI)) {
      // The x-only proportional scheme is built around a quarter-period
      // actuation delay; epsilon carries any extra delay beyond it.
      const double quarter = cfg.period() / 4.0;
      if (cfg.tau_p == 0.0) {
        cfg.tau_p = quarter;
      } else if (std::abs(cfg.tau_p - quarter) > 1e-6 * quarter) {
        fail("x-only proportional feedback uses tau_p = T/4; put extra delay in epsilon");
      }
    }
    if (cfg.epsilon != 0.0 && cfg.actuation != ActuationKind::XOnly)
      fail("epsilon applies to x-only actuation");
    if (cfg.epsilon < 0.0) fail("epsilon must be non-negative");
  }
  if (cfg.tau_p < 0.0) fail("tau_p must be non-negative");
  if (cfg.tau_i < 0.0) fail("tau_i must be non-negative");

  // Sweep block.
  if (!cfg.sweep_values.empty() && !cfg.sweep_axis.has_value())
    fail("sweep values given without an axis");
  if (cfg.sweep_feedback.size() > 1 && !cfg.sweep_axis.has_value())
    fail("a feedback list requires the sweep driver");
  if (cfg.sweep_axis.has_value()) {
    if (cfg.sweep_values.empty()) fail("sweep needs a non-empty values list");
    switch (*cfg.sweep_axis) {
      case SweepAxis::Theta:
        if (osc && cfg.feedback != FeedbackKind::PI)
          fail("a theta sweep needs PI feedback");
        if (!osc && !cfg.f_pi.has_value())
          fail("a two-qubit theta sweep needs f_pi");
        for (double v : cfg.sweep_values)
          if (v < 0.0 || v > 1.0) fail("theta sweep values must lie in [0, 1]");
        break;
      case SweepAxis::TauI:
        if (cfg.feedback == FeedbackKind::P) fail("a tau_i sweep needs integral feedback");
        for (double v : cfg.sweep_values)
          if (v <= 0.0) fail("tau_i sweep values must be positive");
        break;
      case SweepAxis::TauP:
        if (cfg.feedback == FeedbackKind::I) fail("a tau_p sweep needs proportional feedback");
        for (double v : cfg.sweep_values)
          if (v < 0.0) fail("tau_p sweep values must be non-negative");
        break;
      case SweepAxis::Eta:
        for (double v : cfg.sweep_values)
          if (v <= 0.0 || v > 1.0) fail("eta sweep values must lie in (0, 1]");
        break;
      case SweepAxis::Epsilon:
        if (!osc || cfg.actuation != ActuationKind::XOnly)
          fail("an epsilon sweep applies to oscillator x-only actuation");
        for (double v : cfg.sweep_values)
          if (v < 0.0) fail("epsilon sweep values must be non-negative");
        break;
    }
  }

  // Effective (grid-rounded) delay and filter times.
  cfg.tau_p_effective = grid_round("tau_p", cfg.tau_p, cfg.dt);
  cfg.tau_i_effective = grid_round("tau_i", cfg.tau_i, cfg.dt);
  cfg.epsilon_effective = grid_round("epsilon", cfg.epsilon, cfg.dt);
}

}  // namespace

std::pair<double, double> ExperimentConfig::steady_window() const {
  const double t0 = steady_t0 >= 0.0 ? steady_t0 : 0.75 * t_final;
  return {t0, t_final};
}

std::size_t ExperimentConfig::stride() const {
  if (output_stride != 0) return output_stride;
  return system == SystemKind::TwoQubit ? 50 : 5;
}

double ExperimentConfig::period() const { return 2.0 * 3.14159265358979323846 / omega; }

ExperimentConfig parse_config_text(const std::string& text,
                                   const std::vector<std::string>& overrides) {
  const RawConfig raw = collect(text, overrides);
  ExperimentConfig cfg;

  // System selection first: it fixes defaults and the meaning of 'T' suffixes.
  if (raw.has("system")) {
    const std::string v = lower(raw.at("system"));
    if (v == "twoqubit" || v == "two_qubit") cfg.system = SystemKind::TwoQubit;
    else if (v == "oscillator") cfg.system = SystemKind::Oscillator;
    else fail("system must be twoqubit or oscillator (got '" + raw.at("system") + "')");
  }
  const bool osc = cfg.system == SystemKind::Oscillator;
  if (osc) cfg.k = 0.02;  // oscillator default measurement strength

  // Model parameters.
  if (raw.has("h")) { cfg.h1 = cfg.h2 = parse_double("h", raw.at("h")); }
  if (raw.has("h1")) cfg.h1 = parse_double("h1", raw.at("h1"));
  if (raw.has("h2")) cfg.h2 = parse_double("h2", raw.at("h2"));
  if (raw.has("k")) cfg.k = parse_double("k", raw.at("k"));
  if (raw.has("eta")) cfg.eta = parse_double("eta", raw.at("eta"));
  if (raw.has("mass")) cfg.mass = parse_double("mass", raw.at("mass"));
  if (raw.has("omega")) cfg.omega = parse_double("omega", raw.at("omega"));
  if (raw.has("gamma")) cfg.gamma = parse_double("gamma", raw.at("gamma"));
  if (raw.has("n_bath")) cfg.n_bath = parse_double("n_bath", raw.at("n_bath"));
  if (raw.has("Xg")) cfg.Xg = parse_double("Xg", raw.at("Xg"));
  if (raw.has("Pg")) cfg.Pg = parse_double("Pg", raw.at("Pg"));
  if (raw.has("x0")) cfg.x0 = parse_double("x0", raw.at("x0"));
  if (raw.has("p0")) cfg.p0 = parse_double("p0", raw.at("p0"));
  if (cfg.mass <= 0.0 || cfg.omega <= 0.0) fail("mass and omega must be positive");
  const double period = cfg.period();

  // Controller.
  if (raw.has("feedback")) {
    const std::string v = trim(raw.at("feedback"));
    std::vector<FeedbackKind> kinds;
    std::istringstream items(v);
    std::string item;
    while (std::getline(items, item, ',')) kinds.push_back(parse_feedback(item));
    if (kinds.empty()) fail("feedback must not be empty");
    cfg.feedback = kinds.front();
    cfg.sweep_feedback = kinds;
  } else {
    cfg.sweep_feedback = {cfg.feedback};
  }
  if (raw.has("actuation")) {
    const std::string v = lower(raw.at("actuation"));
    if (v == "xp") cfg.actuation = ActuationKind::Xp;
    else if (v == "x_only" || v == "x-only") cfg.actuation = ActuationKind::XOnly;
    else fail("actuation must be xp or x_only (got '" + raw.at("actuation") + "')");
  }

  // Per-channel gain overrides are not supported: the x&p gains derive from
  // the second-moment table. Reject them with a targeted message; a second
  // momentum-channel gain under x-only actuation is the specific constraint.
  if (cfg.actuation == ActuationKind::XOnly &&
      (raw.has("alpha_p2") || raw.has("alpha_i2")))
    fail("x-only actuation has no momentum channel; alpha_p2/alpha_i2 do not apply");
  for (const char* key : {"alpha_p1", "alpha_i1", "alpha_p2", "alpha_i2"})
    if (raw.has(key))
      fail(std::string("key '") + key +
           "': per-channel oscillator gains derive from the second moments and cannot be set");

  if (raw.has("alpha_p")) cfg.alpha_p = parse_double("alpha_p", raw.at("alpha_p"));
  if (raw.has("alpha_i")) cfg.alpha_i = parse_double("alpha_i", raw.at("alpha_i"));
  if (raw.has("theta")) cfg.theta = parse_double("theta", raw.at("theta"));
  if (raw.has("f_pi")) cfg.f_pi = parse_double("f_pi", raw.at("f_pi"));
  if (raw.has("tau_p")) cfg.tau_p = parse_time("tau_p", raw.at("tau_p"), cfg.system, period);
  if (raw.has("tau_i")) cfg.tau_i = parse_time("tau_i", raw.at("tau_i"), cfg.system, period);
  if (raw.has("epsilon"))
    cfg.epsilon = parse_time("epsilon", raw.at("epsilon"), cfg.system, period);
  if (raw.has("compensation")) {
    const std::string v = lower(raw.at("compensation"));
    if (v == "auto") cfg.compensation = CompensationMode::Auto;
    else if (v == "off") cfg.compensation = CompensationMode::Off;
    else {
      cfg.compensation = CompensationMode::Value;
      cfg.compensation_value = parse_double("compensation", raw.at("compensation"));
      if (cfg.compensation_value <= 0.0 || cfg.compensation_value > 1.0)
        fail("a numeric compensation factor must lie in (0, 1]");
    }
  }

  // Ensemble.
  if (raw.has("n_traj")) cfg.n_traj = static_cast<std::size_t>(parse_uint("n_traj", raw.at("n_traj")));
  if (raw.has("base_seed")) cfg.base_seed = parse_uint("base_seed", raw.at("base_seed"));
  if (raw.has("dt")) cfg.dt = parse_time("dt", raw.at("dt"), cfg.system, period);
  if (raw.has("t_final")) cfg.t_final = parse_time("t_final", raw.at("t_final"), cfg.system, period);
  if (raw.has("output_stride"))
    cfg.output_stride = static_cast<std::size_t>(parse_uint("output_stride", raw.at("output_stride")));
  if (raw.has("n_workers"))
    cfg.n_workers = static_cast<std::size_t>(parse_uint("n_workers", raw.at("n_workers")));
  if (raw.has("steady_t0"))
    cfg.steady_t0 = parse_time("steady_t0", raw.at("steady_t0"), cfg.system, period);

  // Output.
  if (raw.has("csv")) cfg.csv_path = raw.at("csv");
  if (raw.has("summary")) cfg.summary_path = raw.at("summary");

  // Sweep.
  if (raw.has("axis")) {
    const std::string v = lower(raw.at("axis"));
    if (v == "theta") cfg.sweep_axis = SweepAxis::Theta;
    else if (v == "tau_i") cfg.sweep_axis = SweepAxis::TauI;
    else if (v == "tau_p") cfg.sweep_axis = SweepAxis::TauP;
    else if (v == "eta") cfg.sweep_axis = SweepAxis::Eta;
    else if (v == "epsilon") cfg.sweep_axis = SweepAxis::Epsilon;
    else fail("axis must be one of theta, tau_i, tau_p, eta, epsilon");
  }
  if (raw.has("values")) {
    std::istringstream items(raw.at("values"));
    std::string item;
    while (std::getline(items, item, ',')) {
      if (trim(item).empty()) continue;
      cfg.sweep_values.push_back(parse_time("values", item, cfg.system, period));
    }
  }

  // When an axis is swept, the base config may omit that key; validate with
  // the first sweep value filled in so the cross-field checks see a complete
  // configuration.
  if (cfg.sweep_axis.has_value() && !cfg.sweep_values.empty())
    apply_axis_value(cfg, *cfg.sweep_axis, cfg.sweep_values.front());

  validate(cfg, raw);
  return cfg;
}

ExperimentConfig parse_config(const std::string& path,
                              const std::vector<std::string>& overrides) {
  if (path.empty()) return parse_config_text("", overrides);
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw IoError("error reading config file '" + path + "'");
  return parse_config_text(buf.str(), overrides);
}

void apply_axis_value(ExperimentConfig& cfg, SweepAxis axis, double value) {
  switch (axis) {
    case SweepAxis::Theta:
      cfg.theta = value;
      break;
    case SweepAxis::TauI:
      cfg.tau_i = value;
      break;
    case SweepAxis::TauP:
      cfg.tau_p = value;
      break;
    case SweepAxis::Eta:
      cfg.eta = value;
      break;
    case SweepAxis::Epsilon:
      cfg.epsilon = value;
      break;
  }
  // Keep the grid-rounded echoes in sync (silently: the sweep driver calls
  // this once per grid point).
  auto round_quiet = [&](double v) {
    if (v <= 0.0) return 0.0;
    const auto steps = std::llround(v / cfg.dt);
    return static_cast<double>(steps < 1 ? 1 : steps) * cfg.dt;
  };
  cfg.tau_p_effective = round_quiet(cfg.tau_p);
  cfg.tau_i_effective = round_quiet(cfg.tau_i);
  cfg.epsilon_effective = round_quiet(cfg.epsilon);
}

TwoQubitScenario to_twoqubit_scenario(const ExperimentConfig& cfg) {
  if (cfg.system != SystemKind::TwoQubit)
    throw ConfigError("configuration does not describe the two-qubit system");
  TwoQubitScenario sc;
  sc.model = TwoQubitModel{cfg.h1, cfg.h2, cfg.k, cfg.eta};
  if (cfg.theta.has_value()) {
    const auto [ap, ai] = from_mixing(*cfg.theta, *cfg.f_pi);
    sc.ctrl.alpha_p = ap;
    sc.ctrl.alpha_i = ai;
  } else {
    sc.ctrl.alpha_p = cfg.alpha_p.value_or(0.0);
    sc.ctrl.alpha_i = cfg.alpha_i.value_or(0.0);
  }
  sc.ctrl.tau_p = cfg.tau_p_effective;
  sc.ctrl.tau_i = cfg.tau_i_effective;
  sc.dt = cfg.dt;
  sc.t_final = cfg.t_final;
  sc.output_stride = cfg.stride();
  return sc;
}

OscillatorScenario to_oscillator_scenario(const ExperimentConfig& cfg) {
  if (cfg.system != SystemKind::Oscillator)
    throw ConfigError("configuration does not describe the oscillator system");
  OscillatorScenario sc;
  sc.model.m = cfg.mass;
  sc.model.omega = cfg.omega;
  sc.model.gamma = cfg.gamma;
  sc.model.n_bath = cfg.n_bath;
  sc.model.k = cfg.k;
  sc.model.eta = cfg.eta;
  const bool x_only = cfg.actuation == ActuationKind::XOnly;
  switch (cfg.feedback) {
    case FeedbackKind::P:
      sc.strategy = x_only ? OscillatorStrategy::XProportional
                           : OscillatorStrategy::XpProportional;
      break;
    case FeedbackKind::I:
      sc.strategy = x_only ? OscillatorStrategy::XIntegral
                           : OscillatorStrategy::XpIntegral;
      break;
    case FeedbackKind::PI:
      if (!x_only) throw ConfigError("PI mixing is defined for x-only actuation");
      sc.strategy = OscillatorStrategy::XProportionalIntegral;
      break;
  }
  sc.Xg = cfg.Xg;
  sc.Pg = cfg.Pg;
  sc.x0 = cfg.x0;
  sc.p0 = cfg.p0;
  sc.tau_p = cfg.tau_p_effective;
  sc.epsilon = cfg.epsilon_effective;
  sc.tau_i = cfg.tau_i_effective;
  sc.theta = cfg.theta.value_or(1.0);
  sc.dt = cfg.dt;
  sc.t_final = cfg.t_final;
  sc.output_stride = cfg.stride();
  switch (cfg.compensation) {
    case CompensationMode::Auto:
      sc.compensation = x_only;  // xp actuation needs no compensation
      break;
    case CompensationMode::Off:
      sc.compensation = false;
      break;
    case CompensationMode::Value:
      // A user-pinned factor acts exactly like the internal one: actuation
      // targets are the true targets divided by it.
      sc.compensation = false;
      sc.Xg = cfg.Xg / cfg.compensation_value;
      sc.Pg = cfg.Pg / cfg.compensation_value;
      break;
  }
  return sc;
}

const char* to_string(SystemKind v) {
  return v == SystemKind::TwoQubit ? "twoqubit" : "oscillator";
}
const char* to_string(FeedbackKind v) {
  switch (v) {
    case FeedbackKind::P: return "P";
    case FeedbackKind::I: return "I";
    default: return "PI";
  }
}
const char* to_string(ActuationKind v) {
  return v == ActuationKind::Xp ? "xp" : "x_only";
}
const char* to_string(SweepAxis v) {
  switch (v) {
    case SweepAxis::Theta: return "theta";
    case SweepAxis::TauI: return "tau_i";
    case SweepAxis::TauP: return "tau_p";
    case SweepAxis::Eta: return "eta";
    default: return "epsilon";
  }
}

}  // namespace cmfb
