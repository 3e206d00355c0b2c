/**
 * @file oscillator.cpp
 * @brief Second-moment ODEs, splitting steppers, references, and the plan
 *        runner for the measured-oscillator case study.
 */

#include "cmfb/oscillator.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "cmfb/errors.hpp"

namespace cmfb {

namespace {

constexpr double kPi = 3.14159265358979323846;

struct Propagator {
  double eg;  // exp(-gamma dt)
  double M11, M12, M21, M22;
};

// Exact damped-rotation propagator over one step: e^{-gamma dt} R(omega dt).
Propagator make_propagator(const OscillatorModel& md, double dt) {
  Propagator P;
  P.eg = std::exp(-md.gamma * dt);
  const double cw = std::cos(md.omega * dt);
  const double sw = std::sin(md.omega * dt);
  P.M11 = P.eg * cw;
  P.M12 = P.eg * sw / (md.m * md.omega);
  P.M21 = -P.eg * md.m * md.omega * sw;
  P.M22 = P.eg * cw;
  return P;
}

// Variation-of-constants increment for the full goal drive gamma (x_g, p_g):
// over one step the drive relaxes the means toward the goal orbit, giving
// (1 - e^{-gamma dt}) times the goal at the end of the step.
std::pair<double, double> full_drive(const ControlGoal& goal,
                                     const OscillatorModel& md, double t_next,
                                     double eg) {
  const auto [xg1, pg1] = rotating_targets(goal, md, t_next);
  return {(1.0 - eg) * xg1, (1.0 - eg) * pg1};
}

// Variation-of-constants increment when only the gamma p_g(t) drive on the
// momentum is available (x-only actuation): Simpson quadrature of
// e^{-gamma (dt-s)} R(omega (dt-s)) (0, gamma p_g(t+s))^T over s in [0, dt].
std::pair<double, double> partial_drive(const ControlGoal& goal,
                                        const OscillatorModel& md, double t,
                                        double dt) {
  double acc_x = 0.0, acc_p = 0.0;
  static constexpr double kNodes[3] = {0.0, 0.5, 1.0};
  static constexpr double kWeights[3] = {1.0, 4.0, 1.0};
  for (int i = 0; i < 3; ++i) {
    const double s = kNodes[i] * dt;
    const double pg = rotating_targets(goal, md, t + s).second;
    const double u = dt - s;
    const double damp = std::exp(-md.gamma * u);
    const double cu = std::cos(md.omega * u);
    const double su = std::sin(md.omega * u);
    acc_x += kWeights[i] * damp * md.gamma * pg * su / (md.m * md.omega);
    acc_p += kWeights[i] * damp * md.gamma * pg * cu;
  }
  return {acc_x * dt / 6.0, acc_p * dt / 6.0};
}

std::array<double, 3> moment_rhs(const OscillatorModel& md,
                                 const std::array<double, 3>& s) {
  const double Vx = s[0], Vp = s[1], C = s[2];
  const double g = md.gamma, m = md.m, w = md.omega;
  const double keta = md.k * md.eta;
  const double thermal = g * (2.0 * md.n_bath + 1.0) / (m * w);
  return {
      -2.0 * g * Vx + thermal + (2.0 / m) * C - 4.0 * keta * Vx * Vx,
      -2.0 * g * Vp + thermal - 2.0 * m * w * w * C - 4.0 * keta * C * C + md.k,
      -4.0 * g * C + Vp / m - m * w * w * Vx - 4.0 * keta * C * Vx,
  };
}

void check_heisenberg(double Vx, double Vp, double C, double t) {
  if (Vx * Vp - C * C < 0.25 - 1e-9) {
    throw NumericalError("second-moment table violates the Heisenberg bound at t = " +
                         std::to_string(t));
  }
}

// Table row for the step starting at time t (steppers snap t to the grid).
std::size_t table_row(const SecondMomentTable& table, double t) {
  const auto n = static_cast<long long>(std::llround(t / table.dt));
  if (n < 0 || static_cast<std::size_t>(n) >= table.rows()) {
    throw std::invalid_argument("second-moment table does not cover the requested time");
  }
  return static_cast<std::size_t>(n);
}

// Second moments carried by the state returned from a step ending at row n+1.
void load_row(const SecondMomentTable& table, std::size_t row, GaussianMoments& st) {
  const std::size_t r = row < table.rows() ? row : table.rows() - 1;
  st.Vx = table.Vx[r];
  st.Vp = table.Vp[r];
  st.Cxp = table.Cxp[r];
}

}  // namespace

double OscillatorModel::period() const { return 2.0 * kPi / omega; }

void OscillatorModel::validate() const {
  if (m <= 0.0 || omega <= 0.0) {
    throw std::invalid_argument("oscillator mass and frequency must be positive");
  }
  if (gamma < 0.0 || n_bath < 0.0) {
    throw std::invalid_argument("damping rate and bath occupation must be nonnegative");
  }
  if (k <= 0.0) throw std::invalid_argument("measurement strength k must be positive");
  if (eta <= 0.0 || eta > 1.0) {
    throw std::invalid_argument("efficiency eta must lie in (0, 1]");
  }
  const double scale = 0.1 * m * omega * omega;
  if (k >= scale || gamma >= scale) {
    std::fprintf(stderr,
                 "warning: k = %g, gamma = %g outside the weak-coupling regime "
                 "(< %g); the moment-level description is derived there\n",
                 k, gamma, scale);
  }
}

SecondMomentTable second_moments_evolve(const OscillatorModel& model,
                                        std::array<double, 3> initial, double dt,
                                        double t_final) {
  if (dt <= 0.0 || t_final < 0.0) {
    throw std::invalid_argument("second_moments_evolve: need dt > 0 and t_final >= 0");
  }
  const auto nsteps = static_cast<std::size_t>(std::llround(t_final / dt));

  SecondMomentTable table;
  table.dt = dt;
  table.Vx.reserve(nsteps + 1);
  table.Vp.reserve(nsteps + 1);
  table.Cxp.reserve(nsteps + 1);

  std::array<double, 3> s = initial;
  check_heisenberg(s[0], s[1], s[2], 0.0);
  table.Vx.push_back(s[0]);
  table.Vp.push_back(s[1]);
  table.Cxp.push_back(s[2]);

  for (std::size_t n = 0; n < nsteps; ++n) {
    const auto k1 = moment_rhs(model, s);
    std::array<double, 3> tmp;
    for (int i = 0; i < 3; ++i) tmp[i] = s[i] + 0.5 * dt * k1[i];
    const auto k2 = moment_rhs(model, tmp);
    for (int i = 0; i < 3; ++i) tmp[i] = s[i] + 0.5 * dt * k2[i];
    const auto k3 = moment_rhs(model, tmp);
    for (int i = 0; i < 3; ++i) tmp[i] = s[i] + dt * k3[i];
    const auto k4 = moment_rhs(model, tmp);
    for (int i = 0; i < 3; ++i) {
      s[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    check_heisenberg(s[0], s[1], s[2], static_cast<double>(n + 1) * dt);
    table.Vx.push_back(s[0]);
    table.Vp.push_back(s[1]);
    table.Cxp.push_back(s[2]);
  }

  table.Vs = table.Vx.back();
  table.Vps = table.Vp.back();
  table.Cs = table.Cxp.back();
  const auto residual = moment_rhs(model, {table.Vs, table.Vps, table.Cs});
  table.converged = std::abs(residual[0]) < 1e-6 && std::abs(residual[1]) < 1e-6 &&
                    std::abs(residual[2]) < 1e-6;
  return table;
}

std::pair<double, double> rotating_targets(const ControlGoal& goal,
                                           const OscillatorModel& model, double t) {
  const double c = std::cos(model.omega * t);
  const double s = std::sin(model.omega * t);
  return {goal.Xg * c + goal.Pg * s / (model.m * model.omega),
          -model.m * model.omega * goal.Xg * s + goal.Pg * c};
}

std::pair<double, double> to_rotating_frame(double mean_x, double mean_p,
                                            const OscillatorModel& model, double t) {
  const double c = std::cos(model.omega * t);
  const double s = std::sin(model.omega * t);
  return {mean_x * c - mean_p * s / (model.m * model.omega),
          model.m * model.omega * mean_x * s + mean_p * c};
}

double compensation_factor(const OscillatorModel& model,
                           const SecondMomentTable& table) {
  const double r = 2.0 * model.k * model.eta * table.Vs;
  return (r + model.gamma / 2.0) / (r + model.gamma);
}

GaussianMoments step_xp_proportional(const OscillatorModel& model,
                                     const ControlGoal& goal,
                                     const GaussianMoments& state,
                                     const SecondMomentTable& table, double t,
                                     double dt) {
  const std::size_t n = table_row(table, t);
  const double tn = static_cast<double>(n) * dt;
  const double keta = model.k * model.eta;
  const Propagator P = make_propagator(model, dt);
  const auto [dx, dp] = full_drive(goal, model, static_cast<double>(n + 1) * dt, P.eg);

  const double xg = rotating_targets(goal, model, tn).first;
  const double e = 2.0 * (state.mean_x - xg);
  const double fx = -2.0 * keta * table.Vx[n] * e;
  const double fp = -2.0 * keta * table.Cxp[n] * e;

  GaussianMoments next = state;
  const double xn1 = P.M11 * state.mean_x + P.M12 * state.mean_p + dx;
  const double pn1 = P.M21 * state.mean_x + P.M22 * state.mean_p + dp;
  next.mean_x = xn1 + dt * fx;
  next.mean_p = pn1 + dt * fp;
  load_row(table, n + 1, next);
  return next;
}

GaussianMoments step_xp_proportional_delayed(const OscillatorModel& model,
                                             const ControlGoal& goal,
                                             const GaussianMoments& state,
                                             const SecondMomentTable& table,
                                             const NoiseHistory& hist, double t,
                                             double dt, double tau_p) {
  const std::size_t n = table_row(table, t);
  const double keta = model.k * model.eta;
  const double sqek = std::sqrt(model.eta * model.k);
  const Propagator P = make_propagator(model, dt);
  const auto [dx, dp] = full_drive(goal, model, static_cast<double>(n + 1) * dt, P.eg);

  const std::size_t lag = grid_align(tau_p, dt, "tau_p").steps;
  const double e_del = hist.error_samples.lagged(lag);
  const double dW = hist.increments.lagged(0);
  const double fx = -2.0 * keta * table.Vx[n] * e_del;
  const double fp = -2.0 * keta * table.Cxp[n] * e_del;

  GaussianMoments next = state;
  const double xn1 = P.M11 * state.mean_x + P.M12 * state.mean_p + dx;
  const double pn1 = P.M21 * state.mean_x + P.M22 * state.mean_p + dp;
  next.mean_x = xn1 + dt * fx + 2.0 * sqek * table.Vx[n] * dW;
  next.mean_p = pn1 + dt * fp + 2.0 * sqek * table.Cxp[n] * dW;
  load_row(table, n + 1, next);
  return next;
}

GaussianMoments step_xp_integral(const OscillatorModel& model,
                                 const ControlGoal& goal,
                                 const GaussianMoments& state,
                                 const SecondMomentTable& table, double J, double dW,
                                 double t, double dt) {
  const std::size_t n = table_row(table, t);
  const double keta = model.k * model.eta;
  const double sqek = std::sqrt(model.eta * model.k);
  const Propagator P = make_propagator(model, dt);
  const auto [dx, dp] = full_drive(goal, model, static_cast<double>(n + 1) * dt, P.eg);

  const double fx = -2.0 * keta * table.Vx[n] * J;
  const double fp = -2.0 * keta * table.Cxp[n] * J;

  GaussianMoments next = state;
  const double xn1 = P.M11 * state.mean_x + P.M12 * state.mean_p + dx;
  const double pn1 = P.M21 * state.mean_x + P.M22 * state.mean_p + dp;
  next.mean_x = xn1 + dt * fx + 2.0 * sqek * table.Vx[n] * dW;
  next.mean_p = pn1 + dt * fp + 2.0 * sqek * table.Cxp[n] * dW;
  load_row(table, n + 1, next);
  return next;
}

GaussianMoments step_x_proportional_delayed(const OscillatorModel& model,
                                            const ControlGoal& goal,
                                            const GaussianMoments& state,
                                            const SecondMomentTable& table,
                                            const NoiseHistory& hist, double t,
                                            double dt, double epsilon) {
  const std::size_t n = table_row(table, t);
  const double keta = model.k * model.eta;
  const double sqek = std::sqrt(model.eta * model.k);
  const Propagator P = make_propagator(model, dt);
  const double tn = static_cast<double>(n) * dt;
  const auto [dx, dp] = partial_drive(goal, model, tn, dt);

  const double tau_p = model.period() / 4.0 + epsilon;
  const std::size_t lag = grid_align(tau_p, dt, "tau_p").steps;
  const double e_del = hist.error_samples.lagged(lag);
  const double dW = hist.increments.lagged(0);
  const double fp = 2.0 * keta * table.Vx[n] * model.m * model.omega * e_del;

  GaussianMoments next = state;
  const double xn1 = P.M11 * state.mean_x + P.M12 * state.mean_p + dx;
  const double pn1 = P.M21 * state.mean_x + P.M22 * state.mean_p + dp;
  next.mean_x = xn1 + 2.0 * sqek * table.Vx[n] * dW;
  next.mean_p = pn1 + dt * fp + 2.0 * sqek * table.Cxp[n] * dW;
  load_row(table, n + 1, next);
  return next;
}

GaussianMoments step_x_integral(const OscillatorModel& model, const ControlGoal& goal,
                                const GaussianMoments& state,
                                const SecondMomentTable& table, double J_est,
                                double dW, double t, double dt) {
  const std::size_t n = table_row(table, t);
  const double keta = model.k * model.eta;
  const double sqek = std::sqrt(model.eta * model.k);
  const Propagator P = make_propagator(model, dt);
  const double tn = static_cast<double>(n) * dt;
  const auto [dx, dp] = partial_drive(goal, model, tn, dt);

  const double fp = -4.0 * keta * table.Vx[n] * J_est;

  GaussianMoments next = state;
  const double xn1 = P.M11 * state.mean_x + P.M12 * state.mean_p + dx;
  const double pn1 = P.M21 * state.mean_x + P.M22 * state.mean_p + dp;
  next.mean_x = xn1 + 2.0 * sqek * table.Vx[n] * dW;
  next.mean_p = pn1 + dt * fp + 2.0 * sqek * table.Cxp[n] * dW;
  load_row(table, n + 1, next);
  return next;
}

std::vector<std::array<double, 2>> period_averaged_reference(
    const OscillatorModel& model, const SecondMomentTable& table,
    std::array<double, 2> Z0, double dt, double t_final) {
  const auto nsteps = static_cast<std::size_t>(std::llround(t_final / dt));
  if (nsteps + 1 > table.rows()) {
    throw std::invalid_argument("period_averaged_reference: table shorter than t_final");
  }
  const double keta = model.k * model.eta;
  const double mw2 = (model.m * model.omega) * (model.m * model.omega);

  auto rhs = [&](double Vx, double Cxp, const std::array<double, 2>& Z) {
    const double a11 = -model.gamma - 2.0 * keta * Vx;
    const double a12 = 2.0 * keta * Cxp / mw2;
    const double a21 = -2.0 * keta * Cxp;
    const double a22 = -model.gamma - 2.0 * keta * Vx;
    return std::array<double, 2>{a11 * Z[0] + a12 * Z[1], a21 * Z[0] + a22 * Z[1]};
  };

  std::vector<std::array<double, 2>> out;
  out.reserve(nsteps + 1);
  std::array<double, 2> Z = Z0;
  out.push_back(Z);
  for (std::size_t n = 0; n < nsteps; ++n) {
    const double Vx0 = table.Vx[n], C0 = table.Cxp[n];
    const double Vx1 = table.Vx[n + 1], C1 = table.Cxp[n + 1];
    const double Vxm = 0.5 * (Vx0 + Vx1), Cm = 0.5 * (C0 + C1);

    const auto k1 = rhs(Vx0, C0, Z);
    const auto k2 = rhs(Vxm, Cm, {Z[0] + 0.5 * dt * k1[0], Z[1] + 0.5 * dt * k1[1]});
    const auto k3 = rhs(Vxm, Cm, {Z[0] + 0.5 * dt * k2[0], Z[1] + 0.5 * dt * k2[1]});
    const auto k4 = rhs(Vx1, C1, {Z[0] + dt * k3[0], Z[1] + dt * k3[1]});
    Z[0] += dt / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]);
    Z[1] += dt / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1]);
    out.push_back(Z);
  }
  return out;
}

std::vector<std::array<double, 2>> delayed_linear_ode_steady(
    const OscillatorModel& model, double Vs, double Cs, double tau_p,
    std::array<double, 2> Z0, double dt, double t_final) {
  const auto nsteps = static_cast<std::size_t>(std::llround(t_final / dt));
  const std::size_t lag = grid_align(tau_p, dt, "tau_p").steps;
  const double keta = model.k * model.eta;
  const double mw = model.m * model.omega;
  const double c = std::cos(model.omega * tau_p);
  const double s = std::sin(model.omega * tau_p);

  const double a11 = -2.0 * keta * (Vs * c - Cs * s / mw);
  const double a12 = -2.0 * keta * (-Vs * s / mw - Cs * c / (mw * mw));
  const double a21 = -2.0 * keta * (mw * Vs * s + Cs * c);
  const double a22 = a11;

  const double z0norm = std::hypot(Z0[0], Z0[1]);
  const double blowup = 1e6 * (z0norm + 1.0);

  std::vector<std::array<double, 2>> out;
  out.reserve(nsteps + 1);
  std::array<double, 2> Z = Z0;
  out.push_back(Z);

  const std::size_t cap = lag + 1;
  std::vector<std::array<double, 2>> ring(cap, Z0);  // history = Z0 on [-tau_p, 0]
  for (std::size_t n = 0; n < nsteps; ++n) {
    std::array<double, 2> Zdel;
    if (lag == 0) {
      Zdel = Z;
    } else {
      Zdel = (n >= lag) ? ring[(n - lag) % cap] : Z0;
      ring[n % cap] = Z;
    }
    const double dz0 = -model.gamma * Z[0] + a11 * Zdel[0] + a12 * Zdel[1];
    const double dz1 = -model.gamma * Z[1] + a21 * Zdel[0] + a22 * Zdel[1];
    Z[0] += dt * dz0;
    Z[1] += dt * dz1;
    out.push_back(Z);
    if (std::hypot(Z[0], Z[1]) > blowup) {
      throw NumericalError("delayed deviation dynamics diverge: tau_p outside the stable regime");
    }
  }
  return out;
}

double error_metric(const std::vector<std::array<double, 2>>& deviations,
                    const OscillatorModel& model) {
  if (deviations.empty()) {
    throw std::invalid_argument("error_metric: empty ensemble");
  }
  const double mw = model.m * model.omega;
  double acc = 0.0;
  for (const auto& d : deviations) {
    acc += mw * d[0] * d[0] + d[1] * d[1] / mw;
  }
  return std::sqrt(0.5 * acc / static_cast<double>(deviations.size()));
}

OscillatorPlan::OscillatorPlan(const OscillatorScenario& sc) : sc_(sc) {
  sc_.model.validate();
  if (sc_.dt <= 0.0) throw std::invalid_argument("OscillatorPlan: dt must be positive");
  if (sc_.output_stride == 0) {
    throw std::invalid_argument("OscillatorPlan: output stride must be positive");
  }
  const OscillatorModel& md = sc_.model;
  nsteps_ = static_cast<std::size_t>(std::llround(sc_.t_final / sc_.dt));
  n_rows_ = nsteps_ / sc_.output_stride + 1;

  const std::array<double, 3> coherent{1.0 / (2.0 * md.m * md.omega),
                                       md.m * md.omega / 2.0, 0.0};
  table_ = second_moments_evolve(md, coherent, sc_.dt, sc_.t_final);

  const double alpha = sc_.compensation ? compensation_factor(md, table_) : 1.0;
  goal_ = ControlGoal{sc_.Xg / alpha, sc_.Pg / alpha, alpha};

  const double total_delay = sc_.tau_p + sc_.epsilon;
  lag_p_ = total_delay > 0.0 ? grid_align(total_delay, sc_.dt, "tau_p").steps : 0;
  window_w_ = sc_.tau_i > 0.0 ? grid_align(sc_.tau_i, sc_.dt, "tau_i").steps : 0;
  deterministic_ =
      sc_.strategy == OscillatorStrategy::XpProportional && lag_p_ == 0;
  sqek_ = std::sqrt(md.eta * md.k);

  const Propagator P = make_propagator(md, sc_.dt);
  M11_ = P.M11;
  M12_ = P.M12;
  M21_ = P.M21;
  M22_ = P.M22;

  const bool fullDrive = sc_.strategy == OscillatorStrategy::XpProportional ||
                         sc_.strategy == OscillatorStrategy::XpIntegral;
  const double keta = md.k * md.eta;

  gPx_.assign(nsteps_, 0.0);
  gPp_.assign(nsteps_, 0.0);
  gIx_.assign(nsteps_, 0.0);
  gIp_.assign(nsteps_, 0.0);
  drive_x_.resize(nsteps_);
  drive_p_.resize(nsteps_);
  xg_.resize(nsteps_);
  nx_coef_.resize(nsteps_);
  np_coef_.resize(nsteps_);
  cos_wt_.resize(nsteps_);
  sin_wt_.resize(nsteps_);

  for (std::size_t n = 0; n < nsteps_; ++n) {
    const double tn = static_cast<double>(n) * sc_.dt;
    const double Vxn = table_.Vx[n];
    const double Cn = table_.Cxp[n];
    cos_wt_[n] = std::cos(md.omega * tn);
    sin_wt_[n] = std::sin(md.omega * tn);
    xg_[n] = rotating_targets(goal_, md, tn).first;
    const auto drive =
        fullDrive ? full_drive(goal_, md, static_cast<double>(n + 1) * sc_.dt, P.eg)
                  : partial_drive(goal_, md, tn, sc_.dt);
    drive_x_[n] = drive.first;
    drive_p_[n] = drive.second;
    nx_coef_[n] = 2.0 * sqek_ * Vxn;
    np_coef_[n] = 2.0 * sqek_ * Cn;

    switch (sc_.strategy) {
      case OscillatorStrategy::XpProportional:
        gPx_[n] = -2.0 * keta * Vxn;
        gPp_[n] = -2.0 * keta * Cn;
        break;
      case OscillatorStrategy::XpIntegral:
        gIx_[n] = -2.0 * keta * Vxn;
        gIp_[n] = -2.0 * keta * Cn;
        break;
      case OscillatorStrategy::XProportional:
        gPp_[n] = 2.0 * keta * Vxn * md.m * md.omega;
        break;
      case OscillatorStrategy::XIntegral:
        gIp_[n] = -4.0 * keta * Vxn;
        break;
      case OscillatorStrategy::XProportionalIntegral:
        gPp_[n] = (1.0 - sc_.theta) * 2.0 * keta * Vxn * md.m * md.omega;
        gIp_[n] = -sc_.theta * 4.0 * keta * Vxn;
        break;
    }
  }

  // Pre-history record samples for delayed strategies: the mean position is
  // frozen at x(0) before t = 0 and the pre-history noise is zero, so
  // e(s < 0) = 2 (x0 - x_g(s)).
  e_prefill_.resize(lag_p_);
  for (std::size_t j = 0; j < lag_p_; ++j) {
    const double tj = (static_cast<double>(j) - static_cast<double>(lag_p_)) * sc_.dt;
    e_prefill_[j] = 2.0 * (sc_.x0 - rotating_targets(goal_, md, tj).first);
  }
}

double OscillatorPlan::row_time(std::size_t i) const {
  return static_cast<double>(i * sc_.output_stride) * sc_.dt;
}

void OscillatorPlan::run_trajectory(NoiseSource& noise, double* X_out,
                                    double* P_out) const {
  const OscillatorModel& md = sc_.model;
  const double dt = sc_.dt;
  const double mw = md.m * md.omega;
  const double record_noise_scale = 1.0 / (dt * std::sqrt(md.k * md.eta));

  double x = sc_.x0, p = sc_.p0;

  NoiseHistory hist(dt, sc_.tau_i, sc_.tau_p + sc_.epsilon);
  for (const double e_pre : e_prefill_) {
    hist.increments.push(0.0);
    hist.error_samples.push(e_pre);
  }

  const bool useExp = sc_.strategy == OscillatorStrategy::XpIntegral;
  const bool useBox = sc_.strategy == OscillatorStrategy::XIntegral ||
                      sc_.strategy == OscillatorStrategy::XProportionalIntegral;
  ExponentialFilterState expFilter(useExp ? window_w_ : 1);
  ModulatedBoxcarState boxcar(useBox ? window_w_ : 1, md.omega, md.m);

  std::size_t row = 0;
  {
    const auto [X, Pr] = to_rotating_frame(x, p, md, 0.0);
    X_out[row] = X;
    P_out[row] = Pr;
    ++row;
  }

  for (std::size_t n = 0; n < nsteps_; ++n) {
    double dW = 0.0, e_n = 0.0;
    if (!deterministic_) {
      dW = noise.sample_increment(dt);
      hist.increments.push(dW);
      e_n = 2.0 * (x - xg_[n]) + dW * record_noise_scale;
      hist.error_samples.push(e_n);
    }

    double fx = 0.0, fp = 0.0;
    switch (sc_.strategy) {
      case OscillatorStrategy::XpProportional: {
        const double e = deterministic_ ? 2.0 * (x - xg_[n])
                                        : hist.error_samples.lagged(lag_p_);
        fx = gPx_[n] * e;
        fp = gPp_[n] * e;
        break;
      }
      case OscillatorStrategy::XpIntegral: {
        const double J = expFilter.value();
        fx = gIx_[n] * J;
        fp = gIp_[n] * J;
        break;
      }
      case OscillatorStrategy::XProportional:
        fp = gPp_[n] * hist.error_samples.lagged(lag_p_);
        break;
      case OscillatorStrategy::XIntegral: {
        const double J_est = -mw * boxcar.Jx() * sin_wt_[n] + boxcar.Jp() * cos_wt_[n];
        fp = gIp_[n] * J_est;
        break;
      }
      case OscillatorStrategy::XProportionalIntegral: {
        const double J_est = -mw * boxcar.Jx() * sin_wt_[n] + boxcar.Jp() * cos_wt_[n];
        fp = gPp_[n] * hist.error_samples.lagged(lag_p_) + gIp_[n] * J_est;
        break;
      }
    }

    if (useExp) expFilter.update(hist.error_samples);
    if (useBox) boxcar.update(e_n, cos_wt_[n], sin_wt_[n]);

    const double xn1 = M11_ * x + M12_ * p + drive_x_[n];
    const double pn1 = M21_ * x + M22_ * p + drive_p_[n];
    x = xn1 + dt * fx + nx_coef_[n] * dW;
    p = pn1 + dt * fp + np_coef_[n] * dW;

    if ((n + 1) % sc_.output_stride == 0) {
      const double t1 = static_cast<double>(n + 1) * dt;
      const auto [X, Pr] = to_rotating_frame(x, p, md, t1);
      X_out[row] = X;
      P_out[row] = Pr;
      ++row;
    }
  }
}

}  // namespace cmfb
