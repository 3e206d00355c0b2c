#pragma once

/**
 * @file oscillator.hpp
 * @brief Gaussian-moment simulation of a continuously measured, thermally
 *        damped harmonic oscillator under P/I/PI feedback with x&p or x-only
 *        actuation: second-moment ODEs, first-moment SDE steppers,
 *        rotating-frame machinery, period-averaged and delay-ODE references,
 *        drive compensation, and the error metric.
 *
 * Units: hbar = 1; times in 1/omega with the oscillator period T = 2*pi/omega.
 * The conditional state stays Gaussian, so each trajectory is five reals:
 * means (x, p) and second moments (Vx, Vp, Cxp). The second moments obey a
 * deterministic ODE system independent of the feedback and the record, so a
 * single table is shared read-only across all trajectories.
 *
 * First-moment steppers use an exponential-Euler splitting: the stiff linear
 * part (rotation + damping + goal drive) is propagated exactly over dt via
 * variation of constants, while feedback drifts enter at first order and
 * noise at the Ito point. A naive Euler discretization of the same equations
 * accumulates an O(dt) resonant bias of order unity over the standard run
 * length and cannot meet the convergence tolerances; the splitting form
 * realizes the same continuous-time equations without that artifact.
 */

#include <array>
#include <cstddef>
#include <utility>
#include <vector>

#include "cmfb/stochastic.hpp"

namespace cmfb {

/// Oscillator and measurement parameters.
struct OscillatorModel {
  double m = 1.0;       ///< mass
  double omega = 1.0;   ///< angular frequency
  double gamma = 0.02;  ///< damping rate
  double n_bath = 1.0;  ///< mean bath occupation N
  double k = 0.02;      ///< measurement strength
  double eta = 0.4;     ///< quantum efficiency in (0, 1]

  double period() const;  ///< T = 2*pi/omega

  /// Validates parameter ranges; warns (stderr) outside the weak-coupling
  /// regime k, gamma < 0.1 m omega^2 where the moment description is derived.
  void validate() const;
};

/// Gaussian conditional state: first moments plus (shared) second moments.
struct GaussianMoments {
  double mean_x = 0.0;
  double mean_p = 0.0;
  double Vx = 0.5;
  double Vp = 0.5;
  double Cxp = 0.0;
};

/**
 * Rotating-frame control target. Xg and Pg are the values used for actuation;
 * when drive compensation is enabled they are the true targets divided by
 * compensation_alpha (which stays 1 when compensation is off).
 */
struct ControlGoal {
  double Xg = 0.0;
  double Pg = 0.0;
  double compensation_alpha = 1.0;
};

/// Deterministic second-moment table on the simulation grid.
struct SecondMomentTable {
  double dt = 0.0;
  std::vector<double> Vx, Vp, Cxp;  ///< one entry per grid point, t_n = n dt
  double Vs = 0.0;                  ///< steady Vx (final row)
  double Vps = 0.0;                 ///< steady Vp
  double Cs = 0.0;                  ///< steady Cxp
  bool converged = false;           ///< residual of the ODE at t_final below tolerance

  std::size_t rows() const { return Vx.size(); }
};

/**
 * Integrate the second-moment equations (RK4 on the simulation grid):
 *
 *   dVx/dt  = -2 g Vx  + g(2N+1)/(m w) + (2/m) Cxp - 4 k eta Vx^2
 *   dVp/dt  = -2 g Vp  + g(2N+1)/(m w) - 2 m w^2 Cxp - 4 k eta Cxp^2 + k
 *   dCxp/dt = -4 g Cxp + Vp/m - m w^2 Vx - 4 k eta Cxp Vx
 *
 * (g = gamma, w = omega). Initial default is the coherent state
 * (0.5, 0.5, 0) for m = omega = 1. Every row is checked against the
 * Heisenberg bound Vx Vp - Cxp^2 >= 0.25 - 1e-9 (NumericalError on failure).
 * The converged flag records whether the ODE residual at t_final is below
 * 1e-6 in each component.
 */
SecondMomentTable second_moments_evolve(const OscillatorModel& model,
                                        std::array<double, 3> initial, double dt,
                                        double t_final);

/// Laboratory-frame goal trajectory:
/// x_g =  Xg cos(wt) + Pg sin(wt)/(m w),  p_g = -m w Xg sin(wt) + Pg cos(wt).
std::pair<double, double> rotating_targets(const ControlGoal& goal,
                                           const OscillatorModel& model, double t);

/// Rotating-frame first moments (exact inverse of the lab construction):
/// X = x cos(wt) - p sin(wt)/(m w),  P = m w x sin(wt) + p cos(wt).
/// Round-trips with rotating_targets to machine precision.
std::pair<double, double> to_rotating_frame(double mean_x, double mean_p,
                                            const OscillatorModel& model, double t);

/// Compensation factor alpha = (2 k eta Vs + gamma/2) / (2 k eta Vs + gamma);
/// with x-only actuation the achievable steady mean is alpha * (Xg, Pg), so
/// enabling compensation rescales the actuation targets by 1/alpha.
double compensation_factor(const OscillatorModel& model,
                           const SecondMomentTable& table);

/**
 * Per-step operations. All steppers snap t to the grid (n = round(t/dt)),
 * read the table at row n, and advance the means with the splitting
 * propagator; the returned state carries the table's row n+1 second moments.
 * Stochastic steppers read the current increment as hist.increments.lagged(0)
 * where applicable, or take dW directly.
 */

/// x&p proportional feedback, tau_P = 0: gains alpha_p1 = 2 k eta Cxp(t),
/// alpha_p2 = -2 k eta Vx(t) cancel the measurement noise exactly, leaving
/// the deterministic flow
///   d<x> = (<p>/m) dt - gamma (<x> - x_g) dt - 4 k eta Vx (<x> - x_g) dt
///   d<p> = -m w^2 <x> dt - gamma (<p> - p_g) dt - 4 k eta Cxp (<x> - x_g) dt
/// with the full goal drive (gamma(x_g p + p_g x) compensation included).
GaussianMoments step_xp_proportional(const OscillatorModel& model,
                                     const ControlGoal& goal,
                                     const GaussianMoments& state,
                                     const SecondMomentTable& table, double t,
                                     double dt);

/// x&p proportional feedback with actuation delay tau_p > 0: the same gains
/// applied to the delayed record sample e(t - tau_p) (read from
/// hist.error_samples), plus the intrinsic conditional noise
/// 2 sqrt(eta k) (Vx, Cxp) dW.
GaussianMoments step_xp_proportional_delayed(const OscillatorModel& model,
                                             const ControlGoal& goal,
                                             const GaussianMoments& state,
                                             const SecondMomentTable& table,
                                             const NoiseHistory& hist, double t,
                                             double dt, double tau_p);

/// x&p integral feedback: drifts (-2 k eta Vx J, -2 k eta Cxp J) with J the
/// exponentially filtered record, intrinsic noise as above, full goal drive.
GaussianMoments step_xp_integral(const OscillatorModel& model,
                                 const ControlGoal& goal,
                                 const GaussianMoments& state,
                                 const SecondMomentTable& table, double J, double dW,
                                 double t, double dt);

/// x-only delayed proportional feedback (tau_P = T/4 + epsilon):
///   d<p> += 2 k eta Vx(t) m w e(t - tau_P) dt
/// where e is the goal-referenced record sample (so the dt-weighted delayed
/// record noise +2 sqrt(k eta) m w Vx dW(t - tau_P) is carried inside e);
/// only the gamma p_g(t) x part of the goal drive is available (partial
/// drive), and the intrinsic noise 2 sqrt(eta k) (Vx, Cxp) dW(t) remains.
GaussianMoments step_x_proportional_delayed(const OscillatorModel& model,
                                            const ControlGoal& goal,
                                            const GaussianMoments& state,
                                            const SecondMomentTable& table,
                                            const NoiseHistory& hist, double t,
                                            double dt, double epsilon);

/// x-only integral feedback: d<p> += -4 k eta Vx(t) J_est dt with J_est the
/// demodulated goal-error estimate (see momentum_estimator); partial drive
/// and intrinsic noise as in the delayed-P variant.
GaussianMoments step_x_integral(const OscillatorModel& model, const ControlGoal& goal,
                                const GaussianMoments& state,
                                const SecondMomentTable& table, double J_est,
                                double dW, double t, double dt);

/**
 * Period-averaged rotating-frame deviation dynamics Zdot = A(t) Z with
 *   A = [[-g - 2 k eta Vx,  2 k eta Cxp/(m w)^2],
 *        [-2 k eta Cxp,    -g - 2 k eta Vx     ]]
 * integrated by RK4 (midpoint rows interpolated from the table). Returns Z at
 * every grid point, Z[0] = Z0.
 */
std::vector<std::array<double, 2>> period_averaged_reference(
    const OscillatorModel& model, const SecondMomentTable& table,
    std::array<double, 2> Z0, double dt, double t_final);

/**
 * Rotating-frame deviation dynamics for delayed x-only P feedback,
 * Zdot(t) = -gamma Z(t) + A Z(t - tau_p) with the constant matrix
 *   A = -2 k eta [[ Vs c - Cs s/(m w),  -Vs s/(m w) - Cs c/(m w)^2],
 *                 [ m w Vs s + Cs c,     Vs c - Cs s/(m w)       ]]
 * (c = cos(w tau_p), s = sin(w tau_p)). History is held at Z0 on [-tau_p, 0].
 * A terminal |Z| below tolerance confirms zero steady-state mean bias.
 * Throws NumericalError if |Z| diverges (unstable parameter regime).
 */
std::vector<std::array<double, 2>> delayed_linear_ode_steady(
    const OscillatorModel& model, double Vs, double Cs, double tau_p,
    std::array<double, 2> Z0, double dt, double t_final);

/// Error metric Delta = sqrt( (1/2) E[ m w X~^2 + P~^2/(m w) ] ) over an
/// ensemble of rotating-frame deviations. Throws std::invalid_argument when
/// the sample set is empty.
double error_metric(const std::vector<std::array<double, 2>>& deviations,
                    const OscillatorModel& model);

/// Actuation strategies for trajectory runs.
enum class OscillatorStrategy {
  XpProportional,         ///< x&p P feedback (deterministic when tau_p = 0)
  XpIntegral,             ///< x&p I feedback (exponential filter)
  XProportional,          ///< x-only delayed P feedback
  XIntegral,              ///< x-only I feedback (modulated boxcar estimator)
  XProportionalIntegral,  ///< x-only PI mix with weight theta
};

/// Complete recipe for one oscillator run.
struct OscillatorScenario {
  OscillatorModel model{};
  OscillatorStrategy strategy = OscillatorStrategy::XpProportional;
  double Xg = 6.0;           ///< true rotating-frame targets
  double Pg = 4.0;
  double x0 = 10.0;          ///< initial means
  double p0 = 10.0;
  bool compensation = false; ///< rescale actuation targets by 1/alpha
  double tau_p = 0.0;        ///< actuation delay (P strategies)
  double epsilon = 0.0;      ///< extra delay on top of tau_p (x-only P robustness)
  double tau_i = 0.0;        ///< filter memory (I strategies)
  double theta = 1.0;        ///< PI mixing weight (x-only PI)
  double dt = 0.0;           ///< grid step
  double t_final = 400.0;
  std::size_t output_stride = 5;  ///< rows recorded every this many steps
};

/**
 * Precomputed per-scenario plan: second-moment table, gain/drive/trig
 * schedules, and delay bookkeeping. Trajectories produced by run_trajectory
 * are arithmetically identical to composing the per-step operations above;
 * the plan only hoists the per-step table and trigonometry lookups.
 */
class OscillatorPlan {
 public:
  explicit OscillatorPlan(const OscillatorScenario& sc);

  /// Rotating-frame samples (X, P) on the output grid; rows() values each.
  void run_trajectory(NoiseSource& noise, double* X_out, double* P_out) const;

  std::size_t rows() const { return n_rows_; }
  double row_time(std::size_t i) const;
  std::size_t steps() const { return nsteps_; }
  bool deterministic() const { return deterministic_; }
  double alpha() const { return goal_.compensation_alpha; }
  const SecondMomentTable& table() const { return table_; }
  const OscillatorScenario& scenario() const { return sc_; }
  const ControlGoal& goal() const { return goal_; }

 private:
  OscillatorScenario sc_;
  ControlGoal goal_{};
  SecondMomentTable table_;
  std::size_t nsteps_ = 0, n_rows_ = 0;
  std::size_t lag_p_ = 0, window_w_ = 0;
  bool deterministic_ = false;
  double sqek_ = 0.0;                 // sqrt(eta k)
  double M11_, M12_, M21_, M22_;      // exact damped-rotation propagator
  std::vector<double> gPx_, gPp_;     // P-part gains on the record sample
  std::vector<double> gIx_, gIp_;     // I-part gains on the filtered record
  std::vector<double> drive_x_, drive_p_;
  std::vector<double> xg_;            // lab-frame goal position at t_n
  std::vector<double> nx_coef_, np_coef_;
  std::vector<double> cos_wt_, sin_wt_;
  std::vector<double> e_prefill_;     // pre-history record samples (delays)
};

}  // namespace cmfb
