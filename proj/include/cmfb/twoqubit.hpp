#pragma once

/**
 * @file twoqubit.hpp
 * @brief Two-qubit remote-entanglement model under a continuous half-parity
 *        measurement with P/I/PI feedback: operators, measurement current,
 *        stochastic steppers for zero and nonzero actuation delay, the
 *        deterministic ensemble-mean evolution for direct P feedback, its
 *        closed-form steady state, and the component-wise SDE stepper used as
 *        a cross-validation oracle.
 *
 * The working representation is the collective basis |T_1>, |T_0>, |T_-1>, |S>
 * where the measured operator L_z = (sigma_z1 + sigma_z2)/2 is diagonal.
 * Times are in units of 1/k for the standard parameter set (k = 1).
 *
 * Itô stochastic master equation with instantaneous (tau_p = 0) feedback:
 *
 *   drho = [ -i[H, rho] + k D[Lz] rho - i alpha_p [Lx, Lz rho + rho Lz]
 *            + (alpha_p^2/(k eta)) D[Lx] rho - i alpha_i J(t) [Lx, rho] ] dt
 *          + H[ sqrt(eta k) Lz - i (alpha_p/sqrt(eta k)) Lx ] rho dW
 *
 * and with delayed proportional actuation (tau_p > 0):
 *
 *   drho = [ -i[H, rho] + k D[Lz] rho + (alpha_p^2/(k eta)) D[Lx] rho
 *            - i (alpha_p e(t - tau_p) + alpha_i J(t)) [Lx, rho] ] dt
 *          + sqrt(eta k) H[Lz] rho dW
 *
 * where e = j is the measurement record (the setpoint is g = 0: the target
 * state |T_0> has <Lz> = 0).
 */

#include "cmfb/feedback.hpp"
#include "cmfb/quantum.hpp"
#include "cmfb/stochastic.hpp"

namespace cmfb {

/// Model parameters and collective-basis operators.
class TwoQubitModel {
 public:
  TwoQubitModel(double h1, double h2, double k, double eta);

  double h1() const { return h1_; }
  double h2() const { return h2_; }
  double k() const { return k_; }
  double eta() const { return eta_; }

  /// Half-parity measurement operator, diag(1, 0, -1, 0) in the collective basis.
  const Mat4& Lz() const { return Lz_; }
  /// Collective transverse drive (feedback generator).
  const Mat4& Lx() const { return Lx_; }
  /// Qubit Hamiltonian h1 sigma_z1 + h2 sigma_z2 in the collective basis.
  const Mat4& H() const { return H_; }
  /// Measurement (collapse) operator c = sqrt(k) Lz.
  const Mat4& c() const { return c_; }

 private:
  double h1_, h2_, k_, eta_;
  Mat4 Lz_, Lx_, H_, c_;
};

/// j(t) = 2 <Lz> + (dW/dt)/sqrt(k eta): the homodyne record sample associated
/// with the increment dW over a step of length dt.
double measurement_current(const TwoQubitModel& model, const Mat4& rho, double dW,
                           double dt);

/**
 * Precomputed stepper for one (model, controller) pair. The per-step routines
 * are pure: they take the pre-step state and the current noise/filter scalars
 * and return the normalized post-step state. Callers running delayed feedback
 * are responsible for the history bookkeeping (push dW and e each step).
 */
class TwoQubitStepper {
 public:
  TwoQubitStepper(const TwoQubitModel& model, const PIController& ctrl);

  /// One Euler-Maruyama step of the tau_p = 0 equation above.
  Mat4 step_instantaneous(const Mat4& rho, double J, double dW, double dt) const;

  /// One Euler-Maruyama step of the tau_p > 0 equation; feedback_amp is the
  /// scalar alpha_p e(t - tau_p) + alpha_i J(t).
  Mat4 step_delayed(const Mat4& rho, double feedback_amp, double dW, double dt) const;

  /// Drift of the deterministic ensemble-mean equation (P feedback only):
  /// the tau_p = 0 drift with the alpha_i and noise terms removed.
  Mat4 mean_rhs(const Mat4& rho) const;

  const TwoQubitModel& model() const { return model_; }

 private:
  Mat4 drift(const Mat4& rho, double commutator_amp, bool instantaneous_p) const;

  TwoQubitModel model_;
  double alpha_p_, alpha_i_;
  double hs_, hd_;     // h1 + h2 (collective splitting), h1 - h2 (singlet coupling)
  double dlx_;         // alpha_p^2 / (k eta)
  double sqek_;        // sqrt(eta k)
  double ap_over_sqek_;
};

/**
 * [Convenience wrappers matching the operation contracts.]
 * Both steppers read the current increment as hist.increments.lagged(0), so
 * the caller pushes dW (and the record sample e) for the step before calling.
 */
Mat4 step_no_delay(const TwoQubitModel& model, const PIController& ctrl,
                   const Mat4& rho, const NoiseHistory& hist, double J, double dt);
Mat4 step_with_delay(const TwoQubitModel& model, const PIController& ctrl,
                     const Mat4& rho, const NoiseHistory& hist, double J, double dt);

/// One fourth-order Runge-Kutta step of the deterministic ensemble-mean
/// equation for direct (tau_p = 0) proportional feedback.
Mat4 deterministic_mean_step(const TwoQubitModel& model, double alpha_p,
                             const Mat4& rho, double dt);

/**
 * Closed-form expression for the steady-state |T_0> population of the
 * deterministic mean equation:
 *
 *   (4 eta g^2 + eta k^2 + 8 eta^2 k^2 + alpha_p^2)
 *   / (12 g^2 + 3 eta k^2 + 8 eta^2 k^2 + 3 alpha_p^2),   g = h1 + h2.
 *
 * Numerical integration of mean_rhs converges to a different value whenever
 * g or alpha_p is nonzero (see the steady-state acceptance check); the
 * discrepancy is documented there. This function evaluates the printed
 * closed form verbatim.
 */
double analytic_T0_steady(const TwoQubitModel& model, double alpha_p);

/**
 * Component-wise Euler-Maruyama step of the population/coherence SDEs in the
 * collective basis; serves exclusively as a cross-validation oracle for the
 * matrix steppers under shared noise. Requires h1 = h2 (the singlet sector
 * decouples and stays empty, so six components close on themselves; that is
 * exactly the case the component equations cover). j_delayed is the delayed
 * record sample e(t - tau_p), ignored when ctrl.tau_p = 0. The returned
 * components are renormalized by the trace.
 */
TripletDecomposition component_sde_step(const TripletDecomposition& state,
                                        const TwoQubitModel& model,
                                        const PIController& ctrl,
                                        double j_delayed, double J, double dW,
                                        double dt);

}  // namespace cmfb
