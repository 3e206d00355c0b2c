#pragma once

/**
 * @file feedback.hpp
 * @brief Error-signal construction and PI coefficient management: constant
 *        (alpha_p, alpha_i) pairs, the mixing-ratio parameterization
 *        alpha_p = (1-theta) f_pi, alpha_i = theta f_pi, and the scalar
 *        feedback amplitude alpha_p e(t - tau_p) + alpha_i J(t).
 */

#include <utility>
#include <vector>

#include "cmfb/stochastic.hpp"

namespace cmfb {

/// Proportional-integral controller coefficients. Immutable after
/// construction; shared read-only across trajectories.
struct PIController {
  double alpha_p = 0.0;  ///< proportional gain (rate)
  double alpha_i = 0.0;  ///< integral gain (rate)
  double tau_p = 0.0;    ///< actuation delay of the P channel (time)
  double tau_i = 0.0;    ///< filter memory of the I channel (time)
};

/// e(t) = j(t) - g(t): measured record minus setpoint.
double error_signal(double j, double g);

/// Mixing-ratio parameterization at fixed total strength:
/// returns ((1-theta) f_pi, theta f_pi) exactly. Throws for theta outside [0,1].
std::pair<double, double> from_mixing(double theta, double f_pi);

/// Convenience builder for a controller specified through (theta, f_pi).
PIController mixed_controller(double theta, double f_pi, double tau_p, double tau_i);

/**
 * Scalar amplitude multiplying the Hermitian feedback generator:
 * alpha_p * e(t - tau_p) + alpha_i * J. The delayed error sample is read from
 * hist.error_samples (0 during pre-history). t is accepted for interface
 * symmetry with time-dependent schedules; constant controllers ignore it.
 */
double feedback_amplitude(const PIController& ctrl, const NoiseHistory& hist,
                          double J, double t);

/// Per-step gain schedule (time-dependent coefficients precomputed on the
/// simulation grid, as used by the oscillator strategies).
using GainSchedule = std::vector<double>;

}  // namespace cmfb
