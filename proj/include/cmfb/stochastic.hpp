#pragma once

/**
 * @file stochastic.hpp
 * @brief Wiener-increment generation with deterministic seeding, the lag/ring
 *        buffers backing delayed feedback, and the integral-filter kernels
 *        (truncated exponential window and modulated boxcar).
 *
 * Grid conventions: all delays and filter memories are rounded to integer
 * multiples of the step dt (with a warning when the relative rounding error
 * exceeds 1e-9). Pre-history samples are zero: lagged lookups reaching before
 * t = 0 return 0, so feedback ramps in as real data accumulates.
 */

#include <cstddef>
#include <cstdint>
#include <random>
#include <vector>

namespace cmfb {

/// Deterministic per-trajectory Gaussian increment stream. Trajectory i of an
/// ensemble uses seed base_seed + i.
class NoiseSource {
 public:
  explicit NoiseSource(std::uint64_t seed) : gen_(seed) {}

  /// One Wiener increment: N(0, dt) sample. dt must be positive.
  double sample_increment(double dt) { return unit_(gen_) * std::sqrt(dt); }

 private:
  std::mt19937_64 gen_;
  std::normal_distribution<double> unit_{0.0, 1.0};
};

/// Fixed-capacity lag buffer. lagged(0) is the most recent push; lags that
/// reach past the first push return the pre-history value (default 0).
class Ring {
 public:
  explicit Ring(std::size_t capacity, double prehistory = 0.0)
      : buf_(capacity > 0 ? capacity : 1, prehistory), pre_(prehistory) {}

  void push(double v) {
    buf_[head_] = v;
    head_ = (head_ + 1) % buf_.size();
    ++count_;
  }

  double lagged(std::size_t lag) const {
    if (lag >= count_) return pre_;
    // head_ points one past the most recent element.
    const std::size_t idx = (head_ + buf_.size() - 1 - (lag % buf_.size())) % buf_.size();
    return buf_[idx];
  }

  std::size_t capacity() const { return buf_.size(); }
  std::uint64_t pushes() const { return count_; }

 private:
  std::vector<double> buf_;
  std::size_t head_ = 0;
  std::uint64_t count_ = 0;
  double pre_ = 0.0;
};

/// Result of aligning a time interval to the step grid.
struct GridRounding {
  std::size_t steps = 0;   ///< round(tau/dt)
  double effective = 0.0;  ///< steps * dt
  bool warned = false;     ///< relative rounding error exceeded 1e-9
};

/// Round tau to whole steps; warns on stderr (once per call site semantics are
/// the caller's concern) when |steps*dt - tau| / tau > 1e-9. label names the
/// quantity in the warning text.
GridRounding grid_align(double tau, double dt, const char* label);

/// Record of the noise and error-signal samples over the feedback memory
/// window of one trajectory.
struct NoiseHistory {
  double dt;
  Ring increments;     ///< dW samples, one per step
  Ring error_samples;  ///< e(s) samples, one per step

  /// Capacity covers max(tau_i, tau_p) plus slack.
  NoiseHistory(double dt_, double tau_i, double tau_p);

  /// dW(t - tau_p); 0 while t < tau_p (pre-history convention).
  double delayed_increment(double tau_p) const;
};

/// Integral-filter kernel description.
struct FilterSpec {
  enum class Kind { ExponentialWindow, ModulatedBoxcar };
  enum class Phase { Cos, Sin };

  Kind kind = Kind::ExponentialWindow;
  double tau_i = 0.0;         ///< window length; integer multiple of dt after alignment
  Phase phase = Phase::Cos;   ///< ModulatedBoxcar only
  double omega = 0.0;         ///< modulation frequency (ModulatedBoxcar)
  double mass = 1.0;          ///< oscillator mass; Sin variant is scaled by mass*omega
};

/**
 * Direct (summation) evaluation of a filter over the stored error samples.
 *
 * ExponentialWindow: J = (1/tau) * sum_{m=0}^{W-1} exp(-m dt/tau) e(t - m dt) dt
 * ModulatedBoxcar:   J = (s/tau) * sum_{m=0}^{W-1} e(t - m dt) f(omega (t - m dt)) dt
 * with f = cos, s = 1 for the Cos phase and f = sin, s = mass*omega for Sin;
 * tau = W dt, W = round(spec.tau_i / dt). Sample times are implied by the push
 * count: the first push is t = 0, so the most recent sample sits at
 * t = (pushes - 1) dt. goal_samples, when nonempty, are subtracted from the
 * stored samples (index aligned with lag: goal_samples[m] pairs with the
 * sample m steps back); production code stores goal-referenced errors and
 * passes an empty vector.
 *
 * This is the reference evaluator; the per-step recursions below match it to
 * better than 1e-10 and are what the simulation loops use.
 */
double filter_evaluate(const NoiseHistory& hist, const FilterSpec& spec,
                       const std::vector<double>& goal_samples);

/// Combined momentum-deviation estimator from the two modulated-boxcar
/// channels: -m*omega*Jx*sin(omega t) + Jp*cos(omega t).
double momentum_estimator(double Jx, double Jp, double t, double m, double omega);

/**
 * O(1)-per-step exponential window state:
 *   J_{n+1} = exp(-1/W) J_n + (1/W) e_n - exp(-1) (1/W) e_{n-W}.
 * The window length is tau = W dt; expanding the recursion reproduces the
 * truncated-exponential direct sum with samples older than W steps cancelled.
 */
class ExponentialFilterState {
 public:
  explicit ExponentialFilterState(std::size_t window_steps);

  /// Advance with the newest error sample; errors must already contain e_n at
  /// lag 0 (i.e. push first, then update).
  void update(const Ring& errors);

  double value() const { return J_; }

 private:
  std::size_t W_;
  double decay_;  // exp(-1/W)
  double tail_;   // exp(-1)/W
  double J_ = 0.0;
};

/**
 * O(1)-per-step modulated boxcar pair: rolling sums of e(s)cos(omega s) and
 * e(s)sin(omega s) over the last W steps, exposed as the two quadrature
 * estimates Jx = Sc/W and Jp = mass*omega*Ss/W.
 */
class ModulatedBoxcarState {
 public:
  ModulatedBoxcarState(std::size_t window_steps, double omega, double mass);

  /// Advance with the newest error sample taken at absolute time t.
  void update(double e, double t);

  /// Hot-loop variant with precomputed cos(omega t), sin(omega t); identical
  /// arithmetic to update(e, t).
  void update(double e, double cos_wt, double sin_wt);

  double Jx() const { return Sc_ / static_cast<double>(W_); }
  double Jp() const { return mass_ * omega_ * Ss_ / static_cast<double>(W_); }

 private:
  std::size_t W_;
  double omega_, mass_;
  Ring cos_ring_, sin_ring_;
  double Sc_ = 0.0, Ss_ = 0.0;
};

}  // namespace cmfb
