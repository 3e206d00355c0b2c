#include "cmfb/stochastic.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace cmfb {

GridRounding grid_align(double tau, double dt, const char* label) {
  GridRounding g;
  if (dt <= 0.0) throw std::invalid_argument("grid_align: dt must be positive");
  if (tau < 0.0) throw std::invalid_argument("grid_align: negative interval");
  g.steps = static_cast<std::size_t>(std::llround(tau / dt));
  g.effective = static_cast<double>(g.steps) * dt;
  if (tau > 0.0 && std::abs(g.effective - tau) / tau > 1e-9) {
    g.warned = true;
    std::fprintf(stderr,
                 "warning: %s = %.12g is not grid-aligned; using %.12g (%zu steps of dt = %.12g)\n",
                 label, tau, g.effective, g.steps, dt);
  }
  return g;
}

NoiseHistory::NoiseHistory(double dt_, double tau_i, double tau_p)
    : dt(dt_),
      increments(static_cast<std::size_t>(
                     std::ceil(std::max(std::max(tau_i, tau_p), 0.0) / dt_)) + 2),
      error_samples(increments.capacity()) {
  if (dt_ <= 0.0) throw std::invalid_argument("NoiseHistory: dt must be positive");
}

double NoiseHistory::delayed_increment(double tau_p) const {
  const GridRounding g = grid_align(tau_p, dt, "tau_p");
  if (g.steps >= increments.capacity()) {
    throw std::invalid_argument("delayed_increment: delay exceeds buffer capacity");
  }
  return increments.lagged(g.steps);
}

double filter_evaluate(const NoiseHistory& hist, const FilterSpec& spec,
                       const std::vector<double>& goal_samples) {
  if (hist.error_samples.pushes() == 0) {
    throw std::invalid_argument("filter_evaluate: empty history");
  }
  const GridRounding g = grid_align(spec.tau_i, hist.dt, "tau_i");
  const std::size_t W = g.steps;
  if (W == 0) throw std::invalid_argument("filter_evaluate: window shorter than one step");
  const double tau = static_cast<double>(W) * hist.dt;
  const double t_latest =
      (static_cast<double>(hist.error_samples.pushes()) - 1.0) * hist.dt;

  double acc = 0.0;
  for (std::size_t mi = 0; mi < W; ++mi) {
    // Sum oldest-first so the small tail terms do not vanish against a large
    // partial sum; the recursion comparison tolerance is 1e-10.
    const std::size_t lag = W - 1 - mi;
    double e = hist.error_samples.lagged(lag);
    if (lag < goal_samples.size()) e -= goal_samples[lag];
    switch (spec.kind) {
      case FilterSpec::Kind::ExponentialWindow:
        acc += e * std::exp(-static_cast<double>(lag) * hist.dt / tau);
        break;
      case FilterSpec::Kind::ModulatedBoxcar: {
        const double s = t_latest - static_cast<double>(lag) * hist.dt;
        acc += e * (spec.phase == FilterSpec::Phase::Cos ? std::cos(spec.omega * s)
                                                         : std::sin(spec.omega * s));
        break;
      }
    }
  }
  double scale = hist.dt / tau;
  if (spec.kind == FilterSpec::Kind::ModulatedBoxcar &&
      spec.phase == FilterSpec::Phase::Sin) {
    scale *= spec.mass * spec.omega;
  }
  return acc * scale;
}

double momentum_estimator(double Jx, double Jp, double t, double m, double omega) {
  return -m * omega * Jx * std::sin(omega * t) + Jp * std::cos(omega * t);
}

ExponentialFilterState::ExponentialFilterState(std::size_t window_steps)
    : W_(window_steps),
      decay_(std::exp(-1.0 / static_cast<double>(window_steps))),
      tail_(std::exp(-1.0) / static_cast<double>(window_steps)) {
  if (window_steps == 0) {
    throw std::invalid_argument("ExponentialFilterState: zero-length window");
  }
}

void ExponentialFilterState::update(const Ring& errors) {
  const double e_new = errors.lagged(0);
  const double e_old = errors.lagged(W_);
  J_ = decay_ * J_ + e_new / static_cast<double>(W_) - tail_ * e_old;
}

ModulatedBoxcarState::ModulatedBoxcarState(std::size_t window_steps, double omega,
                                           double mass)
    : W_(window_steps),
      omega_(omega),
      mass_(mass),
      cos_ring_(window_steps + 2),
      sin_ring_(window_steps + 2) {
  if (window_steps == 0) {
    throw std::invalid_argument("ModulatedBoxcarState: zero-length window");
  }
}

void ModulatedBoxcarState::update(double e, double t) {
  update(e, std::cos(omega_ * t), std::sin(omega_ * t));
}

void ModulatedBoxcarState::update(double e, double cos_wt, double sin_wt) {
  cos_ring_.push(e * cos_wt);
  sin_ring_.push(e * sin_wt);
  Sc_ += cos_ring_.lagged(0) - cos_ring_.lagged(W_);
  Ss_ += sin_ring_.lagged(0) - sin_ring_.lagged(W_);
}

}  // namespace cmfb
