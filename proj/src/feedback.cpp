#include "cmfb/feedback.hpp"

#include <stdexcept>

namespace cmfb {

double error_signal(double j, double g) { return j - g; }

std::pair<double, double> from_mixing(double theta, double f_pi) {
  if (theta < 0.0 || theta > 1.0) {
    throw std::invalid_argument("from_mixing: theta must lie in [0, 1]");
  }
  if (f_pi < 0.0) {
    throw std::invalid_argument("from_mixing: f_pi must be nonnegative");
  }
  return {(1.0 - theta) * f_pi, theta * f_pi};
}

PIController mixed_controller(double theta, double f_pi, double tau_p, double tau_i) {
  const auto [ap, ai] = from_mixing(theta, f_pi);
  return PIController{ap, ai, tau_p, tau_i};
}

double feedback_amplitude(const PIController& ctrl, const NoiseHistory& hist,
                          double J, double /*t*/) {
  double amp = ctrl.alpha_i * J;
  if (ctrl.alpha_p != 0.0) {
    const GridRounding g = grid_align(ctrl.tau_p, hist.dt, "tau_p");
    amp += ctrl.alpha_p * hist.error_samples.lagged(g.steps);
  }
  return amp;
}

}  // namespace cmfb
