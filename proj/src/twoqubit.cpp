/**
 * @file twoqubit.cpp
 * @brief Two-qubit model operators and steppers (collective basis).
 *
 * The hot loops avoid dense 4x4 products: Lz is diagonal, so the measurement
 * dissipator and its commutators reduce to element-wise masks, and Lx has only
 * four equal entries, so left/right multiplication mixes two rows/columns.
 */

#include "cmfb/twoqubit.hpp"

#include <cmath>
#include <stdexcept>

#include "cmfb/errors.hpp"

namespace cmfb {

namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;

// d_i: diagonal of Lz in the collective basis |T1>, |T0>, |T-1>, |S>.
constexpr double kDz[4] = {1.0, 0.0, -1.0, 0.0};

// Lx B (rows 0 and 2 receive row 1; row 1 receives rows 0 + 2; row 3 is inert).
Mat4 lx_left(const Mat4& B) {
  Mat4 out;
  out.row(0) = kInvSqrt2 * B.row(1);
  out.row(1) = kInvSqrt2 * (B.row(0) + B.row(2));
  out.row(2) = kInvSqrt2 * B.row(1);
  out.row(3).setZero();
  return out;
}

// B Lx (column analogue of lx_left).
Mat4 lx_right(const Mat4& B) {
  Mat4 out;
  out.col(0) = kInvSqrt2 * B.col(1);
  out.col(1) = kInvSqrt2 * (B.col(0) + B.col(2));
  out.col(2) = kInvSqrt2 * B.col(1);
  out.col(3).setZero();
  return out;
}

// Lx^2 B with Lx^2 = 1/2 [[1,0,1,0],[0,2,0,0],[1,0,1,0],[0,0,0,0]].
Mat4 lx2_left(const Mat4& B) {
  Mat4 out;
  out.row(0) = 0.5 * (B.row(0) + B.row(2));
  out.row(1) = B.row(1);
  out.row(2) = out.row(0);
  out.row(3).setZero();
  return out;
}

Mat4 lx2_right(const Mat4& B) {
  Mat4 out;
  out.col(0) = 0.5 * (B.col(0) + B.col(2));
  out.col(1) = B.col(1);
  out.col(2) = out.col(0);
  out.col(3).setZero();
  return out;
}

double lz_expectation(const Mat4& rho) {
  return rho(0, 0).real() - rho(2, 2).real();
}

}  // namespace

TwoQubitModel::TwoQubitModel(double h1, double h2, double k, double eta)
    : h1_(h1), h2_(h2), k_(k), eta_(eta) {
  if (k <= 0.0) throw std::invalid_argument("measurement strength k must be positive");
  if (eta <= 0.0 || eta > 1.0)
    throw std::invalid_argument("efficiency eta must lie in (0, 1]");

  Lz_.setZero();
  for (int i = 0; i < 4; ++i) Lz_(i, i) = kDz[i];

  Lx_.setZero();
  Lx_(0, 1) = Lx_(1, 0) = Lx_(1, 2) = Lx_(2, 1) = kInvSqrt2;

  // h1 sigma_z1 + h2 sigma_z2 = (h1 + h2) Lz + (h1 - h2)(|T0><S| + |S><T0|).
  H_ = (h1 + h2) * Lz_;
  H_(1, 3) += (h1 - h2);
  H_(3, 1) += (h1 - h2);

  c_ = std::sqrt(k) * Lz_;
}

double measurement_current(const TwoQubitModel& model, const Mat4& rho, double dW,
                           double dt) {
  return 2.0 * lz_expectation(rho) +
         dW / (dt * std::sqrt(model.k() * model.eta()));
}

TwoQubitStepper::TwoQubitStepper(const TwoQubitModel& model, const PIController& ctrl)
    : model_(model),
      alpha_p_(ctrl.alpha_p),
      alpha_i_(ctrl.alpha_i),
      hs_(model.h1() + model.h2()),
      hd_(model.h1() - model.h2()),
      dlx_(ctrl.alpha_p * ctrl.alpha_p / (model.k() * model.eta())),
      sqek_(std::sqrt(model.eta() * model.k())),
      ap_over_sqek_(ctrl.alpha_p / std::sqrt(model.eta() * model.k())) {}

/**
 * Shared drift assembly. commutator_amp multiplies -i[Lx, rho] (the I term
 * and, for delayed feedback, the delayed P term). instantaneous_p switches on
 * the direct Wiseman-Milburn pieces -i alpha_p [Lx, {Lz, rho}]; the feedback
 * back-action (alpha_p^2/(k eta)) D[Lx] rho is present in both forms.
 */
Mat4 TwoQubitStepper::drift(const Mat4& rho, double commutator_amp,
                            bool instantaneous_p) const {
  const double k = model_.k();
  const cplx I(0.0, 1.0);

  Mat4 out;
  // -i[H, rho] (diagonal part) + k D[Lz] rho, both element-wise in d_i.
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) {
      const double dd = kDz[i] - kDz[j];
      out(i, j) = (-I * (hs_ * dd) - 0.5 * k * dd * dd) * rho(i, j);
    }
  }
  // -i[H, rho], singlet-triplet coupling for h1 != h2.
  if (hd_ != 0.0) {
    out.row(1) -= I * hd_ * rho.row(3);
    out.row(3) -= I * hd_ * rho.row(1);
    out.col(1) += I * hd_ * rho.col(3);
    out.col(3) += I * hd_ * rho.col(1);
  }

  const Mat4 rho_lx = lx_right(rho);

  if (instantaneous_p && alpha_p_ != 0.0) {
    // -i alpha_p [Lx, Lz rho + rho Lz]; (Lz rho + rho Lz)_ij = (d_i + d_j) rho_ij.
    Mat4 anti;
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) anti(i, j) = (kDz[i] + kDz[j]) * rho(i, j);
    out -= I * alpha_p_ * (lx_left(anti) - lx_right(anti));
  }

  if (dlx_ != 0.0) {
    // (alpha_p^2/(k eta)) D[Lx] rho.
    out += dlx_ * (lx_left(rho_lx) - 0.5 * (lx2_left(rho) + lx2_right(rho)));
  }

  if (commutator_amp != 0.0) {
    out -= I * commutator_amp * (lx_left(rho) - rho_lx);
  }
  return out;
}

Mat4 TwoQubitStepper::step_instantaneous(const Mat4& rho, double J, double dW,
                                         double dt) const {
  Mat4 d = drift(rho, alpha_i_ * J, /*instantaneous_p=*/true);

  // H[sqrt(eta k) Lz - i (alpha_p/sqrt(eta k)) Lx] rho.
  const cplx I(0.0, 1.0);
  Mat4 diff;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) diff(i, j) = sqek_ * (kDz[i] + kDz[j]) * rho(i, j);
  if (alpha_p_ != 0.0) {
    diff -= I * ap_over_sqek_ * (lx_left(rho) - lx_right(rho));
  }
  diff -= 2.0 * sqek_ * lz_expectation(rho) * rho;

  Mat4 next = rho + dt * d + dW * diff;
  return normalize(hermitize(next));
}

Mat4 TwoQubitStepper::step_delayed(const Mat4& rho, double feedback_amp, double dW,
                                   double dt) const {
  Mat4 d = drift(rho, feedback_amp, /*instantaneous_p=*/false);

  // sqrt(eta k) H[Lz] rho.
  Mat4 diff;
  const double lz = lz_expectation(rho);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      diff(i, j) = sqek_ * (kDz[i] + kDz[j] - 2.0 * lz) * rho(i, j);

  Mat4 next = rho + dt * d + dW * diff;
  return normalize(hermitize(next));
}

Mat4 TwoQubitStepper::mean_rhs(const Mat4& rho) const {
  return drift(rho, 0.0, /*instantaneous_p=*/true);
}

Mat4 step_no_delay(const TwoQubitModel& model, const PIController& ctrl,
                   const Mat4& rho, const NoiseHistory& hist, double J, double dt) {
  TwoQubitStepper stepper(model, ctrl);
  return stepper.step_instantaneous(rho, J, hist.increments.lagged(0), dt);
}

Mat4 step_with_delay(const TwoQubitModel& model, const PIController& ctrl,
                     const Mat4& rho, const NoiseHistory& hist, double J, double dt) {
  TwoQubitStepper stepper(model, ctrl);
  const double amp = feedback_amplitude(ctrl, hist, J, /*t=*/0.0);
  return stepper.step_delayed(rho, amp, hist.increments.lagged(0), dt);
}

Mat4 deterministic_mean_step(const TwoQubitModel& model, double alpha_p,
                             const Mat4& rho, double dt) {
  PIController ctrl{alpha_p, 0.0, 0.0, 0.0};
  TwoQubitStepper stepper(model, ctrl);
  const Mat4 k1 = stepper.mean_rhs(rho);
  const Mat4 k2 = stepper.mean_rhs(rho + 0.5 * dt * k1);
  const Mat4 k3 = stepper.mean_rhs(rho + 0.5 * dt * k2);
  const Mat4 k4 = stepper.mean_rhs(rho + dt * k3);
  Mat4 next = rho + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  return normalize(hermitize(next));
}

double analytic_T0_steady(const TwoQubitModel& model, double alpha_p) {
  const double g = model.h1() + model.h2();
  const double k = model.k();
  const double eta = model.eta();
  const double g2 = g * g, k2 = k * k, p2 = alpha_p * alpha_p;
  const double num = 4.0 * eta * g2 + eta * k2 + 8.0 * eta * eta * k2 + p2;
  const double den = 12.0 * g2 + 3.0 * eta * k2 + 8.0 * eta * eta * k2 + 3.0 * p2;
  return num / den;
}

TripletDecomposition component_sde_step(const TripletDecomposition& state,
                                        const TwoQubitModel& model,
                                        const PIController& ctrl,
                                        double j_delayed, double J, double dW,
                                        double dt) {
  if (model.h1() != model.h2())
    throw std::invalid_argument(
        "component-wise stepper requires h1 = h2 (decoupled singlet sector)");

  const double hs = model.h1() + model.h2();
  const double k = model.k();
  const double eta = model.eta();
  const double ap = ctrl.alpha_p;
  const double ai = ctrl.alpha_i;
  const double beta = ap * ap / (2.0 * k * eta);  // back-action rate per component
  const double sqek = std::sqrt(eta * k);
  const double sq2 = std::sqrt(2.0);
  const cplx I(0.0, 1.0);
  const bool delayed = ctrl.tau_p > 0.0;

  const double T1 = state.t1, T0 = state.t0, Tm1 = state.tm1;
  const cplx C11m = state.c11m, C01 = state.c01, C0m = state.c0m;
  const double lz = T1 - Tm1;
  const double im01 = C01.imag(), im0m = C0m.imag();
  const double re11m = C11m.real();

  double dT1, dT0, dTm1;
  cplx dC11m, dC01, dC0m;

  if (!delayed) {
    // Direct (tau_p = 0) equations: Wiseman-Milburn P terms + integral term.
    dT1 = (sq2 * (ap + ai * J) * im01 + beta * (T0 - T1 - re11m)) * dt +
          (2.0 * sqek * T1 * (1.0 - lz) + sq2 * (ap / sqek) * im01) * dW;
    dTm1 = (-sq2 * (ap - ai * J) * im0m + beta * (T0 - Tm1 - re11m)) * dt -
           (2.0 * sqek * Tm1 * (1.0 + lz) - sq2 * (ap / sqek) * im0m) * dW;
    dT0 = (sq2 * ap * (im0m - im01) - sq2 * ai * J * (im01 + im0m) +
           beta * (T1 + Tm1 - 2.0 * T0 + 2.0 * re11m)) *
              dt -
          (2.0 * sqek * T0 * lz + sq2 * (ap / sqek) * (im01 + im0m)) * dW;
    dC11m = (-2.0 * (I * hs + k) * C11m +
             (I * ap / sq2) * (std::conj(C01) + C0m) -
             (I * ai / sq2) * J * (C0m - std::conj(C01)) +
             beta * (T0 - C11m - 0.5 * (T1 + Tm1))) *
                dt +
            ((I * ap / std::sqrt(2.0 * eta * k)) * (std::conj(C01) - C0m) -
             2.0 * sqek * lz * C11m) *
                dW;
    dC01 = ((I * hs - 0.5 * k) * C01 - I * sq2 * ap * T1 -
            (I * ai / sq2) * J * (T1 - T0 + std::conj(C11m)) +
            beta * (std::conj(C01) + std::conj(C0m) - 0.5 * C0m - 1.5 * C01)) *
               dt +
           ((I * ap / std::sqrt(2.0 * eta * k)) * (T0 - T1 - std::conj(C11m)) +
            sqek * (1.0 - 2.0 * lz) * C01) *
               dW;
    dC0m = (-(I * hs + 0.5 * k) * C0m + I * sq2 * ap * Tm1 -
            (I * ai / sq2) * J * (C11m + Tm1 - T0) +
            beta * (std::conj(C01) + std::conj(C0m) - 1.5 * C0m - 0.5 * C01)) *
               dt +
           ((I * ap / std::sqrt(2.0 * eta * k)) * (T0 - Tm1 - C11m) -
            sqek * (1.0 + 2.0 * lz) * C0m) *
               dW;
  } else {
    // Delayed equations: the whole feedback drift is the plain commutator
    // -i c [Lx, rho] with c = alpha_p e(t - tau_p) + alpha_i J(t); the
    // back-action beta terms remain and the diffusion is Lz-only.
    const double c = ap * j_delayed + ai * J;
    dT1 = (sq2 * c * im01 + beta * (T0 - T1 - re11m)) * dt +
          2.0 * sqek * T1 * (1.0 - lz) * dW;
    dTm1 = (sq2 * c * im0m + beta * (T0 - Tm1 - re11m)) * dt -
           2.0 * sqek * Tm1 * (1.0 + lz) * dW;
    dT0 = (-sq2 * c * (im01 + im0m) +
           beta * (T1 + Tm1 - 2.0 * T0 + 2.0 * re11m)) *
              dt -
          2.0 * sqek * T0 * lz * dW;
    dC11m = (-2.0 * (I * hs + k) * C11m -
             (I * c / sq2) * (C0m - std::conj(C01)) +
             beta * (T0 - C11m - 0.5 * (T1 + Tm1))) *
                dt -
            2.0 * sqek * lz * C11m * dW;
    dC01 = ((I * hs - 0.5 * k) * C01 -
            (I * c / sq2) * (T1 - T0 + std::conj(C11m)) +
            beta * (std::conj(C01) + std::conj(C0m) - 0.5 * C0m - 1.5 * C01)) *
               dt +
           sqek * (1.0 - 2.0 * lz) * C01 * dW;
    dC0m = (-(I * hs + 0.5 * k) * C0m -
            (I * c / sq2) * (C11m + Tm1 - T0) +
            beta * (std::conj(C01) + std::conj(C0m) - 1.5 * C0m - 0.5 * C01)) *
               dt -
           sqek * (1.0 + 2.0 * lz) * C0m * dW;
  }

  TripletDecomposition next;
  next.t1 = T1 + dT1;
  next.t0 = T0 + dT0;
  next.tm1 = Tm1 + dTm1;
  next.c11m = C11m + dC11m;
  next.c01 = C01 + dC01;
  next.c0m = C0m + dC0m;

  const double tr = next.t1 + next.t0 + next.tm1;
  if (!(tr > 0.0))
    throw NumericalError("component-wise step produced a non-positive trace");
  next.t1 /= tr;
  next.t0 /= tr;
  next.tm1 /= tr;
  next.c11m /= tr;
  next.c01 /= tr;
  next.c0m /= tr;
  next.ts = 0.0;
  next.c0s = next.c1s = next.cms = cplx(0.0, 0.0);
  return next;
}

}  // namespace cmfb
