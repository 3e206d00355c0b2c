#pragma once

/**
 * @file quantum.hpp
 * @brief Dense 4x4 density-matrix primitives: Lindblad dissipator, homodyne
 *        innovation superoperator, Wootters concurrence, and the
 *        triplet/singlet decomposition used by the two-qubit steppers.
 *
 * Conventions (hbar = 1):
 *   D[A]rho = A rho A^+ - (A^+ A rho + rho A^+ A)/2
 *   H[A]rho = A rho + rho A^+ - Tr[(A + A^+) rho] rho
 *
 * Two bases appear. The computational product basis orders states as
 * |00>, |01>, |10>, |11| (qubit 1 first); concurrence is defined there.
 * The collective basis orders states as |T_1>, |T_0>, |T_-1>, |S> and is
 * where the two-qubit steppers operate, because the half-parity measurement
 * operator L_z is diagonal in it.
 */

#include <Eigen/Dense>

#include <complex>

namespace cmfb {

using cplx = std::complex<double>;
using Mat4 = Eigen::Matrix4cd;
using Vec4 = Eigen::Vector4cd;

/// Lindblad dissipator D[A]rho. Trace-free for any A.
Mat4 dissipator(const Mat4& A, const Mat4& rho);

/// Measurement-backaction (innovation) superoperator H[A]rho. Trace-free;
/// vanishes when rho is a pure eigenstate of Hermitian A.
Mat4 innovation(const Mat4& A, const Mat4& rho);

/// Tr[A rho]; real to rounding when A is Hermitian and rho is a valid state.
cplx expectation(const Mat4& A, const Mat4& rho);

/// rho / Tr[rho]. Throws NumericalError when |Tr[rho]| < 1e-14, which signals
/// integrator blow-up rather than a recoverable state.
Mat4 normalize(const Mat4& rho);

/// (rho + rho^+)/2: removes the anti-Hermitian rounding dust accumulated by
/// explicit stochastic steps. A no-op up to rounding for exact dynamics.
Mat4 hermitize(const Mat4& rho);

/// Smallest eigenvalue of the Hermitian part of rho (positivity diagnostics).
double min_eigenvalue(const Mat4& rho);

/// True iff rho + shift*I admits a Cholesky factorization, i.e. the smallest
/// eigenvalue of rho exceeds -shift. Much cheaper than an eigensolve; used as
/// the per-step positivity monitor.
bool is_positive_shifted(const Mat4& rho, double shift);

/**
 * Wootters concurrence of a two-qubit state given in the computational
 * product basis: C = max(0, l1 - l2 - l3 - l4) with l_i the decreasing
 * square roots of the (clamped) eigenvalues of rho * (sy x sy) rho^* (sy x sy).
 *
 * Throws std::invalid_argument for inputs that are not approximately
 * Hermitian, unit-trace, and positive (beyond the Euler-step tolerance).
 */
double concurrence(const Mat4& rho);

/**
 * Populations and coherences of a computational-basis state in the collective
 * basis |T_1>, |T_0>, |T_-1>, |S>. Coherences use the first index as the bra:
 * c01 = <T_0|rho|T_1> and so on.
 */
struct TripletDecomposition {
  double t1 = 0.0;   ///< <T_1|rho|T_1>
  double t0 = 0.0;   ///< <T_0|rho|T_0>
  double tm1 = 0.0;  ///< <T_-1|rho|T_-1>
  double ts = 0.0;   ///< <S|rho|S>
  cplx c11m;         ///< <T_1|rho|T_-1>
  cplx c01;          ///< <T_0|rho|T_1>
  cplx c0m;          ///< <T_0|rho|T_-1>
  cplx c0s;          ///< <T_0|rho|S>
  cplx c1s;          ///< <T_1|rho|S>
  cplx cms;          ///< <T_-1|rho|S>

  /// Build directly from a density matrix already expressed in the collective
  /// basis (the steppers' working representation).
  static TripletDecomposition from_collective(const Mat4& rho_collective);
};

/// Decompose a computational-basis state into collective-basis components.
TripletDecomposition triplet_decompose(const Mat4& rho_computational);

/// Unitary whose columns are |T_1>, |T_0>, |T_-1>, |S> in the computational
/// basis; maps collective-basis vectors to computational-basis vectors.
const Mat4& collective_basis();

/// sigma_y (x) sigma_y in the computational basis (spin-flip kernel).
const Mat4& spin_flip_yy();

/// Change of representation: rho_computational = U rho_collective U^+.
Mat4 collective_to_computational(const Mat4& rho_collective);

}  // namespace cmfb
