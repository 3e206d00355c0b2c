/**
 * @file test_quantum.cpp
 * @brief Oracle tests for the density-matrix primitives: superoperator
 *        identities, hand-computed concurrence values, and basis-change
 *        round trips.
 */

#include "catch_amalgamated.hpp"

#include <cmath>
#include <complex>
#include <random>

#include "cmfb/errors.hpp"
#include "cmfb/quantum.hpp"

using namespace cmfb;

namespace {

constexpr cplx kI{0.0, 1.0};

/// Reproducible random density matrix: rho = G G^+ / Tr[G G^+].
Mat4 random_density(std::uint32_t seed) {
  std::mt19937 gen(seed);
  std::normal_distribution<double> n01;
  Mat4 G;
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c) G(r, c) = cplx(n01(gen), n01(gen));
  Mat4 rho = G * G.adjoint();
  return rho / rho.trace();
}

/// Reproducible random (not necessarily Hermitian) matrix.
Mat4 random_matrix(std::uint32_t seed) {
  std::mt19937 gen(seed);
  std::normal_distribution<double> n01;
  Mat4 A;
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c) A(r, c) = cplx(n01(gen), n01(gen));
  return A;
}

/// Kronecker product of two 2x2 matrices (qubit 1 first, matching the
/// computational basis order |00>, |01>, |10>, |11>).
Mat4 kron2(const Eigen::Matrix2cd& A, const Eigen::Matrix2cd& B) {
  Mat4 out;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      out.block<2, 2>(2 * i, 2 * j) = A(i, j) * B;
  return out;
}

/// Single-qubit unitary from two angles.
Eigen::Matrix2cd qubit_unitary(double theta, double phi) {
  Eigen::Matrix2cd U;
  U << std::cos(theta), -std::exp(kI * phi) * std::sin(theta),
      std::exp(-kI * phi) * std::sin(theta), std::cos(theta);
  return U;
}

Mat4 pure(const Vec4& psi) { return psi * psi.adjoint() / psi.squaredNorm(); }

const Mat4 kLz = [] {
  Mat4 m;
  m.setZero();
  m(0, 0) = 1.0;
  m(2, 2) = -1.0;
  return m;
}();

}  // namespace

TEST_CASE("dissipator is trace-free and annihilates diagonal states of a "
          "diagonal operator") {
  for (std::uint32_t s = 1; s <= 5; ++s) {
    const Mat4 A = random_matrix(100 + s);
    const Mat4 rho = random_density(200 + s);
    REQUIRE(std::abs(dissipator(A, rho).trace()) < 1e-12);
  }
  Mat4 diag_rho;
  diag_rho.setZero();
  diag_rho(0, 0) = 0.3;
  diag_rho(1, 1) = 0.25;
  diag_rho(2, 2) = 0.25;
  diag_rho(3, 3) = 0.2;
  REQUIRE(dissipator(kLz, diag_rho).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("dissipator decays coherences of the measured operator at the "
          "expected rate") {
  // rho = |+><+| with |+> = (|T_1> + |T_0>)/sqrt(2): the (0,1) coherence sees
  // Lz rho Lz = 0 there and -(1/2){Lz^2, rho} = -(1/2) rho_01, so
  // D[Lz]rho(0,1) = -(1/2)(1/2) = -1/4.
  Vec4 plus;
  plus << 1.0, 1.0, 0.0, 0.0;
  const Mat4 d = dissipator(kLz, pure(plus));
  REQUIRE(std::abs(d(0, 1) - cplx(-0.25, 0.0)) < 1e-14);
  REQUIRE(std::abs(d(0, 0)) < 1e-14);
}

TEST_CASE("innovation superoperator matches the hand evaluation and vanishes "
          "on measurement eigenstates") {
  // Equal T_1 / T_-1 mixture: <Lz> = 0, so H[Lz]rho = Lz rho + rho Lz
  // = |T_1><T_1| - |T_-1><T_-1|.
  Mat4 rho;
  rho.setZero();
  rho(0, 0) = 0.5;
  rho(2, 2) = 0.5;
  Mat4 expected;
  expected.setZero();
  expected(0, 0) = 1.0;
  expected(2, 2) = -1.0;
  REQUIRE((innovation(kLz, rho) - expected).cwiseAbs().maxCoeff() < 1e-14);

  Vec4 t1;
  t1 << 1.0, 0.0, 0.0, 0.0;
  REQUIRE(innovation(kLz, pure(t1)).cwiseAbs().maxCoeff() < 1e-14);

  for (std::uint32_t s = 1; s <= 5; ++s) {
    const Mat4 A = random_matrix(300 + s);
    const Mat4 rho_r = random_density(400 + s);
    REQUIRE(std::abs(innovation(A, rho_r).trace()) < 1e-12);
  }
}

TEST_CASE("expectation reproduces matrix elements") {
  Vec4 t1;
  t1 << 1.0, 0.0, 0.0, 0.0;
  REQUIRE(std::abs(expectation(kLz, pure(t1)) - cplx(1.0, 0.0)) < 1e-15);

  Mat4 rho;
  rho.setZero();
  rho(0, 0) = 0.7;
  rho(2, 2) = 0.3;
  REQUIRE(std::abs(expectation(kLz, rho) - cplx(0.4, 0.0)) < 1e-15);
}

TEST_CASE("normalize rescales and rejects trace collapse") {
  const Mat4 rho = random_density(7);
  const Mat4 two = 2.0 * rho;
  REQUIRE((normalize(two) - rho).cwiseAbs().maxCoeff() < 1e-14);

  Mat4 zero;
  zero.setZero();
  REQUIRE_THROWS_AS(normalize(zero), NumericalError);
}

TEST_CASE("hermitize averages with the adjoint") {
  const Mat4 A = random_matrix(11);
  const Mat4 H = hermitize(A);
  REQUIRE((H - Mat4(H.adjoint())).cwiseAbs().maxCoeff() < 1e-15);
  REQUIRE((H - 0.5 * (A + Mat4(A.adjoint()))).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("positivity diagnostics agree with known spectra") {
  Mat4 rho;
  rho.setZero();
  rho(0, 0) = 0.5;
  rho(1, 1) = 0.5;
  REQUIRE(std::abs(min_eigenvalue(rho)) < 1e-14);
  REQUIRE(is_positive_shifted(rho, 1e-12));

  Mat4 neg;
  neg.setZero();
  neg(0, 0) = 1.1;
  neg(1, 1) = -1e-4;
  neg(2, 2) = -1e-4;
  neg(3, 3) = 1e-4;
  REQUIRE(std::abs(min_eigenvalue(neg) + 1e-4) < 1e-15);
  REQUIRE_FALSE(is_positive_shifted(neg, 1e-8));
  REQUIRE(is_positive_shifted(neg, 1e-3));

  Mat4 nan_rho = rho;
  nan_rho(3, 3) = std::nan("");
  REQUIRE_FALSE(is_positive_shifted(nan_rho, 1e-3));

  // Consistency on random states.
  for (std::uint32_t s = 1; s <= 5; ++s) {
    const Mat4 r = random_density(500 + s);
    REQUIRE(min_eigenvalue(r) > -1e-12);
    REQUIRE(is_positive_shifted(r, 1e-9));
  }
}

TEST_CASE("concurrence of reference states") {
  // |T_0> = (|01> + |10>)/sqrt(2) is maximally entangled.
  Vec4 t0;
  t0 << 0.0, 1.0, 1.0, 0.0;
  REQUIRE(std::abs(concurrence(pure(t0)) - 1.0) < 1e-12);

  // Bell state (|00> + |11>)/sqrt(2).
  Vec4 bell;
  bell << 1.0, 0.0, 0.0, 1.0;
  REQUIRE(std::abs(concurrence(pure(bell)) - 1.0) < 1e-12);

  // Product states carry no entanglement.
  Vec4 p00, p01;
  p00 << 1.0, 0.0, 0.0, 0.0;
  p01 << 0.0, 1.0, 0.0, 0.0;
  REQUIRE(concurrence(pure(p00)) < 1e-10);
  REQUIRE(concurrence(pure(p01)) < 1e-10);
}

TEST_CASE("concurrence of Werner states follows max(0, (3p-1)/2)") {
  Vec4 t0;
  t0 << 0.0, 1.0, 1.0, 0.0;
  const Mat4 psi = pure(t0);
  const Mat4 id4 = Mat4::Identity();

  const auto werner = [&](double p) { return Mat4(p * psi + (1.0 - p) * 0.25 * id4); };

  REQUIRE(std::abs(concurrence(werner(0.5)) - 0.25) < 1e-12);
  REQUIRE(std::abs(concurrence(werner(0.8)) - 0.7) < 1e-12);
  REQUIRE(concurrence(werner(1.0 / 3.0)) < 1e-12);  // boundary of separability
  REQUIRE(concurrence(werner(0.2)) == 0.0);
}

TEST_CASE("concurrence is invariant under local unitaries") {
  Vec4 t0;
  t0 << 0.0, 1.0, 1.0, 0.0;
  Mat4 rho = 0.6 * pure(t0) + 0.4 * Mat4(random_density(42));
  rho = 0.5 * (rho + Mat4(rho.adjoint()));
  rho /= rho.trace();
  const double base = concurrence(rho);

  const Mat4 U = kron2(qubit_unitary(0.7, 1.1), qubit_unitary(-0.4, 2.3));
  const Mat4 rotated = U * rho * U.adjoint();
  REQUIRE(std::abs(concurrence(rotated) - base) < 1e-9);
}

TEST_CASE("concurrence rejects invalid inputs") {
  Mat4 bad = random_matrix(3);  // not Hermitian
  REQUIRE_THROWS_AS(concurrence(bad), std::invalid_argument);

  Mat4 off_trace = random_density(4) * 2.0;
  REQUIRE_THROWS_AS(concurrence(off_trace), std::invalid_argument);

  // Far below the abort tier (-10): not a density matrix in any sense.
  Mat4 indefinite;
  indefinite.setZero();
  indefinite(0, 0) = 12.0;
  indefinite(1, 1) = -11.0;
  REQUIRE_THROWS_AS(concurrence(indefinite), std::invalid_argument);

  // A moderately indefinite state (the scale transient integration dips
  // reach) degrades gracefully instead of throwing: the clamp inside the
  // eigenvalue computation keeps the result finite.
  Mat4 dipped;
  dipped.setZero();
  dipped(0, 0) = 1.8;
  dipped(1, 1) = -0.8;
  REQUIRE(std::isfinite(concurrence(dipped)));
}

TEST_CASE("triplet decomposition of reference states") {
  // |00> = |T_1>.
  Vec4 p00;
  p00 << 1.0, 0.0, 0.0, 0.0;
  const TripletDecomposition d1 = triplet_decompose(pure(p00));
  REQUIRE(std::abs(d1.t1 - 1.0) < 1e-14);
  REQUIRE(std::abs(d1.t0) < 1e-14);
  REQUIRE(std::abs(d1.ts) < 1e-14);

  // |01> = (|T_0> + |S>)/sqrt(2): half triplet-0, half singlet, with the
  // cross coherence <T_0|rho|S> = 1/2.
  Vec4 p01;
  p01 << 0.0, 1.0, 0.0, 0.0;
  const TripletDecomposition d2 = triplet_decompose(pure(p01));
  REQUIRE(std::abs(d2.t0 - 0.5) < 1e-14);
  REQUIRE(std::abs(d2.ts - 0.5) < 1e-14);
  REQUIRE(std::abs(d2.c0s - cplx(0.5, 0.0)) < 1e-14);
  REQUIRE(std::abs(d2.t1) < 1e-14);
  REQUIRE(std::abs(d2.tm1) < 1e-14);
}

TEST_CASE("collective basis is unitary and the representation change round-trips") {
  const Mat4& U = collective_basis();
  REQUIRE((Mat4(U.adjoint() * U) - Mat4::Identity()).cwiseAbs().maxCoeff() < 1e-14);

  const Mat4 rho_c = random_density(99);
  const Mat4 rho_comp = collective_to_computational(rho_c);
  REQUIRE(std::abs(rho_comp.trace() - cplx(1.0, 0.0)) < 1e-13);

  // Decomposing the computational-basis state must reproduce the collective
  // matrix elements directly.
  const TripletDecomposition viaU = triplet_decompose(rho_comp);
  const TripletDecomposition direct = TripletDecomposition::from_collective(rho_c);
  REQUIRE(std::abs(viaU.t1 - direct.t1) < 1e-12);
  REQUIRE(std::abs(viaU.t0 - direct.t0) < 1e-12);
  REQUIRE(std::abs(viaU.tm1 - direct.tm1) < 1e-12);
  REQUIRE(std::abs(viaU.ts - direct.ts) < 1e-12);
  REQUIRE(std::abs(viaU.c11m - direct.c11m) < 1e-12);
  REQUIRE(std::abs(viaU.c01 - direct.c01) < 1e-12);
  REQUIRE(std::abs(viaU.c0m - direct.c0m) < 1e-12);
  REQUIRE(std::abs(viaU.c0s - direct.c0s) < 1e-12);
}

TEST_CASE("spin flip kernel is sigma_y tensor sigma_y") {
  Mat4 expected;
  expected.setZero();
  expected(0, 3) = -1.0;
  expected(1, 2) = 1.0;
  expected(2, 1) = 1.0;
  expected(3, 0) = -1.0;
  REQUIRE((spin_flip_yy() - expected).cwiseAbs().maxCoeff() < 1e-15);
}
