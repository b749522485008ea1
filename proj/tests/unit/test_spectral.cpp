#include <doctest.h>

#include <cmath>

#include "rrjam/chain.hpp"
#include "rrjam/errors.hpp"
#include "rrjam/rng.hpp"
#include "rrjam/spectral.hpp"
#include "test_support.hpp"

using namespace rrjam;
using namespace rrjam::test;

namespace {

Eigen::MatrixXd random_generator(int n, Xoshiro256& rng) {
  Eigen::MatrixXd Q(n, n);
  for (int i = 0; i < n; ++i) {
    double row = 0;
    for (int j = 0; j < n; ++j) {
      if (j == i) continue;
      Q(i, j) = 0.05 + rng.uniform();
      row += Q(i, j);
    }
    Q(i, i) = -row;
  }
  return Q;
}

}  // namespace

TEST_CASE("two-state eigenvalues") {
  Eigen::MatrixXd P(2, 2);
  const double a = 0.2, b = 0.5;
  P << 1 - a, a, b, 1 - b;
  const SpectralData s = spectral_decompose(P);
  CHECK(std::abs(s.eigenvalues[0] - 1.0) <= 1e-12);
  CHECK(std::abs(s.eigenvalues[1] - (1.0 - a - b)) <= 1e-12);
  CHECK(s.simple);
}

TEST_CASE("decomposition reconstructs P and orders by |1 - lambda|") {
  Xoshiro256 rng(5, 1);
  for (int trial = 0; trial < 5; ++trial) {
    const int n = 6;
    Eigen::MatrixXd Q = random_generator(n, rng);
    const double u = 1.1 * Q.diagonal().cwiseAbs().maxCoeff();
    const Eigen::MatrixXd P = Eigen::MatrixXd::Identity(n, n) + Q / u;
    const SpectralData s = spectral_decompose(P);
    REQUIRE(s.simple);
    const Eigen::MatrixXcd rebuilt = s.U * s.eigenvalues.asDiagonal() * s.V;
    CHECK((rebuilt - P.cast<std::complex<double>>()).norm() <= 1e-8);
    for (int r = 2; r < n; ++r)
      CHECK(std::abs(1.0 - s.lambda1) <= std::abs(1.0 - s.eigenvalues[r]) + 1e-12);
    // unit pair: right all-ones, left the stationary distribution
    const Eigen::VectorXd pi = stationary_distribution(Q);
    CHECK((s.U.col(0) - Eigen::VectorXcd::Ones(n)).norm() <= 1e-8);
    CHECK((s.V.row(0).transpose() - pi.cast<std::complex<double>>()).norm() <= 1e-8);
  }
}

TEST_CASE("spectral k-step probabilities equal matrix powers") {
  const IdleTable idle = IdleTable::build(asym_m4());
  const ChainModel c = build_compliant(idle, kLambda, kGamma);
  const SpectralData s = spectral_decompose(c.P);
  REQUIRE(s.simple);
  for (const long t : {1L, 5L, 50L}) {
    Eigen::MatrixXd power = Eigen::MatrixXd::Identity(c.space.size, c.space.size);
    for (long k = 0; k < t; ++k) power = power * c.P;
    double max_diff = 0;
    for (int j = 0; j < c.space.size; ++j)
      for (int i = 0; i < c.space.size; ++i)
        max_diff = std::max(max_diff, std::abs(s.k_step_probability(j, i, t) - power(j, i)));
    CHECK(max_diff <= 1e-8);
  }
}

TEST_CASE("repeated eigenvalues are flagged") {
  const int n = 3;
  const Eigen::MatrixXd P = Eigen::MatrixXd::Constant(n, n, 1.0 / n); // eigenvalues {1, 0, 0}
  const SpectralData s = spectral_decompose(P);
  CHECK(!s.simple);
  CHECK(s.min_gap <= 1e-9);
}

TEST_CASE("group inverse satisfies its defining identities") {
  Xoshiro256 rng(11, 3);
  for (int trial = 0; trial < 5; ++trial) {
    const int n = 7;
    const Eigen::MatrixXd Q = random_generator(n, rng);
    const Eigen::VectorXd pi = stationary_distribution(Q);
    const Eigen::MatrixXd G = group_inverse(Q, pi);
    CHECK((Q * G * Q - Q).cwiseAbs().maxCoeff() <= 1e-8);
    CHECK((G * Q * G - G).cwiseAbs().maxCoeff() <= 1e-8);
    CHECK((Q * G - G * Q).cwiseAbs().maxCoeff() <= 1e-8);
  }
}

TEST_CASE("two-state group inverse closed form") {
  // for Q = [[-a, a], [b, -b]] the group inverse is Q / (a + b)^2
  Eigen::MatrixXd Q(2, 2);
  const double a = 0.8, b = 0.3;
  Q << -a, a, b, -b;
  const Eigen::VectorXd pi = stationary_distribution(Q);
  const Eigen::MatrixXd G = group_inverse(Q, pi);
  CHECK((G - Q / ((a + b) * (a + b))).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("group inverse drives first-order stationary sensitivity") {
  const IdleTable idle = IdleTable::build(asym_m4());
  const double p_R = 0.6, p_J = 0.4, delta = 1e-4;
  const ChainModel base = build_rrj(idle, kLambda, kGamma, p_R, p_J);
  const Eigen::MatrixXd G = group_inverse(base.Q, base.pi);
  // dQ/dp_J is the affine slope of the jam rates
  const Eigen::MatrixXd Qp = chain_generator(ChainKind::rrj, idle, kLambda, kGamma,
                                             {p_R, p_J + delta});
  const Eigen::MatrixXd dQ = (Qp - base.Q) / delta;
  const Eigen::VectorXd predicted =
      base.pi - delta * (base.pi.transpose() * dQ * G).transpose();
  const Eigen::VectorXd resolved = stationary_distribution(Qp);
  CHECK((predicted - resolved).cwiseAbs().maxCoeff() / resolved.cwiseAbs().maxCoeff() <= 1e-3);
}

TEST_CASE("group inverse rejects singular input") {
  Eigen::MatrixXd Q = Eigen::MatrixXd::Zero(3, 3); // all-zero generator: 3 closed classes
  Eigen::VectorXd pi(3);
  pi << 0.5, 0.3, 0.2;
  CHECK_THROWS_AS(group_inverse(Q, pi), NumericalError);
}
