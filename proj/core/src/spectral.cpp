#include "rrjam/spectral.hpp"

#include <limits>

#include "rrjam/errors.hpp"

namespace rrjam {

namespace {
constexpr double kGapTol = 1e-9;
}

SpectralData spectral_decompose(const Eigen::MatrixXd& P) {
  const int n = static_cast<int>(P.rows());
  if (n < 2 || P.cols() != n) throw ValidationError("spectral_decompose: P must be square, n >= 2");

  Eigen::EigenSolver<Eigen::MatrixXd> solver(P);
  if (solver.info() != Eigen::Success)
    throw NumericalError("spectral_decompose: eigensolver failed to converge");

  const Eigen::VectorXcd raw_values = solver.eigenvalues();
  const Eigen::MatrixXcd raw_vectors = solver.eigenvectors();

  std::vector<int> order(n);
  for (int i = 0; i < n; ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    return std::abs(1.0 - raw_values[a]) < std::abs(1.0 - raw_values[b]);
  });

  SpectralData data;
  data.eigenvalues.resize(n);
  data.U.resize(n, n);
  for (int r = 0; r < n; ++r) {
    data.eigenvalues[r] = raw_values[order[r]];
    data.U.col(r) = raw_vectors.col(order[r]);
  }

  data.min_gap = std::numeric_limits<double>::infinity();
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b)
      data.min_gap = std::min(data.min_gap, std::abs(data.eigenvalues[a] - data.eigenvalues[b]));
  data.simple = data.min_gap > kGapTol;
  data.lambda1 = data.eigenvalues[1];

  // Normalize the unit pair: right eigenvector all-ones, so V = U^{-1} puts
  // the stationary distribution in row 0.
  const std::complex<double> mean0 = data.U.col(0).sum() / static_cast<double>(n);
  if (std::abs(mean0) > 0) data.U.col(0) /= mean0;

  if (data.simple) {
    Eigen::PartialPivLU<Eigen::MatrixXcd> lu(data.U);
    data.V = lu.solve(Eigen::MatrixXcd::Identity(n, n));
    data.c = data.U.rightCols(n - 1).cwiseAbs() * data.V.bottomRows(n - 1).cwiseAbs();
  }
  return data;
}

double SpectralData::k_step_probability(int j, int i, long t) const {
  const int n = static_cast<int>(eigenvalues.size());
  std::complex<double> acc = V(0, i) * U(j, 0); // pi_i since u_{j0} = 1
  for (int r = 1; r < n; ++r) {
    const std::complex<double> lam = eigenvalues[r];
    const std::complex<double> p =
        std::abs(lam) == 0.0 ? std::complex<double>(t == 0 ? 1.0 : 0.0)
                             : std::exp(static_cast<double>(t) * std::log(lam));
    acc += p * U(j, r) * V(r, i);
  }
  return acc.real();
}

Eigen::MatrixXd group_inverse(const Eigen::MatrixXd& Q, const Eigen::VectorXd& pi) {
  const int n = static_cast<int>(Q.rows());
  if (Q.cols() != n || pi.size() != n) throw ValidationError("group_inverse: dimension mismatch");
  const Eigen::MatrixXd projector = Eigen::VectorXd::Ones(n) * pi.transpose();
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(projector - Q);
  const Eigen::VectorXd pivots = lu.matrixLU().diagonal().cwiseAbs();
  if (pivots.minCoeff() <= 1e-14 * std::max(1.0, pivots.maxCoeff()))
    throw NumericalError("group_inverse: deviation matrix is numerically singular "
                         "(non-ergodic generator)");
  return projector - lu.solve(Eigen::MatrixXd::Identity(n, n));
}

}  // namespace rrjam
