#ifndef RRJAM_SPECTRAL_HPP
#define RRJAM_SPECTRAL_HPP

#include <complex>

#include <Eigen/Dense>

namespace rrjam {

// Eigendecomposition P = U diag(lambda) V with V = U^{-1}, ordered by
// |1 - lambda| ascending so index 0 is the unit eigenvalue (right eigenvector
// normalized to all-ones, left to the stationary distribution) and index 1 is
// the non-unit eigenvalue closest to 1.
struct SpectralData {
  Eigen::VectorXcd eigenvalues;
  Eigen::MatrixXcd U; // right eigenvectors in columns
  Eigen::MatrixXcd V; // U^{-1}, left eigenvectors in rows
  std::complex<double> lambda1; // argmin over non-unit eigenvalues of |1-lambda|
  Eigen::MatrixXd c;  // c(j,i) = sum_{r>=1} |u_{jr} v_{ri}|
  bool simple = false; // all eigenvalue pairwise gaps exceed 1e-9
  double min_gap = 0.0;

  // [P^t]_{j,i} via pi_i + sum_{r>=1} lambda_r^t u_{jr} v_{ri}.
  double k_step_probability(int j, int i, long t) const;
};

SpectralData spectral_decompose(const Eigen::MatrixXd& P);

// Group inverse of an ergodic generator: G = 1 pi^T - (1 pi^T - Q)^{-1}.
// Satisfies QGQ = Q, GQG = G, QG = GQ. Throws NumericalError when the
// deviation matrix is singular (non-ergodic input).
Eigen::MatrixXd group_inverse(const Eigen::MatrixXd& Q, const Eigen::VectorXd& pi);

}  // namespace rrjam

#endif
