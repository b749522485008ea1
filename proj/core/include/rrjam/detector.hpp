#ifndef RRJAM_DETECTOR_HPP
#define RRJAM_DETECTOR_HPP

#include <optional>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "rrjam/chain.hpp"
#include "rrjam/spectral.hpp"

namespace rrjam {

// Transition counts N_ij of an observed DTMC sample path.
struct TransitionCounts {
  Eigen::Matrix<long, Eigen::Dynamic, Eigen::Dynamic> N;
  long W = 0;          // number of transitions (path length - 1)
  int first_state = 0; // y_1
};

// Throws ValidationError on out-of-range state indices or a path shorter
// than 2 states.
TransitionCounts count_transitions(std::span<const int> path, int n_states);

enum class TestMode { supervised, semi_supervised };

// A hypothesis pair sharing one uniformization clock, plus the per-transition
// test coefficients. Supervised coefficients are ln(p1_ij / p0_ij); the
// semi-supervised goodness-of-fit test replaces them with ln p0_ij and flips
// the decision direction (large Z favors H0).
//
// Cells possible under exactly one hypothesis get infinite coefficients. When
// such a cell carries stationary mass the pair is a singular detection
// problem: observing the cell decides the test outright.
struct TestSpec {
  TestMode mode = TestMode::supervised;
  double u = 0.0;
  Eigen::MatrixXd P0, P1;
  Eigen::VectorXd pi0, pi1;
  Eigen::MatrixXd l; // +-inf on one-sided cells, 0 on cells unsupported by both
  bool singular = false;
  std::vector<std::pair<int, int>> h1_certain_cells; // observing one proves H1
  std::vector<std::pair<int, int>> h0_certain_cells; // observing one proves H0

  int n_states() const { return static_cast<int>(P0.rows()); }
};

TestSpec make_supervised_spec(const ChainModel& c0, const ChainModel& c1);
TestSpec make_semi_supervised_spec(const ChainModel& c0, const ChainModel& c1);
// Goodness-of-fit spec from the compliant chain alone (no attack samples for
// training); equivalent to make_semi_supervised_spec(c0, c0).
TestSpec make_semi_supervised_spec(const ChainModel& c0);
// From already-uniformized matrices (aggregated models).
TestSpec make_spec_from_matrices(TestMode mode, const Eigen::MatrixXd& P0,
                                 const Eigen::MatrixXd& P1, const Eigen::VectorXd& pi0,
                                 const Eigen::VectorXd& pi1, double u);

// Z = sum_ij l_ij N_ij / W. Counts on one-sided cells drive Z to the
// corresponding +-infinity; counts on cells unsupported under both
// hypotheses contribute zero (model mismatch, reported via Decision).
double llr_statistic(const TransitionCounts& counts, const TestSpec& spec);

struct Decision {
  bool h1 = false;       // accept the jammer hypothesis
  bool certain = false;  // decided by a singular cell observation
  bool mismatch = false; // counts observed on cells unsupported by both chains
  double z = 0.0;
};

// Full test with threshold xi(W) = xi0 * W, including the initial-state
// log-ratio term (whose influence on the normalized threshold decays as 1/W).
Decision llr_decide(const TransitionCounts& counts, const TestSpec& spec, double xi0);

// Asymptotic moments of Z under both hypotheses: the exact mean and the
// large-W variance with cross-row covariances dropped. The inner time sums
// are evaluated in closed form from the spectral decomposition when the
// eigenvalues are simple, otherwise by explicit accumulation of matrix
// powers. Upper bounds are filled when both decompositions have simple
// eigenvalues.
struct StatisticMoments {
  double mean0 = 0, mean1 = 0;
  double var0 = 0, var1 = 0;
  std::optional<double> var0_ub, var1_ub;
  long W = 0;
  // True when infinite-coefficient cells carrying mass under the hypothesis
  // were excluded; the returned numbers are then the finite part only.
  bool finite_part0 = false, finite_part1 = false;
};

StatisticMoments statistic_moments(const TestSpec& spec, long W);

// Mean and exact variance of Z under a single chain (P, pi) with coefficient
// matrix l; building block for statistic_moments and the aggregated models.
std::pair<double, double> z_mean_variance(const Eigen::MatrixXd& P, const Eigen::VectorXd& pi,
                                          const Eigen::MatrixXd& l, long W,
                                          const SpectralData* spectral = nullptr);

// Spectral upper bound on Var[Z^b] for both hypotheses. Throws
// ValidationError when either transition matrix has repeated eigenvalues
// (within gap 1e-9); exact moments remain available in that case.
std::pair<double, double> variance_upper_bounds(const TestSpec& spec, const SpectralData& s0,
                                                const SpectralData& s1, long W);

struct ErrorRates {
  double far = 0, mdr = 0;
};

// Gaussian-approximation error rates at threshold xi. Degenerate (zero)
// variances produce step-function rates.
ErrorRates error_rates(const StatisticMoments& m, double xi, TestMode mode);

struct EerResult {
  double eer = 0, threshold = 0;
};

// Threshold where FAR and MDR cross (bisection to |FAR-MDR| <= 1e-10), or
// the minimizer of |FAR-MDR| when no crossing exists.
EerResult equal_error_rate(const StatisticMoments& m, TestMode mode);

// Threshold at false-alarm level alpha: Phi^{-1}(1-alpha) sigma0 + mu0.
double alpha_threshold(const StatisticMoments& m, double alpha, TestMode mode);

struct RocPoint {
  double threshold = 0, far = 0, mdr = 0;
};

// Sweeps thresholds across both Gaussians (+-6 sigma); output ordered with
// FAR non-decreasing.
std::vector<RocPoint> roc_curve(const StatisticMoments& m, int n_points, TestMode mode);

double normal_cdf(double x);
double normal_quantile(double p);

}  // namespace rrjam

#endif
