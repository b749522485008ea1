#ifndef RRJAM_LDP_HPP
#define RRJAM_LDP_HPP

#include <array>
#include <functional>
#include <optional>

#include <Eigen/Dense>

#include "rrjam/chain.hpp"

namespace rrjam {

// Fraction of time the SUT spends in collision states under each hypothesis,
// and their ratio eta. eta is undefined (reported via the optional) when the
// compliant chain has no collision mass at all.
struct EfficiencyReport {
  double r0 = 0, r1 = 0;
  std::optional<double> eta;
  std::optional<double> eta_ts_1, eta_ts_2; // Taylor-approximated eta when requested
};
EfficiencyReport jamming_efficiency(const Eigen::VectorXd& pi0, const Eigen::VectorXd& pi1,
                                    const StateSpace& space);

// Adds the order-1 and order-2 Taylor approximations of eta at (p_R, p_J).
EfficiencyReport jamming_efficiency(const Eigen::VectorXd& pi0, const Eigen::VectorXd& pi1,
                                    const StateSpace& space, const struct TaylorExpansion& taylor,
                                    double p_R, double p_J);

// Stein exponent of the minimum missed-detection rate at bounded false-alarm
// rate: I = sum_ij pi0_i p0_ij ln(p0_ij / p1_ij). Infinite (with singular
// flag) when a pi0-reachable transition is impossible under H1.
struct RateFunctionValue {
  double value = 0;
  bool singular = false;
};
RateFunctionValue rate_function(const Eigen::MatrixXd& P0, const Eigen::VectorXd& pi0,
                                const Eigen::MatrixXd& P1);

// Limiting scaled log-MGF of Z under H0: ln of the spectral radius of the
// entrywise tilted matrix p1^t p0^(1-t) (0*0 -> 0).
double gartner_ellis(const Eigen::MatrixXd& P0, const Eigen::MatrixXd& P1, double t);

// Fenchel-Legendre transform sup_t (xi t - Lambda(t)) by golden-section over
// an expanding bracket; Lambda is convex so the problem is unimodal.
double fenchel_legendre(const std::function<double(double)>& lambda_fn, double xi);

// Constant parameter-derivative matrices of the RRJ generator: rates adding
// the SUT are affine in (p_R, p_J) with slopes lambda*p_I and
// lambda*(1-p_I).
struct JammerDerivatives {
  Eigen::MatrixXd dQ_dpR, dQ_dpJ;
};
JammerDerivatives jammer_rate_derivatives(const IdleTable& idle, double lambda);

// Taylor expansion of the RRJ stationary distribution around an expansion
// point in (0,1]^2, built from the group inverse: first derivative
// -pi (dQ/dp) G, pure second derivatives 2 pi ((dQ/dp) G)^2, mixed term
// pi ((dQ/dpR) G (dQ/dpJ) G + (dQ/dpJ) G (dQ/dpR) G).
struct TaylorExpansion {
  std::array<double, 2> expansion{0.5, 0.5}; // (p_R, p_J)
  Eigen::VectorXd pi_hat;
  Eigen::VectorXd jac_R, jac_J;
  Eigen::VectorXd hess_RR, hess_JJ, hess_RJ;

  // order k in {1,2}; exact at the expansion point.
  Eigen::VectorXd evaluate(double p_R, double p_J, int order) const;
};

TaylorExpansion taylor_stationary(const ChainModel& rrj_at_expansion, const IdleTable& idle);

// RRJ design inputs for the strategy problem.
struct JammerDesign {
  double tau_eta = 1.0;                    // efficiency threshold
  std::array<double, 2> expansion{0.5, 0.5};
  int order = 1;                           // Taylor order; k=1 keeps the problem convex
};

struct StrategyResult {
  bool feasible = false;
  double p_R = 1.0, p_J = 0.0;
  double rate = 0.0;        // I at the optimum
  double eta_ts = 0.0;      // linearized efficiency at the optimum
  std::optional<double> eta_true; // efficiency of the exact chain at the optimum
  double constraint_violation = 0.0;
  std::string message;
};

// Minimizes the Stein rate function over [0,1]^2 subject to the order-1
// linearized efficiency constraint. The unconstrained minimum (1,0) is
// checked first; otherwise the optimum lies on the constraint segment and is
// found by exact 1-D minimization along it. Uniformization for the objective
// uses one clock valid over the whole parameter box so that the objective is
// a fixed convex function. Infeasible thresholds (beyond the linearized
// efficiency at the best box corner) are reported, together with the exact
// efficiency at the returned point since the linearization overestimates.
StrategyResult optimize_strategy(const JammerDesign& design, const IdleTable& idle, double lambda,
                                 double gamma);

// Dense lattice of rate-function values over [0,1]^2; the per-threshold
// argmin over the feasible sublattice is the independent oracle guarding the
// solver. The lattice is threshold-independent, so one precomputation serves
// a whole tau_eta sweep.
class StrategyGridSearch {
public:
  StrategyGridSearch(const struct StrategyProblem& problem, double step);

  struct Result {
    bool feasible = false;
    double p_R = 0, p_J = 0, rate = 0;
  };
  Result argmin_for(double tau_eta) const;
  double step() const { return 1.0 / steps_; }

private:
  const StrategyProblem& problem_;
  int steps_;
  std::vector<double> rates_;
};

// Objective/constraint evaluations shared by the solver and the grid-search
// oracle: I(p) at the box clock, and the linearized efficiency.
struct StrategyProblem {
  StrategyProblem(const JammerDesign& design, const IdleTable& idle, double lambda, double gamma);

  double rate_at(double p_R, double p_J) const;   // Stein exponent, +inf if singular
  double eta_ts_at(double p_R, double p_J) const; // affine in (p_R, p_J)
  double eta_true_at(double p_R, double p_J) const;

  const IdleTable& idle;
  double lambda, gamma;
  JammerDesign design;
  double u_box = 0;          // clock covering the whole parameter box
  Eigen::MatrixXd P0;        // compliant DTMC at the box clock
  Eigen::VectorXd pi0;
  double r0 = 0;             // compliant collision mass
  Eigen::VectorXd t;         // collision indicator
  TaylorExpansion taylor;
};

}  // namespace rrjam

#endif
