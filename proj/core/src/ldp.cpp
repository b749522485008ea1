#include "rrjam/ldp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "rrjam/errors.hpp"
#include "rrjam/spectral.hpp"

namespace rrjam {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kUniformizationMargin = 1.1;
constexpr double kGolden = 0.6180339887498949;
}  // namespace

EfficiencyReport jamming_efficiency(const Eigen::VectorXd& pi0, const Eigen::VectorXd& pi1,
                                    const StateSpace& space) {
  if (pi0.size() != space.size || pi1.size() != space.size)
    throw ValidationError("jamming_efficiency: dimension mismatch");
  const Eigen::VectorXd t = space.collision_indicator();
  EfficiencyReport report;
  report.r0 = pi0.dot(t);
  report.r1 = pi1.dot(t);
  if (report.r0 > 0) report.eta = report.r1 / report.r0;
  return report;
}

EfficiencyReport jamming_efficiency(const Eigen::VectorXd& pi0, const Eigen::VectorXd& pi1,
                                    const StateSpace& space, const TaylorExpansion& taylor,
                                    double p_R, double p_J) {
  EfficiencyReport report = jamming_efficiency(pi0, pi1, space);
  if (report.r0 > 0) {
    const Eigen::VectorXd t = space.collision_indicator();
    report.eta_ts_1 = taylor.evaluate(p_R, p_J, 1).dot(t) / report.r0;
    report.eta_ts_2 = taylor.evaluate(p_R, p_J, 2).dot(t) / report.r0;
  }
  return report;
}

RateFunctionValue rate_function(const Eigen::MatrixXd& P0, const Eigen::VectorXd& pi0,
                                const Eigen::MatrixXd& P1) {
  const int n = static_cast<int>(P0.rows());
  RateFunctionValue out;
  double acc = 0;
  for (int i = 0; i < n; ++i) {
    if (pi0[i] == 0) continue;
    for (int j = 0; j < n; ++j) {
      const double p0 = P0(i, j);
      if (p0 == 0) continue;
      const double p1 = P1(i, j);
      if (p1 == 0) {
        out.singular = true;
        out.value = kInf;
        return out;
      }
      acc += pi0[i] * p0 * (std::log(p0) - std::log(p1));
    }
  }
  out.value = acc;
  return out;
}

double gartner_ellis(const Eigen::MatrixXd& P0, const Eigen::MatrixXd& P1, double t) {
  const int n = static_cast<int>(P0.rows());
  Eigen::MatrixXd tilted(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const double p0 = P0(i, j), p1 = P1(i, j);
      if (p0 == 0 && p1 == 0) {
        tilted(i, j) = 0;
      } else if (p0 == 0 || p1 == 0) {
        // entry p1^t p0^(1-t): zero on one side only is a singular pair
        throw ValidationError("gartner_ellis: hypothesis pair is singular; the tilted matrix "
                              "is unavailable");
      } else {
        tilted(i, j) = std::exp(t * std::log(p1) + (1.0 - t) * std::log(p0));
      }
    }
  const Eigen::VectorXcd eigs = tilted.eigenvalues();
  double rho = 0;
  for (int i = 0; i < n; ++i) rho = std::max(rho, std::abs(eigs[i]));
  if (!(rho > 0)) throw NumericalError("gartner_ellis: zero spectral radius");
  return std::log(rho);
}

double fenchel_legendre(const std::function<double(double)>& lambda_fn, double xi) {
  const auto h = [&](double t) { return xi * t - lambda_fn(t); };
  // Bracket the unimodal maximum, starting from [0,1] (the two ends where the
  // tilted matrix reduces to P0 and P1) and expanding while the objective
  // still rises at a boundary.
  double lo = 0.0, hi = 1.0;
  const double step = 1.0;
  for (int k = 0; k < 8 && h(lo) > h(lo + 1e-6); ++k) lo -= step * (1 << k);
  for (int k = 0; k < 8 && h(hi) > h(hi - 1e-6); ++k) hi += step * (1 << k);

  double a = lo, b = hi;
  double x1 = b - kGolden * (b - a), x2 = a + kGolden * (b - a);
  double f1 = h(x1), f2 = h(x2);
  for (int it = 0; it < 200 && b - a > 1e-11; ++it) {
    if (f1 > f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - kGolden * (b - a);
      f1 = h(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + kGolden * (b - a);
      f2 = h(x2);
    }
  }
  return std::max(0.0, h(0.5 * (a + b)));
}

JammerDerivatives jammer_rate_derivatives(const IdleTable& idle, double lambda) {
  const StateSpace space = StateSpace::make(idle.topology().m);
  JammerDerivatives d;
  d.dQ_dpR.setZero(space.size, space.size);
  d.dQ_dpJ.setZero(space.size, space.size);
  for (int state = 0; state < space.size; ++state) {
    if (space.sut_active(state)) continue;
    const double p_idle = idle(0, static_cast<StateMask>(state));
    const int target = state | 1;
    d.dQ_dpR(state, target) = lambda * p_idle;
    d.dQ_dpR(state, state) = -lambda * p_idle;
    d.dQ_dpJ(state, target) = lambda * (1.0 - p_idle);
    d.dQ_dpJ(state, state) = -lambda * (1.0 - p_idle);
  }
  return d;
}

Eigen::VectorXd TaylorExpansion::evaluate(double p_R, double p_J, int order) const {
  if (order != 1 && order != 2) throw ValidationError("taylor: order must be 1 or 2");
  const double dR = p_R - expansion[0];
  const double dJ = p_J - expansion[1];
  Eigen::VectorXd out = pi_hat + dR * jac_R + dJ * jac_J;
  if (order == 2)
    out += 0.5 * (dR * dR * hess_RR + dJ * dJ * hess_JJ) + dR * dJ * hess_RJ;
  return out;
}

TaylorExpansion taylor_stationary(const ChainModel& rrj_at_expansion, const IdleTable& idle) {
  if (rrj_at_expansion.kind != ChainKind::rrj || !rrj_at_expansion.jammer)
    throw ValidationError("taylor_stationary: expansion chain must be an RRJ chain");
  const JammerParams at = *rrj_at_expansion.jammer;
  if (!(at.p_R > 0) || !(at.p_J > 0))
    throw ValidationError("taylor_stationary: expansion point must lie in (0,1]^2");

  TaylorExpansion ts;
  ts.expansion = {at.p_R, at.p_J};
  ts.pi_hat = rrj_at_expansion.pi;

  const Eigen::MatrixXd G = group_inverse(rrj_at_expansion.Q, rrj_at_expansion.pi);
  const JammerDerivatives d = jammer_rate_derivatives(idle, rrj_at_expansion.lambda_rate);
  const Eigen::RowVectorXd pi_row = rrj_at_expansion.pi.transpose();

  const Eigen::MatrixXd MR = d.dQ_dpR * G;
  const Eigen::MatrixXd MJ = d.dQ_dpJ * G;
  ts.jac_R = (-pi_row * MR).transpose();
  ts.jac_J = (-pi_row * MJ).transpose();
  ts.hess_RR = (2.0 * pi_row * MR * MR).transpose();
  ts.hess_JJ = (2.0 * pi_row * MJ * MJ).transpose();
  ts.hess_RJ = (pi_row * (MR * MJ + MJ * MR)).transpose();
  return ts;
}

StrategyProblem::StrategyProblem(const JammerDesign& d, const IdleTable& idle_table, double lam,
                                 double gam)
    : idle(idle_table), lambda(lam), gamma(gam), design(d) {
  const ChainModel c0 = build_compliant(idle, lambda, gamma);
  const ChainModel c_hat = build_rrj(idle, lambda, gamma, d.expansion[0], d.expansion[1]);
  taylor = taylor_stationary(c_hat, idle);
  t = c0.space.collision_indicator();
  pi0 = c0.pi;
  r0 = pi0.dot(t);
  if (!(r0 > 0))
    throw ValidationError("optimize_strategy: compliant chain has no collision mass; eta "
                          "is undefined");

  // One clock valid over the whole box keeps the objective a fixed convex
  // function of (p_R, p_J); row rates are maximal at the (1,1) corner.
  const Eigen::MatrixXd Q_corner =
      chain_generator(ChainKind::rrj, idle, lambda, gamma, {1.0, 1.0});
  u_box = kUniformizationMargin * std::max(c0.Q.diagonal().cwiseAbs().maxCoeff(),
                                           Q_corner.diagonal().cwiseAbs().maxCoeff());
  P0 = Eigen::MatrixXd::Identity(c0.space.size, c0.space.size) + c0.Q / u_box;
}

double StrategyProblem::rate_at(double p_R, double p_J) const {
  const Eigen::MatrixXd Q1 = chain_generator(ChainKind::rrj, idle, lambda, gamma, {p_R, p_J});
  const Eigen::MatrixXd P1 =
      Eigen::MatrixXd::Identity(Q1.rows(), Q1.cols()) + Q1 / u_box;
  return rate_function(P0, pi0, P1).value;
}

double StrategyProblem::eta_ts_at(double p_R, double p_J) const {
  return taylor.evaluate(p_R, p_J, 1).dot(t) / r0;
}

double StrategyProblem::eta_true_at(double p_R, double p_J) const {
  const Eigen::MatrixXd Q1 = chain_generator(ChainKind::rrj, idle, lambda, gamma, {p_R, p_J});
  const Eigen::VectorXd pi1 = stationary_distribution(Q1);
  return pi1.dot(t) / r0;
}

StrategyGridSearch::StrategyGridSearch(const StrategyProblem& problem, double step)
    : problem_(problem), steps_(static_cast<int>(std::lround(1.0 / step))) {
  rates_.resize(static_cast<size_t>(steps_ + 1) * (steps_ + 1));
  for (int a = 0; a <= steps_; ++a)
    for (int b = 0; b <= steps_; ++b) {
      const double pR = static_cast<double>(a) / steps_;
      const double pJ = static_cast<double>(b) / steps_;
      rates_[static_cast<size_t>(a) * (steps_ + 1) + b] =
          (pR == 0.0 && pJ == 0.0) ? kInf : problem_.rate_at(pR, pJ);
    }
}

StrategyGridSearch::Result StrategyGridSearch::argmin_for(double tau_eta) const {
  Result best;
  best.rate = kInf;
  for (int a = 0; a <= steps_; ++a)
    for (int b = 0; b <= steps_; ++b) {
      const double pR = static_cast<double>(a) / steps_;
      const double pJ = static_cast<double>(b) / steps_;
      if (problem_.eta_ts_at(pR, pJ) < tau_eta) continue;
      const double r = rates_[static_cast<size_t>(a) * (steps_ + 1) + b];
      if (r < best.rate) {
        best.feasible = true;
        best.rate = r;
        best.p_R = pR;
        best.p_J = pJ;
      }
    }
  return best;
}

StrategyResult optimize_strategy(const JammerDesign& design, const IdleTable& idle, double lambda,
                                 double gamma) {
  if (design.order != 1)
    throw ValidationError("optimize_strategy: only the order-1 (convex) constraint is supported");
  const StrategyProblem prob(design, idle, lambda, gamma);

  // Linear constraint a_R p_R + a_J p_J >= rhs from the first-order expansion.
  const double a_R = prob.taylor.jac_R.dot(prob.t) / prob.r0;
  const double a_J = prob.taylor.jac_J.dot(prob.t) / prob.r0;
  const double c0 = prob.eta_ts_at(0.0, 0.0);
  const double rhs = design.tau_eta - c0;

  StrategyResult result;
  const auto finish = [&](double p_R, double p_J, const std::string& msg) {
    result.p_R = p_R;
    result.p_J = p_J;
    result.rate = prob.rate_at(p_R, p_J);
    result.eta_ts = prob.eta_ts_at(p_R, p_J);
    result.constraint_violation = std::max(0.0, design.tau_eta - result.eta_ts);
    result.eta_true = prob.eta_true_at(p_R, p_J);
    result.message = msg;
    return result;
  };

  // Feasibility: the affine constraint attains its box maximum at a corner.
  double best_corner = -kInf;
  for (double pR : {0.0, 1.0})
    for (double pJ : {0.0, 1.0}) best_corner = std::max(best_corner, a_R * pR + a_J * pJ);
  if (best_corner < rhs) {
    result.feasible = false;
    finish(1.0, 1.0, "infeasible: linearized efficiency at the best corner is below tau_eta "
                     "(and the linearization overestimates the exact efficiency)");
    return result;
  }
  result.feasible = true;

  // The unconstrained minimum of the rate function is compliant mimicry.
  if (a_R * 1.0 + a_J * 0.0 >= rhs) return finish(1.0, 0.0, "unconstrained minimum feasible");

  // Otherwise the optimum lies on the constraint segment inside the box:
  // parameterize by p_R and minimize the convex objective along it by
  // golden-section.
  const auto pJ_of = [&](double pR) { return (rhs - a_R * pR) / a_J; };
  double lo = 0.0, hi = 1.0;
  {
    std::vector<double> ends;
    for (double pR : {0.0, 1.0}) {
      const double pJ = pJ_of(pR);
      if (pJ >= -1e-12 && pJ <= 1.0 + 1e-12) ends.push_back(pR);
    }
    for (double pJ : {0.0, 1.0}) {
      const double pR = (rhs - a_J * pJ) / a_R;
      if (pR >= -1e-12 && pR <= 1.0 + 1e-12) ends.push_back(pR);
    }
    if (ends.empty())
      throw NumericalError("optimize_strategy: constraint segment missed the box");
    lo = std::clamp(*std::min_element(ends.begin(), ends.end()), 0.0, 1.0);
    hi = std::clamp(*std::max_element(ends.begin(), ends.end()), 0.0, 1.0);
  }
  const auto objective = [&](double pR) {
    return prob.rate_at(pR, std::clamp(pJ_of(pR), 0.0, 1.0));
  };
  double a = lo, b = hi;
  double x1 = b - kGolden * (b - a), x2 = a + kGolden * (b - a);
  double f1 = objective(x1), f2 = objective(x2);
  while (b - a > 1e-9) {
    if (f1 < f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - kGolden * (b - a);
      f1 = objective(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + kGolden * (b - a);
      f2 = objective(x2);
    }
  }
  // The box edge p_R = 1 is a common optimum; snap when it is at least as
  // good as the interior estimate so first-order reporting is exact.
  double p_R_star = 0.5 * (a + b);
  if (hi >= 1.0 - 1e-12 && objective(1.0) <= objective(p_R_star) + 1e-15) p_R_star = 1.0;
  const double p_J_star = std::clamp(pJ_of(p_R_star), 0.0, 1.0);
  return finish(p_R_star, p_J_star, "constraint active");
}

}  // namespace rrjam
