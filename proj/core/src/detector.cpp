#include "rrjam/detector.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "rrjam/errors.hpp"

namespace rrjam {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Per-row indices of transitions supported under either hypothesis, with
// finite coefficients; rows are sparse (at most m+2 entries) so moment sums
// iterate these lists instead of full rows.
std::vector<std::vector<int>> supported_columns(const Eigen::MatrixXd& P, const Eigen::MatrixXd& l) {
  std::vector<std::vector<int>> cols(P.rows());
  for (int i = 0; i < P.rows(); ++i)
    for (int j = 0; j < P.cols(); ++j)
      if (P(i, j) > 0 && std::isfinite(l(i, j))) cols[i].push_back(j);
  return cols;
}

// sum_{t'=1}^{W-1} (W - t') eps^{(t'-1)}(j,i) for all (j,i), where
// eps^{(t)}(j,i) = [P^t]_{j,i} - pi_i. Closed form over the spectrum when
// available, otherwise explicit accumulation of matrix powers.
Eigen::MatrixXd correlation_sums(const Eigen::MatrixXd& P, const Eigen::VectorXd& pi, long W,
                                 const SpectralData* spectral) {
  const int n = static_cast<int>(P.rows());
  if (spectral && spectral->simple) {
    const int r = n - 1;
    Eigen::VectorXcd s(r);
    for (int k = 0; k < r; ++k) {
      const std::complex<double> lam = spectral->eigenvalues[k + 1];
      const std::complex<double> one_m = 1.0 - lam;
      const std::complex<double> lam_W =
          std::abs(lam) == 0.0 ? std::complex<double>(0.0)
                               : std::exp(static_cast<double>(W) * std::log(lam));
      s[k] = (lam_W - static_cast<double>(W) * lam + static_cast<double>(W - 1)) / (one_m * one_m);
    }
    const Eigen::MatrixXcd weighted =
        spectral->U.rightCols(r) * s.asDiagonal() * spectral->V.bottomRows(r);
    return weighted.real();
  }
  Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(n, n);
  Eigen::MatrixXd power = Eigen::MatrixXd::Identity(n, n); // P^{t'-1}
  for (long t = 1; t < W; ++t) {
    acc += static_cast<double>(W - t) * power;
    if (t + 1 < W) power = power * P;
  }
  const double triangle = 0.5 * static_cast<double>(W) * static_cast<double>(W - 1);
  acc.noalias() -= Eigen::VectorXd::Ones(n) * (triangle * pi.transpose());
  return acc;
}

double phi_tail(double x) { return 0.5 * std::erfc(x / std::sqrt(2.0)); } // P(N > x)

}  // namespace

TransitionCounts count_transitions(std::span<const int> path, int n_states) {
  if (path.size() < 2) throw ValidationError("count_transitions: path must have at least 2 states");
  TransitionCounts counts;
  counts.N.setZero(n_states, n_states);
  counts.W = static_cast<long>(path.size()) - 1;
  counts.first_state = path[0];
  for (size_t t = 0; t + 1 < path.size(); ++t) {
    const int a = path[t], b = path[t + 1];
    if (a < 0 || a >= n_states || b < 0 || b >= n_states)
      throw ValidationError("count_transitions: state index out of range");
    counts.N(a, b) += 1;
  }
  return counts;
}

TestSpec make_spec_from_matrices(TestMode mode, const Eigen::MatrixXd& P0,
                                 const Eigen::MatrixXd& P1, const Eigen::VectorXd& pi0,
                                 const Eigen::VectorXd& pi1, double u) {
  TestSpec spec;
  spec.mode = mode;
  spec.u = u;
  spec.P0 = P0;
  spec.P1 = P1;
  spec.pi0 = pi0;
  spec.pi1 = pi1;
  const int n = spec.n_states();
  spec.l.setZero(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const double p0 = spec.P0(i, j), p1 = spec.P1(i, j);
      if (mode == TestMode::supervised) {
        if (p0 > 0 && p1 > 0) {
          spec.l(i, j) = std::log(p1) - std::log(p0);
        } else if (p0 == 0 && p1 > 0) {
          spec.l(i, j) = kInf;
          spec.h1_certain_cells.emplace_back(i, j);
          if (spec.pi1[i] * p1 > 0) spec.singular = true;
        } else if (p1 == 0 && p0 > 0) {
          spec.l(i, j) = -kInf;
          spec.h0_certain_cells.emplace_back(i, j);
          if (spec.pi0[i] * p0 > 0) spec.singular = true;
        }
      } else {
        if (p0 > 0) {
          spec.l(i, j) = std::log(p0);
        } else if (p1 > 0) {
          // impossible under the trained model: observing it is a certain
          // anomaly (Z -> -inf, and small Z favors H1 in this mode)
          spec.l(i, j) = -kInf;
          spec.h1_certain_cells.emplace_back(i, j);
          if (spec.pi1[i] * p1 > 0) spec.singular = true;
        }
      }
    }
  }
  return spec;
}

namespace {

TestSpec make_spec(TestMode mode, const ChainModel& c0, const ChainModel& c1) {
  const UniformizedPair pair = uniformize_pair(c0, c1);
  return make_spec_from_matrices(mode, pair.P0, pair.P1, c0.pi, c1.pi, pair.u);
}

}  // namespace

TestSpec make_supervised_spec(const ChainModel& c0, const ChainModel& c1) {
  return make_spec(TestMode::supervised, c0, c1);
}

TestSpec make_semi_supervised_spec(const ChainModel& c0, const ChainModel& c1) {
  return make_spec(TestMode::semi_supervised, c0, c1);
}

TestSpec make_semi_supervised_spec(const ChainModel& c0) {
  return make_spec(TestMode::semi_supervised, c0, c0);
}

double llr_statistic(const TransitionCounts& counts, const TestSpec& spec) {
  const int n = spec.n_states();
  if (counts.N.rows() != n) throw ValidationError("llr_statistic: counts/spec dimension mismatch");
  double finite = 0;
  bool pos_inf = false, neg_inf = false;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const long nij = counts.N(i, j);
      if (nij == 0) continue;
      const double lij = spec.l(i, j);
      if (lij == kInf)
        pos_inf = true;
      else if (lij == -kInf)
        neg_inf = true;
      else
        finite += lij * static_cast<double>(nij);
    }
  }
  if (pos_inf && neg_inf) return std::numeric_limits<double>::quiet_NaN();
  if (pos_inf) return kInf;
  if (neg_inf) return -kInf;
  return finite / static_cast<double>(counts.W);
}

Decision llr_decide(const TransitionCounts& counts, const TestSpec& spec, double xi0) {
  Decision d;
  const int n = spec.n_states();
  bool h1_certain = false, h0_certain = false;
  for (const auto& [i, j] : spec.h1_certain_cells)
    if (counts.N(i, j) > 0) h1_certain = true;
  for (const auto& [i, j] : spec.h0_certain_cells)
    if (counts.N(i, j) > 0) h0_certain = true;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (counts.N(i, j) > 0 && spec.P0(i, j) == 0 && spec.P1(i, j) == 0) d.mismatch = true;
  if (h1_certain && h0_certain) d.mismatch = true;

  if (h1_certain != h0_certain) {
    d.certain = true;
    d.h1 = h1_certain;
    d.z = h1_certain == (spec.mode == TestMode::supervised) ? kInf : -kInf;
    return d;
  }

  double statistic = 0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (counts.N(i, j) > 0 && std::isfinite(spec.l(i, j)))
        statistic += spec.l(i, j) * static_cast<double>(counts.N(i, j));
  const int y1 = counts.first_state;
  if (spec.mode == TestMode::supervised) {
    statistic += std::log(spec.pi1[y1]) - std::log(spec.pi0[y1]);
    d.h1 = statistic > xi0 * static_cast<double>(counts.W);
  } else {
    statistic += std::log(spec.pi0[y1]);
    d.h1 = statistic < xi0 * static_cast<double>(counts.W);
  }
  d.z = statistic / static_cast<double>(counts.W);
  return d;
}

std::pair<double, double> z_mean_variance(const Eigen::MatrixXd& P, const Eigen::VectorXd& pi,
                                          const Eigen::MatrixXd& l, long W,
                                          const SpectralData* spectral) {
  if (W < 2) throw ValidationError("z_mean_variance: W must be >= 2");
  const int n = static_cast<int>(P.rows());
  const auto cols = supported_columns(P, l);
  const double Wd = static_cast<double>(W);

  double mean = 0;
  for (int i = 0; i < n; ++i)
    for (int j : cols[i]) mean += l(i, j) * pi[i] * P(i, j);

  const Eigen::MatrixXd corr = correlation_sums(P, pi, W, spectral);

  double var = 0;
  for (int i = 0; i < n; ++i) {
    if (pi[i] == 0) continue;
    const auto& js = cols[i];
    for (size_t a = 0; a < js.size(); ++a) {
      const int j = js[a];
      const double lij = l(i, j), pij = P(i, j);
      var += lij * lij * pi[i] * pij *
             ((1.0 - pi[i] * pij) / Wd + 2.0 * pij * corr(j, i) / (Wd * Wd));
      for (size_t b = a + 1; b < js.size(); ++b) {
        const int jp = js[b];
        var += 2.0 * lij * l(i, jp) * pi[i] * pij * P(i, jp) *
               (-pi[i] / Wd + (corr(j, i) + corr(jp, i)) / (Wd * Wd));
      }
    }
  }
  return {mean, var};
}

StatisticMoments statistic_moments(const TestSpec& spec, long W) {
  StatisticMoments m;
  m.W = W;
  const int n = spec.n_states();
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      if (!std::isfinite(spec.l(i, j))) {
        if (spec.P0(i, j) > 0 && spec.pi0[i] > 0) m.finite_part0 = true;
        if (spec.P1(i, j) > 0 && spec.pi1[i] > 0) m.finite_part1 = true;
      }
    }

  const SpectralData s0 = spectral_decompose(spec.P0);
  const SpectralData s1 = spectral_decompose(spec.P1);
  std::tie(m.mean0, m.var0) = z_mean_variance(spec.P0, spec.pi0, spec.l, W, &s0);
  std::tie(m.mean1, m.var1) = z_mean_variance(spec.P1, spec.pi1, spec.l, W, &s1);
  if (s0.simple && s1.simple) {
    const auto [ub0, ub1] = variance_upper_bounds(spec, s0, s1, W);
    m.var0_ub = ub0;
    m.var1_ub = ub1;
  }
  return m;
}

std::pair<double, double> variance_upper_bounds(const TestSpec& spec, const SpectralData& s0,
                                                const SpectralData& s1, long W) {
  if (!s0.simple || !s1.simple)
    throw ValidationError("variance_upper_bounds: transition matrix has repeated eigenvalues "
                          "(within gap 1e-9); the spectral bound is unavailable");
  const double Wd = static_cast<double>(W);
  const auto bound_for = [&](const Eigen::MatrixXd& P, const Eigen::VectorXd& pi,
                             const SpectralData& s) {
    const double gap = std::abs(1.0 - s.lambda1);
    const double factor = (2.0 + Wd * gap) / (Wd * Wd * gap * gap);
    const auto cols = supported_columns(P, spec.l);
    double ub = 0;
    for (int i = 0; i < static_cast<int>(P.rows()); ++i) {
      if (pi[i] == 0) continue;
      const auto& js = cols[i];
      for (size_t a = 0; a < js.size(); ++a) {
        const int j = js[a];
        const double lij = spec.l(i, j), pij = P(i, j);
        ub += lij * lij * pi[i] * pij *
              ((1.0 - pi[i] * pij) / Wd + 2.0 * pij * s.c(j, i) * factor);
        for (size_t b = a + 1; b < js.size(); ++b) {
          const int jp = js[b];
          const double cross = std::max(0.0, lij * spec.l(i, jp));
          ub += 2.0 * cross * pi[i] * pij * P(i, jp) *
                (-pi[i] / Wd + (s.c(j, i) + s.c(jp, i)) * factor);
        }
      }
    }
    return ub;
  };
  return {bound_for(spec.P0, spec.pi0, s0), bound_for(spec.P1, spec.pi1, s1)};
}

ErrorRates error_rates(const StatisticMoments& m, double xi, TestMode mode) {
  const double s0 = std::sqrt(std::max(m.var0, 0.0));
  const double s1 = std::sqrt(std::max(m.var1, 0.0));
  ErrorRates r;
  if (mode == TestMode::supervised) {
    r.far = s0 > 0 ? phi_tail((xi - m.mean0) / s0) : (m.mean0 > xi ? 1.0 : 0.0);
    r.mdr = s1 > 0 ? normal_cdf((xi - m.mean1) / s1) : (m.mean1 <= xi ? 1.0 : 0.0);
  } else {
    r.far = s0 > 0 ? normal_cdf((xi - m.mean0) / s0) : (m.mean0 < xi ? 1.0 : 0.0);
    r.mdr = s1 > 0 ? phi_tail((xi - m.mean1) / s1) : (m.mean1 >= xi ? 1.0 : 0.0);
  }
  return r;
}

EerResult equal_error_rate(const StatisticMoments& m, TestMode mode) {
  const double spread = std::max({std::sqrt(std::max(m.var0, 0.0)),
                                  std::sqrt(std::max(m.var1, 0.0)), 1e-12});
  double lo = std::min(m.mean0, m.mean1) - 40.0 * spread;
  double hi = std::max(m.mean0, m.mean1) + 40.0 * spread;

  const auto diff = [&](double xi) {
    const ErrorRates r = error_rates(m, xi, mode);
    return r.far - r.mdr;
  };
  // FAR - MDR is monotone in the threshold; direction depends on the mode.
  const double sign = mode == TestMode::supervised ? 1.0 : -1.0;
  double dlo = sign * diff(lo), dhi = sign * diff(hi);
  if (dlo > 0 && dhi < 0) {
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (sign * diff(mid) > 0)
        lo = mid;
      else
        hi = mid;
    }
    const double xi = 0.5 * (lo + hi);
    const ErrorRates r = error_rates(m, xi, mode);
    return {0.5 * (r.far + r.mdr), xi};
  }
  // No crossing (degenerate variances): take the minimizer of |FAR - MDR|.
  double best_xi = lo, best_gap = std::abs(diff(lo));
  const int n_scan = 20001;
  for (int k = 1; k < n_scan; ++k) {
    const double xi = lo + (hi - lo) * static_cast<double>(k) / (n_scan - 1);
    const double gap = std::abs(diff(xi));
    if (gap < best_gap) {
      best_gap = gap;
      best_xi = xi;
    }
  }
  const ErrorRates r = error_rates(m, best_xi, mode);
  return {0.5 * (r.far + r.mdr), best_xi};
}

double alpha_threshold(const StatisticMoments& m, double alpha, TestMode mode) {
  if (!(alpha > 0 && alpha < 1)) throw ValidationError("alpha_threshold: alpha must be in (0,1)");
  const double s0 = std::sqrt(std::max(m.var0, 0.0));
  if (mode == TestMode::supervised) return m.mean0 + normal_quantile(1.0 - alpha) * s0;
  return m.mean0 + normal_quantile(alpha) * s0;
}

std::vector<RocPoint> roc_curve(const StatisticMoments& m, int n_points, TestMode mode) {
  if (n_points < 2) throw ValidationError("roc_curve: need at least 2 points");
  const double s0 = std::sqrt(std::max(m.var0, 0.0));
  const double s1 = std::sqrt(std::max(m.var1, 0.0));
  const double lo = std::min(m.mean0 - 6.0 * s0, m.mean1 - 6.0 * s1);
  const double hi = std::max(m.mean0 + 6.0 * s0, m.mean1 + 6.0 * s1);
  std::vector<RocPoint> roc;
  roc.reserve(n_points);
  for (int k = 0; k < n_points; ++k) {
    // ordered so FAR is non-decreasing along the output
    const double frac = static_cast<double>(k) / (n_points - 1);
    const double xi = mode == TestMode::supervised ? hi - (hi - lo) * frac : lo + (hi - lo) * frac;
    const ErrorRates r = error_rates(m, xi, mode);
    roc.push_back({xi, r.far, r.mdr});
  }
  return roc;
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

// Acklam's rational approximation with one Halley refinement.
double normal_quantile(double p) {
  if (!(p > 0 && p < 1)) throw ValidationError("normal_quantile: p must be in (0,1)");
  static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                             -2.759285104469687e+02, 1.383577518672690e+02,
                             -3.066479806614716e+01, 2.506628277459239e+00};
  static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                             -1.556989798598866e+02, 6.680131188771972e+01,
                             -1.328068155288572e+01};
  static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                             -2.400758277161838e+00, -2.549732539343734e+00,
                             4.374664141464968e+00,  2.938163982698783e+00};
  static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                             2.445134137142996e+00, 3.754408661907416e+00};
  const double p_low = 0.02425;
  double x;
  if (p < p_low) {
    const double q = std::sqrt(-2.0 * std::log(p));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  } else if (p <= 1.0 - p_low) {
    const double q = p - 0.5, r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  } else {
    const double q = std::sqrt(-2.0 * std::log(1.0 - p));
    x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  const double e = normal_cdf(x) - p;
  const double u = e * std::sqrt(2.0 * M_PI) * std::exp(0.5 * x * x);
  x = x - u / (1.0 + 0.5 * x * u);
  return x;
}

}  // namespace rrjam
