#include "rrjam/channel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "rrjam/errors.hpp"

namespace rrjam {

namespace {

constexpr double kMergeRelTol = 1e-9;   // near-equal weights collapse into one group
constexpr double kCdfSlack = 1e-9;      // allowed excursion outside [0,1]

// Compensated (Neumaier) accumulator in extended precision; the closed form
// cancels catastrophically when pole locations are close.
struct CompensatedSum {
  long double sum = 0.0L, comp = 0.0L;
  void add(long double v) {
    const long double t = sum + v;
    if (std::fabs(sum) >= std::fabs(v))
      comp += (sum - t) + v;
    else
      comp += (v - t) + sum;
    sum = t;
  }
  long double value() const { return sum + comp; }
};

long double binomial(int n, int k) {
  long double r = 1.0L;
  for (int i = 1; i <= k; ++i) r = r * static_cast<long double>(n - k + i) / i;
  return r;
}

long double factorial(int n) {
  long double r = 1.0L;
  for (int i = 2; i <= n; ++i) r *= i;
  return r;
}

}  // namespace

int DistanceGrouping::total_multiplicity() const {
  int total = 0;
  for (const auto& g : groups) total += g.multiplicity;
  return total;
}

DistanceGrouping group_distances(int k, StateMask active, const NetworkTopology& topo) {
  if (k < 0 || k >= topo.m) throw ValidationError("group_distances: station index out of range");
  if ((active >> k) & 1) throw ValidationError("group_distances: sensing station is in the active set");

  std::vector<double> weights;
  for (int kp = 0; kp < topo.m; ++kp)
    if ((active >> kp) & 1) weights.push_back(pathloss(topo.distance(kp, k), topo));
  std::sort(weights.begin(), weights.end());

  DistanceGrouping grouping;
  for (double w : weights) {
    if (!grouping.groups.empty() &&
        std::abs(w - grouping.groups.back().weight) <= kMergeRelTol * grouping.groups.back().weight) {
      grouping.groups.back().multiplicity += 1;
    } else {
      grouping.groups.push_back({w, 1});
    }
  }
  return grouping;
}

double weighted_exponential_cdf(const DistanceGrouping& grouping, double threshold) {
  if (grouping.groups.empty()) return threshold >= 0 ? 1.0 : 0.0;
  if (threshold <= 0) return 0.0;

  const int s = static_cast<int>(grouping.groups.size());
  // Rescale weights by the threshold; the CDF is evaluated at 1 afterwards,
  // which keeps the pole magnitudes near unity.
  std::vector<long double> d(s);
  std::vector<int> mult(s);
  for (int a = 0; a < s; ++a) {
    d[a] = static_cast<long double>(grouping.groups[a].weight) / threshold;
    mult[a] = grouping.groups[a].multiplicity;
    if (!(d[a] > 0)) throw ValidationError("weighted_exponential_cdf: weights must be positive");
  }

  long double prefactor = 1.0L;
  for (int a = 0; a < s; ++a) prefactor *= std::pow(d[a], static_cast<long double>(-mult[a]));

  CompensatedSum total;
  std::vector<long double> g, f;
  for (int l = 0; l < s; ++l) {
    const int ml = mult[l];
    const long double at = -1.0L / d[l]; // evaluation point of the derivative factors

    // Poles (c_k + d)^(-m_k): the constant-of-integration factor d^{-1}
    // (c = 0, m = 1) plus one factor per other group.
    std::vector<std::pair<long double, int>> poles;
    poles.emplace_back(0.0L, 1);
    for (int a = 0; a < s; ++a)
      if (a != l) poles.emplace_back(1.0L / d[a], mult[a]);

    // f^(n) at `at` via the log-derivative recursion f' = f g with
    // g^(r) = (-1)^{r+1} r! sum_k m_k (c_k + at)^{-(r+1)}.
    g.assign(std::max(ml - 1, 0), 0.0L);
    for (int r = 0; r < ml - 1; ++r) {
      CompensatedSum acc;
      for (const auto& [c, mk] : poles)
        acc.add(static_cast<long double>(mk) * std::pow(c + at, static_cast<long double>(-(r + 1))));
      const long double sign = (r % 2 == 0) ? -1.0L : 1.0L;
      g[r] = sign * factorial(r) * acc.value();
    }
    f.assign(ml, 0.0L);
    {
      long double f0 = 1.0L;
      for (const auto& [c, mk] : poles) f0 *= std::pow(c + at, static_cast<long double>(-mk));
      f[0] = f0;
    }
    for (int n = 1; n < ml; ++n) {
      CompensatedSum acc;
      for (int i = 0; i < n; ++i) acc.add(binomial(n - 1, i) * f[i] * g[n - 1 - i]);
      f[n] = acc.value();
    }

    const long double expo = std::exp(-1.0L / d[l]);
    for (int j = 1; j <= ml; ++j) {
      const long double psi = -f[j - 1];
      total.add(expo * psi / (factorial(ml - j) * factorial(j - 1)));
    }
  }

  const long double value = 1.0L - prefactor * total.value();
  if (value < -kCdfSlack || value > 1.0L + kCdfSlack)
    throw NumericalError("weighted_exponential_cdf: closed form evaluated to " +
                         std::to_string(static_cast<double>(value)) +
                         ", outside [0,1]; weight configuration is numerically degenerate");
  return std::clamp(static_cast<double>(value), 0.0, 1.0);
}

double idle_probability(int k, StateMask active, const NetworkTopology& topo) {
  if (k < 0 || k >= topo.m) throw ValidationError("idle_probability: station index out of range");
  if ((active >> k) & 1)
    throw ValidationError("idle_probability: station " + std::to_string(k + 1) +
                          " cannot sense while in the active set");
  if (active == 0) return 1.0;

  if (topo.fading == Fading::deterministic) {
    double interference = 0;
    for (int kp = 0; kp < topo.m; ++kp)
      if ((active >> kp) & 1) interference += pathloss(topo.distance(kp, k), topo);
    return interference + topo.N_0 <= topo.theta ? 1.0 : 0.0;
  }

  return weighted_exponential_cdf(group_distances(k, active, topo), topo.theta - topo.N_0);
}

double anomalous_probability(double p_R, double p_J, double p_idle) {
  if (p_R < 0 || p_R > 1 || p_J < 0 || p_J > 1 || p_idle < 0 || p_idle > 1)
    throw ValidationError("anomalous_probability: arguments must be probabilities");
  return p_R * p_idle + p_J * (1.0 - p_idle);
}

IdleTable IdleTable::build(const NetworkTopology& topo) {
  topo.validate();
  IdleTable table;
  table.topo_ = topo;
  const size_t n_masks = size_t{1} << topo.m;
  table.values_.assign(static_cast<size_t>(topo.m) * n_masks,
                       std::numeric_limits<double>::quiet_NaN());
  for (int k = 0; k < topo.m; ++k)
    for (StateMask mask = 0; mask < n_masks; ++mask)
      if (!((mask >> k) & 1))
        table.values_[(static_cast<size_t>(k) << topo.m) | mask] = idle_probability(k, mask, topo);
  return table;
}

}  // namespace rrjam
