#ifndef RRJAM_CHANNEL_HPP
#define RRJAM_CHANNEL_HPP

#include <cstdint>
#include <vector>

#include "rrjam/topology.hpp"

namespace rrjam {

// Active-station sets are bitmasks: bit k set <=> station k+1 is transmitting
// (station 1, the SUT, is bit 0).
using StateMask = uint32_t;

struct DistanceGroup {
  double weight = 0.0; // pathloss l(d) shared by the group's stations, W
  int multiplicity = 0;
};

// Stations of an active set grouped by pathloss weight at the sensing
// station. Weights are strictly distinct across groups; near-equal weights
// (relative gap < 1e-9) are merged because the closed-form CDF requires
// distinct values per group and is numerically hostile near coincidence.
struct DistanceGrouping {
  std::vector<DistanceGroup> groups;
  int total_multiplicity() const;
};

DistanceGrouping group_distances(int k, StateMask active, const NetworkTopology& topo);

// CDF at `threshold` of sum_a weight_a * Erlang(multiplicity_a, 1) with
// distinct weights: the closed form for a weighted sum of independent unit
// exponentials. Derivative factors are evaluated by a log-derivative
// recursion on the product of simple poles, in extended precision with
// compensated summation. Throws NumericalError if the result lands outside
// [-1e-9, 1 + 1e-9]; otherwise the value is clamped into [0,1].
double weighted_exponential_cdf(const DistanceGrouping& grouping, double threshold);

// P(station k senses the channel idle | active set), Rayleigh fading or
// deterministic threshold test depending on topo.fading. Requires k not in
// the active set.
double idle_probability(int k, StateMask active, const NetworkTopology& topo);

// p_R * p_idle + p_J * (1 - p_idle): probability the jammer transmits given
// its sensing outcome.
double anomalous_probability(double p_R, double p_J, double p_idle);

// Dense cache of idle_probability(k, T) for all k and T. Chain construction
// and parameter sweeps reuse it; the table itself is independent of any
// jammer parameters.
class IdleTable {
public:
  static IdleTable build(const NetworkTopology& topo);

  double operator()(int k, StateMask active) const {
    return values_[static_cast<size_t>(k) << topo_.m | active];
  }
  const NetworkTopology& topology() const { return topo_; }

private:
  NetworkTopology topo_;
  std::vector<double> values_;
};

}  // namespace rrjam

#endif
