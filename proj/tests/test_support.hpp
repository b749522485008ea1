#ifndef RRJAM_TEST_SUPPORT_HPP
#define RRJAM_TEST_SUPPORT_HPP

#include <cmath>
#include <numbers>
#include <vector>

#include "rrjam/channel.hpp"
#include "rrjam/chain.hpp"
#include "rrjam/errors.hpp"
#include "rrjam/rng.hpp"
#include "rrjam/topology.hpp"

namespace rrjam::test {

// Stations on a circle; station 1 is the SUT at 180 degrees.
inline NetworkTopology ring_topology(const std::vector<double>& angles_deg, double radius,
                                     Fading fading = Fading::rayleigh) {
  NetworkTopology topo;
  topo.m = static_cast<int>(angles_deg.size());
  for (const double a : angles_deg) {
    const double rad = a * std::numbers::pi / 180.0;
    topo.positions.push_back({radius * std::cos(rad), radius * std::sin(rad)});
  }
  topo.fading = fading;
  topo.validate();
  return topo;
}

// Reconstructed spacing-40 layouts: opposite pairs (1,4) and (2,3) are the
// hidden-terminal pairs under deterministic sensing.
inline NetworkTopology hexagon_r40(Fading fading = Fading::rayleigh) {
  return ring_topology({180, 240, 60, 0, 120, 300}, 40.0, fading);
}

inline NetworkTopology diamond_r40(Fading fading = Fading::rayleigh) {
  return ring_topology({180, 270, 90, 0}, 40.0, fading);
}

// Position-jittered variants without reflection symmetry; their uniformized
// chains have simple eigenvalues across the whole jammer-parameter grid.
inline NetworkTopology asym_m2() {
  NetworkTopology topo;
  topo.m = 2;
  topo.positions = {{0.0, 0.0}, {80.0, 3.0}};
  topo.validate();
  return topo;
}

inline NetworkTopology asym_m4() {
  NetworkTopology topo;
  topo.m = 4;
  topo.positions = {{-40.0, 1.0}, {3.0, -38.0}, {-2.0, 42.0}, {41.0, -2.0}};
  topo.validate();
  return topo;
}

inline NetworkTopology asym_m6() {
  const std::vector<double> angles = {180, 246, 55, 4, 128, 293};
  const std::vector<double> radii = {40.0, 42.5, 37.0, 41.5, 39.0, 43.5};
  NetworkTopology topo;
  topo.m = 6;
  for (int k = 0; k < 6; ++k) {
    const double rad = angles[k] * std::numbers::pi / 180.0;
    topo.positions.push_back({radii[k] * std::cos(rad), radii[k] * std::sin(rad)});
  }
  topo.validate();
  return topo;
}

inline NetworkTopology asym_m(int m) {
  switch (m) {
    case 2: return asym_m2();
    case 4: return asym_m4();
    case 6: return asym_m6();
    default: throw ValidationError("asym_m: no fixture for this m");
  }
}

constexpr double kLambda = 1.0;
constexpr double kGamma = 1.7;

// Monte Carlo estimate of P(sum_a w_a * sum Exp(1) <= threshold).
inline double mc_weighted_exponential_cdf(const DistanceGrouping& grouping, double threshold,
                                          long draws, Xoshiro256& rng) {
  long hits = 0;
  for (long s = 0; s < draws; ++s) {
    double acc = 0;
    for (const auto& g : grouping.groups)
      for (int rep = 0; rep < g.multiplicity; ++rep) acc += g.weight * rng.exponential();
    if (acc <= threshold) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(draws);
}

}  // namespace rrjam::test

#endif
