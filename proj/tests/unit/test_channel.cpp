#include <doctest.h>

#include <cmath>

#include "rrjam/channel.hpp"
#include "rrjam/errors.hpp"
#include "test_support.hpp"

using namespace rrjam;
using namespace rrjam::test;

namespace {

// Erlang(n, rate 1/w) CDF at x: 1 - exp(-x/w) sum_{k<n} (x/w)^k / k!
double erlang_cdf(int n, double w, double x) {
  const double y = x / w;
  double term = 1.0, sum = 0.0;
  for (int k = 0; k < n; ++k) {
    sum += term;
    term *= y / (k + 1);
  }
  return 1.0 - std::exp(-y) * sum;
}

}  // namespace

TEST_CASE("pathloss follows the reference-distance power law") {
  NetworkTopology topo;
  topo.m = 1;
  topo.positions = {{0, 0}};
  CHECK(pathloss(1.0, topo) == doctest::Approx(8.5959e-7).epsilon(1e-12));
  CHECK(pathloss(0.0, topo) == doctest::Approx(0.04).epsilon(1e-12));
  CHECK(pathloss(0.5, topo) == doctest::Approx(0.04).epsilon(1e-12));
  CHECK(pathloss(10.0, topo) == doctest::Approx(8.5959e-10).epsilon(1e-12));
}

TEST_CASE("idle probability basics") {
  const NetworkTopology topo = hexagon_r40();

  SUBCASE("empty active set senses idle") {
    for (int k = 0; k < topo.m; ++k) CHECK(idle_probability(k, 0, topo) == 1.0);
  }

  SUBCASE("sensing station may not be active") {
    CHECK_THROWS_AS(idle_probability(0, 0b000001, topo), ValidationError);
    CHECK_THROWS_AS(idle_probability(2, 0b000100, topo), ValidationError);
  }

  SUBCASE("single interferer reduces to the exponential CDF") {
    // station 1 sensing station 4 (the opposite ring station)
    const double w = pathloss(topo.distance(0, 3), topo);
    const double expected = 1.0 - std::exp(-(topo.theta - topo.N_0) / w);
    CHECK(idle_probability(0, 0b001000, topo) == doctest::Approx(expected).epsilon(1e-12));
  }

  SUBCASE("values stay inside [0,1] across all sets") {
    for (int k = 0; k < topo.m; ++k)
      for (StateMask mask = 0; mask < (1u << topo.m); ++mask) {
        if ((mask >> k) & 1) continue;
        const double p = idle_probability(k, mask, topo);
        CHECK(p >= 0.0);
        CHECK(p <= 1.0);
      }
  }
}

TEST_CASE("grouped weights reduce to the Erlang CDF") {
  // all stations at one distance: sum = w * Erlang(n, 1)
  for (int n = 1; n <= 5; ++n) {
    DistanceGrouping g;
    g.groups = {{2.3e-12, n}};
    const double threshold = 3.1e-12;
    CHECK(weighted_exponential_cdf(g, threshold) ==
          doctest::Approx(erlang_cdf(n, 2.3e-12, threshold)).epsilon(1e-10));
  }
}

TEST_CASE("closed-form CDF matches Monte Carlo including repeated weights") {
  const double threshold = 2.5119e-12 - 4.0124e-13;
  const std::vector<std::vector<double>> weight_sets = {
      {1e-12},
      {1e-12, 1e-12},
      {1e-12, 1e-12, 3e-12},
      {5e-13, 5e-13, 5e-13, 2e-12, 8e-12},
      {2.2e-12, 2.2e-12, 2.2000001e-12}, // merged by the relative tolerance
  };
  int case_idx = 0;
  for (const auto& weights : weight_sets) {
    DistanceGrouping g;
    for (double w : weights) {
      if (!g.groups.empty() && std::abs(w - g.groups.back().weight) <=
                                   1e-9 * g.groups.back().weight)
        g.groups.back().multiplicity++;
      else
        g.groups.push_back({w, 1});
    }
    const double closed = weighted_exponential_cdf(g, threshold);
    Xoshiro256 rng(42, 1000 + case_idx++);
    const long draws = 200000;
    const double mc = mc_weighted_exponential_cdf(g, threshold, draws, rng);
    const double se = std::sqrt(std::max(mc * (1 - mc), 1e-9) / draws);
    CHECK(std::abs(closed - mc) <= 3.5 * se);
  }
}

TEST_CASE("adding an interferer never raises the idle probability") {
  Xoshiro256 rng(7, 0);
  for (int trial = 0; trial < 10; ++trial) {
    NetworkTopology topo;
    topo.m = 5;
    for (int k = 0; k < topo.m; ++k)
      topo.positions.push_back({120 * rng.uniform() - 60, 120 * rng.uniform() - 60});
    topo.validate();
    for (StateMask mask = 0; mask < (1u << topo.m); ++mask) {
      if (mask & 1) continue;
      const double base = idle_probability(0, mask, topo);
      for (int k = 1; k < topo.m; ++k) {
        if ((mask >> k) & 1) continue;
        CHECK(idle_probability(0, mask | (1u << k), topo) <= base + 1e-12);
      }
    }
  }
}

TEST_CASE("anomalous probability") {
  CHECK(anomalous_probability(0.3, 0.3, 0.77) == doctest::Approx(0.3).epsilon(1e-15));
  CHECK(anomalous_probability(0.45, 0.9, 1.0) == doctest::Approx(0.45).epsilon(1e-15));
  CHECK(anomalous_probability(0.8, 0.2, 0.25) == doctest::Approx(0.35).epsilon(1e-15));
  CHECK_THROWS_AS(anomalous_probability(1.2, 0.0, 0.5), ValidationError);
}

TEST_CASE("distance grouping merges equal weights") {
  const NetworkTopology topo = diamond_r40();

  SUBCASE("stations 2 and 3 are equidistant from station 1") {
    const DistanceGrouping g = group_distances(0, 0b0110, topo);
    REQUIRE(g.groups.size() == 1);
    CHECK(g.groups[0].multiplicity == 2);
    CHECK(g.total_multiplicity() == 2);
  }

  SUBCASE("distinct distances stay separate") {
    // stations 2 and 4 sit at different distances from station 1
    const DistanceGrouping g = group_distances(0, 0b1010, topo);
    REQUIRE(g.groups.size() == 2);
    CHECK(g.groups[0].multiplicity == 1);
    CHECK(g.groups[1].multiplicity == 1);
    CHECK(g.groups[0].weight < g.groups[1].weight);
  }

  SUBCASE("sensing station must be outside the set") {
    CHECK_THROWS_AS(group_distances(1, 0b0010, topo), ValidationError);
  }
}

TEST_CASE("deterministic sensing reproduces the spacing-40 hidden-terminal pairs") {
  SUBCASE("four stations") {
    const NetworkTopology topo = diamond_r40(Fading::deterministic);
    for (int k = 0; k < 4; ++k)
      for (int kp = 0; kp < 4; ++kp) {
        if (k == kp) continue;
        const bool hidden = idle_probability(k, 1u << kp, topo) == 1.0;
        const bool expected = (k == 0 && kp == 3) || (k == 3 && kp == 0) ||
                              (k == 1 && kp == 2) || (k == 2 && kp == 1);
        CHECK(hidden == expected);
      }
  }
  SUBCASE("six stations (ring adds the 5-6 pair)") {
    const NetworkTopology topo = hexagon_r40(Fading::deterministic);
    for (int k = 0; k < 6; ++k)
      for (int kp = 0; kp < 6; ++kp) {
        if (k == kp) continue;
        const bool hidden = idle_probability(k, 1u << kp, topo) == 1.0;
        const bool expected = (k + kp == 3 && std::abs(k - kp) == 3) || (k == 1 && kp == 2) ||
                              (k == 2 && kp == 1) || (k == 4 && kp == 5) || (k == 5 && kp == 4);
        CHECK(hidden == expected);
      }
  }
}

TEST_CASE("idle table matches direct evaluation") {
  const NetworkTopology topo = asym_m4();
  const IdleTable table = IdleTable::build(topo);
  for (int k = 0; k < topo.m; ++k)
    for (StateMask mask = 0; mask < (1u << topo.m); ++mask) {
      if ((mask >> k) & 1) continue;
      CHECK(table(k, mask) == idle_probability(k, mask, topo));
    }
}

TEST_CASE("topology validation rejects a threshold at the noise floor") {
  NetworkTopology topo = asym_m2();
  topo.theta = topo.N_0;
  try {
    topo.validate();
    FAIL("expected ValidationError");
  } catch (const ValidationError& e) {
    CHECK(std::string(e.what()).find("theta must exceed the noise power") != std::string::npos);
  }
}
