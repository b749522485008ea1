#ifndef RRJAM_SCENARIO_HPP
#define RRJAM_SCENARIO_HPP

#include <array>
#include <cstdint>
#include <optional>
#include <string>

#include <nlohmann/json_fwd.hpp>

#include "rrjam/ldp.hpp"
#include "rrjam/simulate.hpp"
#include "rrjam/topology.hpp"

namespace rrjam {

struct GridSpec {
  double lo = 0, hi = 1;
  int count = 2;
  std::vector<double> values() const;
};

struct JammerSection {
  std::optional<JammerParams> point;      // single (p_R, p_J)
  std::optional<GridSpec> grid_R, grid_J; // or a grid over both
  std::optional<double> p_J_naive;        // naive reactive jammer scenarios
  // strategy-problem inputs
  std::optional<double> tau_eta;
  std::optional<GridSpec> tau_eta_sweep;
  std::array<double, 2> expansion{0.5, 0.5};
  int order = 1;
};

struct ExperimentSection {
  long W = 1000;
  int n_paths = 10000;
  uint64_t seed = 1;
  ObservationModel model = ObservationModel::full;
  TestMode detector = TestMode::supervised;
  bool both_detectors = false;
};

// Parsed scenario file. Parsing is strict: unknown keys anywhere are
// rejected.
struct Scenario {
  NetworkTopology topology;
  double lambda = 1.0, gamma = 1.7;
  JammerSection jammer;
  ExperimentSection experiment;
  std::optional<std::string> out_dir;

  static Scenario from_json(const nlohmann::json& j);
  static Scenario from_file(const std::string& path);
};

}  // namespace rrjam

#endif
