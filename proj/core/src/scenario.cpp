#include "rrjam/scenario.hpp"

#include <fstream>

#include <nlohmann/json.hpp>

#include "rrjam/errors.hpp"

namespace rrjam {

namespace {

void reject_unknown_keys(const nlohmann::json& j, std::initializer_list<const char*> allowed,
                         const std::string& where) {
  if (!j.is_object()) throw ValidationError(where + ": expected an object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool known = false;
    for (const char* k : allowed)
      if (it.key() == k) known = true;
    if (!known) throw ValidationError(where + ": unknown key '" + it.key() + "'");
  }
}

GridSpec grid_from_json(const nlohmann::json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 3)
    throw ValidationError(where + ": grid spec must be [lo, hi, count]");
  GridSpec g;
  g.lo = j[0].get<double>();
  g.hi = j[1].get<double>();
  g.count = j[2].get<int>();
  if (g.count < 2 || g.hi < g.lo) throw ValidationError(where + ": invalid grid spec");
  return g;
}

}  // namespace

std::vector<double> GridSpec::values() const {
  std::vector<double> v(count);
  for (int i = 0; i < count; ++i)
    v[i] = lo + (hi - lo) * static_cast<double>(i) / (count - 1);
  return v;
}

Scenario Scenario::from_json(const nlohmann::json& j) {
  reject_unknown_keys(j, {"topology", "chain", "jammer", "experiment", "out_dir"}, "scenario");
  Scenario s;
  s.topology = NetworkTopology::from_json(j.at("topology"));

  if (j.contains("chain")) {
    const auto& c = j.at("chain");
    reject_unknown_keys(c, {"lambda", "gamma"}, "chain");
    if (c.contains("lambda")) s.lambda = c.at("lambda").get<double>();
    if (c.contains("gamma")) s.gamma = c.at("gamma").get<double>();
    if (!(s.lambda > 0) || !(s.gamma > 0))
      throw ValidationError("chain: lambda and gamma must be positive");
  }

  if (j.contains("jammer")) {
    const auto& jm = j.at("jammer");
    reject_unknown_keys(
        jm, {"p_R", "p_J", "grid_p_R", "grid_p_J", "naive_p_J", "tau_eta", "tau_eta_sweep",
             "expansion", "order"},
        "jammer");
    if (jm.contains("p_R") != jm.contains("p_J"))
      throw ValidationError("jammer: p_R and p_J must be given together");
    if (jm.contains("p_R"))
      s.jammer.point = JammerParams{jm.at("p_R").get<double>(), jm.at("p_J").get<double>()};
    if (jm.contains("grid_p_R")) s.jammer.grid_R = grid_from_json(jm.at("grid_p_R"), "jammer");
    if (jm.contains("grid_p_J")) s.jammer.grid_J = grid_from_json(jm.at("grid_p_J"), "jammer");
    if (jm.contains("naive_p_J")) s.jammer.p_J_naive = jm.at("naive_p_J").get<double>();
    if (jm.contains("tau_eta")) s.jammer.tau_eta = jm.at("tau_eta").get<double>();
    if (jm.contains("tau_eta_sweep"))
      s.jammer.tau_eta_sweep = grid_from_json(jm.at("tau_eta_sweep"), "jammer");
    if (jm.contains("expansion")) {
      const auto& e = jm.at("expansion");
      if (!e.is_array() || e.size() != 2)
        throw ValidationError("jammer: expansion must be [p_R, p_J]");
      s.jammer.expansion = {e[0].get<double>(), e[1].get<double>()};
    }
    if (jm.contains("order")) s.jammer.order = jm.at("order").get<int>();
  }

  if (j.contains("experiment")) {
    const auto& e = j.at("experiment");
    reject_unknown_keys(e, {"W", "n_paths", "seed", "model", "detector"}, "experiment");
    if (e.contains("W")) s.experiment.W = e.at("W").get<long>();
    if (e.contains("n_paths")) s.experiment.n_paths = e.at("n_paths").get<int>();
    if (e.contains("seed")) s.experiment.seed = e.at("seed").get<uint64_t>();
    if (e.contains("model"))
      s.experiment.model = observation_model_from_string(e.at("model").get<std::string>());
    if (e.contains("detector")) {
      const std::string d = e.at("detector").get<std::string>();
      if (d == "supervised") {
        s.experiment.detector = TestMode::supervised;
      } else if (d == "semi_supervised") {
        s.experiment.detector = TestMode::semi_supervised;
      } else if (d == "both") {
        s.experiment.detector = TestMode::supervised;
        s.experiment.both_detectors = true;
      } else {
        throw ValidationError("experiment: detector must be supervised|semi_supervised|both");
      }
    }
    if (s.experiment.W < 2) throw ValidationError("experiment: W must be >= 2");
    if (s.experiment.n_paths < 1) throw ValidationError("experiment: n_paths must be >= 1");
  }

  if (j.contains("out_dir")) s.out_dir = j.at("out_dir").get<std::string>();
  return s;
}

Scenario Scenario::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("scenario: cannot open '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError("scenario: " + path + " is not valid JSON: " + e.what());
  }
  return from_json(j);
}

}  // namespace rrjam
