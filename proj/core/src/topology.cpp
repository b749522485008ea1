#include "rrjam/topology.hpp"

#include <cmath>

#include <nlohmann/json.hpp>

#include "rrjam/errors.hpp"

namespace rrjam {

double NetworkTopology::distance(int a, int b) const {
  const double dx = positions[a][0] - positions[b][0];
  const double dy = positions[a][1] - positions[b][1];
  return std::hypot(dx, dy);
}

void NetworkTopology::validate() const {
  if (m < 1) throw ValidationError("topology: station count m must be >= 1");
  if (static_cast<int>(positions.size()) != m)
    throw ValidationError("topology: positions must have exactly m entries");
  if (!(p_t > 0) || !(p_o > 0) || !(N_0 > 0) || !(theta > 0))
    throw ValidationError("topology: powers p_t, p_o, N_0, theta must be positive");
  if (!(d_o > 0)) throw ValidationError("topology: reference distance d_o must be positive");
  if (!(alpha > 0)) throw ValidationError("topology: pathloss exponent alpha must be positive");
  if (!(theta > N_0))
    throw ValidationError(
        "topology: carrier-sense threshold theta must exceed the noise power N_0; "
        "theta <= N_0 makes every idle probability 0 and the chain degenerates");
}

double pathloss(double dist, const NetworkTopology& topo) {
  if (dist < 0) throw ValidationError("pathloss: negative distance");
  if (dist < topo.d_o) return topo.p_t;
  return topo.p_o * std::pow(dist, -topo.alpha);
}

std::string to_string(Fading f) {
  return f == Fading::rayleigh ? "rayleigh" : "deterministic";
}

Fading fading_from_string(const std::string& s) {
  if (s == "rayleigh") return Fading::rayleigh;
  if (s == "deterministic") return Fading::deterministic;
  throw ValidationError("topology: fading must be 'rayleigh' or 'deterministic', got '" + s + "'");
}

namespace {

void reject_unknown_keys(const nlohmann::json& j, std::initializer_list<const char*> allowed,
                         const std::string& where) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool known = false;
    for (const char* k : allowed)
      if (it.key() == k) known = true;
    if (!known) throw ValidationError(where + ": unknown key '" + it.key() + "'");
  }
}

}  // namespace

NetworkTopology NetworkTopology::from_json(const nlohmann::json& j) {
  reject_unknown_keys(
      j, {"m", "positions", "p_t", "p_o", "d_o", "alpha", "N_0", "theta", "fading"}, "topology");
  NetworkTopology t;
  t.m = j.at("m").get<int>();
  for (const auto& p : j.at("positions")) {
    if (!p.is_array() || p.size() != 2)
      throw ValidationError("topology: each position must be a [x, y] pair");
    t.positions.push_back({p[0].get<double>(), p[1].get<double>()});
  }
  if (j.contains("p_t")) t.p_t = j.at("p_t").get<double>();
  if (j.contains("p_o")) t.p_o = j.at("p_o").get<double>();
  if (j.contains("d_o")) t.d_o = j.at("d_o").get<double>();
  if (j.contains("alpha")) t.alpha = j.at("alpha").get<double>();
  if (j.contains("N_0")) t.N_0 = j.at("N_0").get<double>();
  if (j.contains("theta")) t.theta = j.at("theta").get<double>();
  if (j.contains("fading")) t.fading = fading_from_string(j.at("fading").get<std::string>());
  t.validate();
  return t;
}

nlohmann::json NetworkTopology::to_json() const {
  nlohmann::json j;
  j["m"] = m;
  auto pos = nlohmann::json::array();
  for (const auto& p : positions) pos.push_back({p[0], p[1]});
  j["positions"] = pos;
  j["p_t"] = p_t;
  j["p_o"] = p_o;
  j["d_o"] = d_o;
  j["alpha"] = alpha;
  j["N_0"] = N_0;
  j["theta"] = theta;
  j["fading"] = to_string(fading);
  return j;
}

}  // namespace rrjam
