#ifndef RRJAM_TOPOLOGY_HPP
#define RRJAM_TOPOLOGY_HPP

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace rrjam {

enum class Fading { rayleigh, deterministic };

// Static station layout plus the radio parameters that determine carrier
// sensing. Station 0 is the station under test; positions are immutable after
// construction. Units: watts and meters.
struct NetworkTopology {
  int m = 0;                                    // station count
  std::vector<std::array<double, 2>> positions; // meters, length m
  double p_t = 0.04;                            // transmit power, W
  double p_o = 8.5959e-7;                       // received power at d_o, W
  double d_o = 1.0;                             // reference distance, m
  double alpha = 3.0;                           // pathloss exponent
  double N_0 = 4.0124e-13;                      // noise power, W
  double theta = 2.5119e-12;                    // carrier-sense threshold, W
  Fading fading = Fading::rayleigh;

  double distance(int a, int b) const;

  // Throws ValidationError on m < 1, non-positive powers, or theta <= N_0
  // (a threshold at or below the noise floor makes every idle probability 0
  // and the chain degenerates).
  void validate() const;

  static NetworkTopology from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
};

// Large-scale pathloss: p_o * d^-alpha beyond the reference distance, p_t
// inside it.
double pathloss(double dist, const NetworkTopology& topo);

std::string to_string(Fading f);
Fading fading_from_string(const std::string& s);

}  // namespace rrjam

#endif
