#ifndef RRJAM_CHAIN_HPP
#define RRJAM_CHAIN_HPP

#include <optional>
#include <string>

#include <Eigen/Dense>
#include <nlohmann/json_fwd.hpp>

#include "rrjam/state_space.hpp"

namespace rrjam {

enum class ChainKind { compliant, naive_rj, rrj };

struct JammerParams {
  double p_R = 1.0; // transmit probability when the channel is sensed idle
  double p_J = 0.0; // jamming probability when the channel is sensed busy
};

// A labeled CTMC over the full state space together with its uniformized
// DTMC. Immutable after construction; safe to share across threads.
struct ChainModel {
  ChainKind kind = ChainKind::compliant;
  StateSpace space;
  double lambda_rate = 0.0; // sensing rate
  double gamma_rate = 0.0;  // service rate
  std::optional<JammerParams> jammer;

  Eigen::MatrixXd Q;  // generator; rows sum to 0
  double u = 0.0;     // uniformization rate, 1.1 * max |q_ii|
  Eigen::MatrixXd P;  // I + Q/u, row-stochastic
  Eigen::VectorXd pi; // stationary distribution, pi^T Q = 0, positive

  nlohmann::json to_json() const;
};

// Builders. All rates: idle->active transitions at lambda * p_I(k, T) for a
// compliant station, lambda * p_A(1, T) for the RRJ (station 1 only), and
// lambda * p_J * (1 - p_I(1, T)) for the naive reactive jammer; active->idle
// uniformly at gamma. A builder throws ValidationError when the resulting
// positive-rate digraph is not strongly connected (some states are
// unreachable, so pi would have zero entries); this is the expected failure
// mode for deterministic sensing on coupled topologies.
ChainModel build_compliant(const IdleTable& idle, double lambda, double gamma);
ChainModel build_rrj(const IdleTable& idle, double lambda, double gamma, double p_R, double p_J);
ChainModel build_naive_rj(const IdleTable& idle, double lambda, double gamma, double p_J);

// Rate assembly alone, without the ergodicity gate; lets callers inspect
// degenerate generators (all-zero jam rates, reducible chains) directly.
Eigen::MatrixXd chain_generator(ChainKind kind, const IdleTable& idle, double lambda, double gamma,
                                JammerParams jammer);

// Solves pi^T Q = 0, sum pi = 1 by a direct augmented linear solve.
// Throws ValidationError if Q has more than one closed communicating class
// (the fixed vector is not unique) and NumericalError if the residual
// ||pi^T Q||_inf exceeds 1e-12 after iterative refinement. Transient states
// (states outside the single closed class) receive exactly zero mass.
Eigen::VectorXd stationary_distribution(const Eigen::MatrixXd& Q);

// True when every state can reach every other through positive rates.
bool is_irreducible(const Eigen::MatrixXd& Q);

// Re-uniformizes a hypothesis pair at a shared rate u = 1.1 * max over both
// generators of |q_ii|, as the detector requires both DTMCs to be sampled on
// the same clock.
struct UniformizedPair {
  double u = 0.0;
  Eigen::MatrixXd P0, P1;
};
UniformizedPair uniformize_pair(const ChainModel& c0, const ChainModel& c1);

// JSON round trip (state labels, Q, P, pi, u and metadata) for debugging and
// cross-implementation diffing.
nlohmann::json chain_to_json(const ChainModel& chain);
ChainModel chain_from_json(const nlohmann::json& j);

}  // namespace rrjam

#endif
