#ifndef RRJAM_AGGREGATION_HPP
#define RRJAM_AGGREGATION_HPP

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rrjam/chain.hpp"

namespace rrjam {

// A partition of the full state space into disjoint, exhaustive blocks.
struct StatePartition {
  std::vector<std::vector<int>> blocks;
  std::vector<std::string> labels;
  std::vector<int> block_of; // state index -> block index

  int n_blocks() const { return static_cast<int>(blocks.size()); }
  void validate(int n_states) const;
};

// Every state its own block; aggregation becomes a relabeling.
StatePartition identity_partition(const StateSpace& space);

// Blocks keyed by (active count, SUT bit); infeasible pairs are omitted.
// At most 2m blocks.
StatePartition intermediate_partition(const StateSpace& space);

// Four blocks: {empty}, {SUT only}, {SUT idle, some other station active},
// {SUT active with at least one other station}.
StatePartition simplified_partition(const StateSpace& space);

struct LumpabilityWitness {
  int source_block = 0, target_block = 0;
  int state_i = 0, state_j = 0;  // both in source_block
  double row_sum_i = 0, row_sum_j = 0;
};

// Strong lumpability: for every block pair, all states of the source block
// must carry equal total rate into the target block (tolerance 1e-12).
// Returns a witness of the first violation, or nullopt when lumpable.
std::optional<LumpabilityWitness> strong_lumpability_witness(const ChainModel& chain,
                                                             const StatePartition& partition);

inline bool is_strongly_lumpable(const ChainModel& chain, const StatePartition& partition) {
  return !strong_lumpability_witness(chain, partition).has_value();
}

// A chain on partition blocks with stationary-weighted averaged rates.
struct AggregatedChain {
  StatePartition partition;
  Eigen::MatrixXd Q;
  double u = 0.0;
  Eigen::MatrixXd P;
  Eigen::VectorXd pi;
  // Indicator over blocks of the collision set; defined when every block is
  // entirely inside or outside the full model's collision states.
  std::optional<Eigen::VectorXd> collision_indicator;
};

// q_hat(B,B') = sum_{T in B} pi_T sum_{T' in B'} q(T,T') / sum_{T in B} pi_T.
// Preserves block-summed stationary mass for any partition.
AggregatedChain ideal_aggregate(const ChainModel& chain, const StatePartition& partition);

// Shared-clock uniformization for an aggregated hypothesis pair; the clock is
// fresh (derived from the aggregated generators, not the full model's).
UniformizedPair uniformize_aggregated_pair(const AggregatedChain& a0, const AggregatedChain& a1);

// Jamming efficiency computed on the full pair and on the aggregated pair;
// ideal aggregation preserves it.
struct EfficiencyComparison {
  double eta_full = 0, eta_aggregated = 0;
};
EfficiencyComparison jamming_efficiency_aggregated(const ChainModel& full0, const ChainModel& full1,
                                                   const AggregatedChain& agg0,
                                                   const AggregatedChain& agg1);

// Maps a full-model path through the partition; transitions between distinct
// full states inside one block become block self-loops.
std::vector<int> map_path(std::span<const int> path, const StatePartition& partition);

nlohmann::json aggregated_to_json(const AggregatedChain& agg);

}  // namespace rrjam

#endif
