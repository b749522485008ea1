#include "rrjam/aggregation.hpp"

#include <cmath>
#include <map>

#include <nlohmann/json.hpp>

#include "rrjam/errors.hpp"
#include "rrjam/ldp.hpp"

namespace rrjam {

namespace {
constexpr double kLumpTol = 1e-12;
constexpr double kUniformizationMargin = 1.1;
}  // namespace

void StatePartition::validate(int n_states) const {
  std::vector<int> seen(n_states, 0);
  for (const auto& block : blocks) {
    if (block.empty()) throw ValidationError("partition: empty block");
    for (int s : block) {
      if (s < 0 || s >= n_states) throw ValidationError("partition: state index out of range");
      seen[s] += 1;
    }
  }
  for (int s = 0; s < n_states; ++s)
    if (seen[s] != 1) throw ValidationError("partition: blocks must be disjoint and exhaustive");
  if (static_cast<int>(block_of.size()) != n_states)
    throw ValidationError("partition: block_of size mismatch");
}

namespace {

StatePartition finish_partition(std::vector<std::vector<int>> blocks,
                                std::vector<std::string> labels, int n_states) {
  StatePartition p;
  p.blocks = std::move(blocks);
  p.labels = std::move(labels);
  p.block_of.assign(n_states, -1);
  for (int b = 0; b < p.n_blocks(); ++b)
    for (int s : p.blocks[b]) p.block_of[s] = b;
  p.validate(n_states);
  return p;
}

}  // namespace

StatePartition identity_partition(const StateSpace& space) {
  std::vector<std::vector<int>> blocks;
  std::vector<std::string> labels;
  for (int s = 0; s < space.size; ++s) {
    blocks.push_back({s});
    labels.push_back(space.label(s));
  }
  return finish_partition(std::move(blocks), std::move(labels), space.size);
}

StatePartition intermediate_partition(const StateSpace& space) {
  if (space.m < 2) throw ValidationError("intermediate_partition: requires m >= 2");
  std::map<std::pair<int, int>, std::vector<int>> by_key; // (active count, SUT bit)
  for (int s = 0; s < space.size; ++s)
    by_key[{space.active_count(s), space.sut_active(s) ? 1 : 0}].push_back(s);
  std::vector<std::vector<int>> blocks;
  std::vector<std::string> labels;
  for (auto& [key, states] : by_key) {
    blocks.push_back(std::move(states));
    labels.push_back("(" + std::to_string(key.first) + "," + std::to_string(key.second) + ")");
  }
  return finish_partition(std::move(blocks), std::move(labels), space.size);
}

StatePartition simplified_partition(const StateSpace& space) {
  if (space.m < 2) throw ValidationError("simplified_partition: requires m >= 2");
  std::vector<std::vector<int>> blocks(4);
  for (int s = 0; s < space.size; ++s) {
    const bool sut = space.sut_active(s);
    const bool others = space.active_count(s) > (sut ? 1 : 0);
    const int b = !sut ? (others ? 2 : 0) : (others ? 3 : 1);
    blocks[b].push_back(s);
  }
  return finish_partition(std::move(blocks), {"S0", "S1", "S2", "S3"}, space.size);
}

std::optional<LumpabilityWitness> strong_lumpability_witness(const ChainModel& chain,
                                                             const StatePartition& partition) {
  partition.validate(chain.space.size);
  const int nb = partition.n_blocks();
  for (int from = 0; from < nb; ++from) {
    const auto& source = partition.blocks[from];
    if (source.size() < 2) continue;
    for (int to = 0; to < nb; ++to) {
      if (to == from) continue; // complements of the off-block sums; rows sum to zero
      const auto& target = partition.blocks[to];
      const auto row_sum = [&](int i) {
        double acc = 0;
        for (int j : target) acc += chain.Q(i, j);
        return acc;
      };
      const double first = row_sum(source[0]);
      for (size_t k = 1; k < source.size(); ++k) {
        const double other = row_sum(source[k]);
        if (std::abs(other - first) > kLumpTol) {
          return LumpabilityWitness{from, to, source[0], source[k], first, other};
        }
      }
    }
  }
  return std::nullopt;
}

AggregatedChain ideal_aggregate(const ChainModel& chain, const StatePartition& partition) {
  partition.validate(chain.space.size);
  const int nb = partition.n_blocks();
  AggregatedChain agg;
  agg.partition = partition;
  agg.Q.setZero(nb, nb);
  for (int a = 0; a < nb; ++a) {
    double mass = 0;
    for (int i : partition.blocks[a]) mass += chain.pi[i];
    if (!(mass > 0))
      throw ValidationError("ideal_aggregate: block '" + partition.labels[a] +
                            "' carries no stationary mass");
    const bool singleton = partition.blocks[a].size() == 1;
    for (int b = 0; b < nb; ++b) {
      if (b == a) continue;
      if (singleton) {
        // weight and normalization cancel; summing directly keeps singleton
        // blocks bit-exact
        double row = 0;
        for (int j : partition.blocks[b]) row += chain.Q(partition.blocks[a][0], j);
        agg.Q(a, b) = row;
        continue;
      }
      double acc = 0;
      for (int i : partition.blocks[a]) {
        double row = 0;
        for (int j : partition.blocks[b]) row += chain.Q(i, j);
        acc += chain.pi[i] * row;
      }
      agg.Q(a, b) = acc / mass;
    }
    agg.Q(a, a) = -agg.Q.row(a).sum();
  }
  agg.pi = stationary_distribution(agg.Q);
  agg.u = kUniformizationMargin * agg.Q.diagonal().cwiseAbs().maxCoeff();
  agg.P = Eigen::MatrixXd::Identity(nb, nb) + agg.Q / agg.u;

  // Collision indicator lifts to blocks only when each block is pure.
  Eigen::VectorXd t = Eigen::VectorXd::Zero(nb);
  bool pure = true;
  for (int b = 0; b < nb && pure; ++b) {
    int n_coll = 0;
    for (int i : partition.blocks[b])
      if (chain.space.is_collision(i)) ++n_coll;
    if (n_coll == 0)
      t[b] = 0;
    else if (n_coll == static_cast<int>(partition.blocks[b].size()))
      t[b] = 1;
    else
      pure = false;
  }
  if (pure) agg.collision_indicator = t;
  return agg;
}

UniformizedPair uniformize_aggregated_pair(const AggregatedChain& a0, const AggregatedChain& a1) {
  if (a0.Q.rows() != a1.Q.rows())
    throw ValidationError("uniformize_aggregated_pair: mismatched partitions");
  UniformizedPair pair;
  pair.u = kUniformizationMargin * std::max(a0.Q.diagonal().cwiseAbs().maxCoeff(),
                                            a1.Q.diagonal().cwiseAbs().maxCoeff());
  const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(a0.Q.rows(), a0.Q.cols());
  pair.P0 = id + a0.Q / pair.u;
  pair.P1 = id + a1.Q / pair.u;
  return pair;
}

EfficiencyComparison jamming_efficiency_aggregated(const ChainModel& full0, const ChainModel& full1,
                                                   const AggregatedChain& agg0,
                                                   const AggregatedChain& agg1) {
  const EfficiencyReport full = jamming_efficiency(full0.pi, full1.pi, full0.space);
  if (!full.eta) throw ValidationError("jamming_efficiency_aggregated: eta undefined (r0 = 0)");
  if (!agg0.collision_indicator || !agg1.collision_indicator)
    throw ValidationError("jamming_efficiency_aggregated: partition mixes collision and "
                          "non-collision states within a block");
  const double r0 = agg0.pi.dot(*agg0.collision_indicator);
  const double r1 = agg1.pi.dot(*agg1.collision_indicator);
  if (!(r0 > 0)) throw ValidationError("jamming_efficiency_aggregated: aggregated r0 is zero");
  return {*full.eta, r1 / r0};
}

std::vector<int> map_path(std::span<const int> path, const StatePartition& partition) {
  std::vector<int> mapped;
  mapped.reserve(path.size());
  for (int s : path) {
    if (s < 0 || s >= static_cast<int>(partition.block_of.size()))
      throw ValidationError("map_path: state index out of range");
    mapped.push_back(partition.block_of[s]);
  }
  return mapped;
}

nlohmann::json aggregated_to_json(const AggregatedChain& agg) {
  nlohmann::json j;
  const int nb = agg.partition.n_blocks();
  j["blocks"] = agg.partition.labels;
  auto members = nlohmann::json::array();
  for (const auto& block : agg.partition.blocks) members.push_back(block);
  j["block_members"] = members;
  j["u"] = agg.u;
  auto matrix = [](const Eigen::MatrixXd& M) {
    auto rows = nlohmann::json::array();
    for (int i = 0; i < M.rows(); ++i) {
      auto row = nlohmann::json::array();
      for (int k = 0; k < M.cols(); ++k) row.push_back(M(i, k));
      rows.push_back(std::move(row));
    }
    return rows;
  };
  j["Q"] = matrix(agg.Q);
  j["P"] = matrix(agg.P);
  auto pi = nlohmann::json::array();
  for (int i = 0; i < nb; ++i) pi.push_back(agg.pi[i]);
  j["pi"] = pi;
  return j;
}

}  // namespace rrjam
