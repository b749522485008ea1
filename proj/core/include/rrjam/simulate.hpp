#ifndef RRJAM_SIMULATE_HPP
#define RRJAM_SIMULATE_HPP

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "rrjam/aggregation.hpp"
#include "rrjam/detector.hpp"
#include "rrjam/rng.hpp"

namespace rrjam {

// Row-wise inverse-CDF sampler for a DTMC plus its initial distribution.
class DtmcSampler {
public:
  DtmcSampler(const Eigen::MatrixXd& P, const Eigen::VectorXd& pi);

  // W+1 states; the initial state is drawn from pi (stationary start, so the
  // asymptotic moment formulas apply without burn-in).
  std::vector<int> simulate(long W, Xoshiro256& rng) const;

private:
  CategoricalSampler initial_;
  std::vector<CategoricalSampler> rows_;
};

std::vector<int> simulate_path(const ChainModel& chain, long W, Xoshiro256& rng);

struct EmpiricalRoc {
  std::vector<RocPoint> points;
  double eer = 0;
  double eer_threshold = 0;
};

// Z samples for n paths under each hypothesis. Paths are generated in
// parallel with per-path substreams keyed on (seed, hypothesis, path index);
// results are reduced in index order so the output is independent of the
// thread count.
struct ZSamples {
  std::vector<double> z0, z1;
};
ZSamples sample_statistics(const TestSpec& spec, long W, int n_paths, uint64_t seed, int threads);

// Empirical ROC over the pooled Z range: every distinct observed value when
// few, else 512 quantile-spaced thresholds.
EmpiricalRoc empirical_roc(const ZSamples& samples, TestMode mode);

// Decision-rule error rate with singular-cell short-circuiting (certainty
// decisions), threshold from the analytic equal-error point of the finite
// part.
struct DecisionErrors {
  double error0 = 0, error1 = 0; // misclassification rates per hypothesis
  long n = 0;
};
DecisionErrors empirical_decision_errors(const TestSpec& spec, long W, int n_paths, uint64_t seed,
                                         int threads, double xi0);

enum class ObservationModel { full, intermediate, simplified };

std::string to_string(ObservationModel m);
ObservationModel observation_model_from_string(const std::string& s);

// Supervised detection on aggregated observations: full-model paths are
// generated once, mapped through the partition, and tested against the
// ideal-aggregate hypothesis pair (fresh shared clock).
struct AggregatedExperimentResult {
  ObservationModel model;
  double u_full = 0, u_aggregated = 0;
  EmpiricalRoc roc;
  double analytic_eer = 0;
};

AggregatedExperimentResult aggregated_experiment(const ChainModel& c0, const ChainModel& c1,
                                                 ObservationModel model, long W, int n_paths,
                                                 uint64_t seed, int threads);

// Several observation models evaluated on one shared set of full-model paths.
std::vector<AggregatedExperimentResult> aggregated_experiments(
    const ChainModel& c0, const ChainModel& c1, const std::vector<ObservationModel>& models,
    long W, int n_paths, uint64_t seed, int threads);

struct ParetoPoint {
  double p_R = 0, p_J = 0;
  double eta = 0;
  double eer = 0;
  std::string model;
  bool on_frontier = false;
  double distance = 0; // to the frontier polyline in normalized (eta, eer)
};

// Non-dominated subset under (maximize eta, maximize EER) plus each point's
// distance to the frontier polyline; coordinates are normalized by the grid
// ranges before measuring distance.
void pareto_frontier(std::vector<ParetoPoint>& points);

// Independent brute-force oracles cross-checking the closed forms: weighted
// exponential CDF vs Monte Carlo, analytic Z moments vs simulation, spectral
// k-step probabilities vs matrix powers, and the strategy solver vs dense
// grid search. Deterministic under a fixed seed.
struct OracleEntry {
  std::string name;
  double value = 0, reference = 0, tolerance = 0;
  bool pass = false;
};
struct OracleReport {
  std::vector<OracleEntry> entries;
  bool all_pass = true;
};

struct OracleConfig {
  uint64_t seed = 1;
  int threads = 1;
  // scale factors let unit tests run a cheaper variant
  int channel_cases = 20;
  long channel_draws = 1000000;
  int moment_paths = 10000;
  long moment_W = 1000;
  double grid_step = 0.005;
};

OracleReport run_oracles(const IdleTable& idle, double lambda, double gamma, const OracleConfig& cfg);

nlohmann::json oracle_report_to_json(const OracleReport& report);

}  // namespace rrjam

#endif
