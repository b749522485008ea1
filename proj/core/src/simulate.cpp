#include "rrjam/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <thread>

#include <nlohmann/json.hpp>

#include "rrjam/errors.hpp"
#include "rrjam/ldp.hpp"

namespace rrjam {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void parallel_for(int n, int threads, const std::function<void(int)>& body) {
  if (threads <= 1 || n < 2) {
    for (int i = 0; i < n; ++i) body(i);
    return;
  }
  const int workers = std::min(threads, n);
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      for (int i = w; i < n; i += workers) body(i);
    });
  }
  for (auto& th : pool) th.join();
}

uint64_t path_stream(int hypothesis, int path_index) {
  return (static_cast<uint64_t>(hypothesis + 1) << 40) | static_cast<uint64_t>(path_index);
}

// Streaming Z over a path: finite part plus flags for infinite-coefficient
// cells, without materializing the counts matrix.
double z_of_mapped_path(std::span<const int> path, const Eigen::MatrixXd& l, long W) {
  double finite = 0;
  bool pos = false, neg = false;
  for (size_t t = 0; t + 1 < path.size(); ++t) {
    const double lij = l(path[t], path[t + 1]);
    if (lij == kInf)
      pos = true;
    else if (lij == -kInf)
      neg = true;
    else
      finite += lij;
  }
  if (pos && neg) return std::numeric_limits<double>::quiet_NaN();
  if (pos) return kInf;
  if (neg) return -kInf;
  return finite / static_cast<double>(W);
}

}  // namespace

DtmcSampler::DtmcSampler(const Eigen::MatrixXd& P, const Eigen::VectorXd& pi)
    : initial_(std::span<const double>(pi.data(), pi.size())) {
  rows_.reserve(P.rows());
  for (int i = 0; i < P.rows(); ++i) {
    std::vector<double> row(P.cols());
    for (int j = 0; j < P.cols(); ++j) row[j] = P(i, j);
    rows_.emplace_back(std::span<const double>(row));
  }
}

std::vector<int> DtmcSampler::simulate(long W, Xoshiro256& rng) const {
  std::vector<int> path(W + 1);
  path[0] = initial_.sample(rng);
  for (long t = 0; t < W; ++t) path[t + 1] = rows_[path[t]].sample(rng);
  return path;
}

std::vector<int> simulate_path(const ChainModel& chain, long W, Xoshiro256& rng) {
  return DtmcSampler(chain.P, chain.pi).simulate(W, rng);
}

ZSamples sample_statistics(const TestSpec& spec, long W, int n_paths, uint64_t seed, int threads) {
  ZSamples out;
  out.z0.resize(n_paths);
  out.z1.resize(n_paths);
  const DtmcSampler s0(spec.P0, spec.pi0), s1(spec.P1, spec.pi1);
  for (int hyp = 0; hyp < 2; ++hyp) {
    const DtmcSampler& sampler = hyp == 0 ? s0 : s1;
    std::vector<double>& z = hyp == 0 ? out.z0 : out.z1;
    parallel_for(n_paths, threads, [&](int p) {
      Xoshiro256 rng(seed, path_stream(hyp, p));
      const std::vector<int> path = sampler.simulate(W, rng);
      z[p] = z_of_mapped_path(path, spec.l, W);
    });
  }
  return out;
}

EmpiricalRoc empirical_roc(const ZSamples& samples, TestMode mode) {
  std::vector<double> pooled;
  pooled.reserve(samples.z0.size() + samples.z1.size());
  pooled.insert(pooled.end(), samples.z0.begin(), samples.z0.end());
  pooled.insert(pooled.end(), samples.z1.begin(), samples.z1.end());
  std::sort(pooled.begin(), pooled.end());
  pooled.erase(std::unique(pooled.begin(), pooled.end()), pooled.end());

  std::vector<double> thresholds;
  if (pooled.size() <= 512) {
    thresholds = pooled;
  } else {
    thresholds.reserve(512);
    for (int k = 0; k < 512; ++k) {
      const size_t idx = static_cast<size_t>(
          (pooled.size() - 1) * (static_cast<double>(k) / 511.0));
      thresholds.push_back(pooled[idx]);
    }
    thresholds.erase(std::unique(thresholds.begin(), thresholds.end()), thresholds.end());
  }

  std::vector<double> z0 = samples.z0, z1 = samples.z1;
  std::sort(z0.begin(), z0.end());
  std::sort(z1.begin(), z1.end());
  const double n0 = static_cast<double>(z0.size()), n1 = static_cast<double>(z1.size());
  const auto frac_gt = [](const std::vector<double>& v, double xi) {
    return static_cast<double>(v.end() - std::upper_bound(v.begin(), v.end(), xi));
  };
  const auto frac_lt = [](const std::vector<double>& v, double xi) {
    return static_cast<double>(std::lower_bound(v.begin(), v.end(), xi) - v.begin());
  };

  EmpiricalRoc roc;
  double best_gap = kInf;
  for (const double xi : thresholds) {
    RocPoint pt;
    pt.threshold = xi;
    if (mode == TestMode::supervised) {
      pt.far = frac_gt(z0, xi) / n0;        // Z0 > xi raises a false alarm
      pt.mdr = (n1 - frac_gt(z1, xi)) / n1; // Z1 <= xi is a miss
    } else {
      pt.far = frac_lt(z0, xi) / n0;        // small Z flags the anomaly
      pt.mdr = (n1 - frac_lt(z1, xi)) / n1;
    }
    roc.points.push_back(pt);
    const double gap = std::abs(pt.far - pt.mdr);
    if (gap < best_gap) {
      best_gap = gap;
      roc.eer = 0.5 * (pt.far + pt.mdr);
      roc.eer_threshold = xi;
    }
  }
  std::sort(roc.points.begin(), roc.points.end(), [](const RocPoint& a, const RocPoint& b) {
    return a.far < b.far || (a.far == b.far && a.mdr > b.mdr);
  });
  return roc;
}

DecisionErrors empirical_decision_errors(const TestSpec& spec, long W, int n_paths, uint64_t seed,
                                         int threads, double xi0) {
  DecisionErrors result;
  result.n = n_paths;
  const DtmcSampler s0(spec.P0, spec.pi0), s1(spec.P1, spec.pi1);
  const int n = spec.n_states();
  for (int hyp = 0; hyp < 2; ++hyp) {
    const DtmcSampler& sampler = hyp == 0 ? s0 : s1;
    std::vector<char> wrong(n_paths, 0);
    parallel_for(n_paths, threads, [&](int p) {
      Xoshiro256 rng(seed, path_stream(hyp, p));
      const std::vector<int> path = sampler.simulate(W, rng);
      const TransitionCounts counts = count_transitions(path, n);
      const Decision d = llr_decide(counts, spec, xi0);
      wrong[p] = d.h1 != (hyp == 1) ? 1 : 0;
    });
    double errors = 0;
    for (char w : wrong) errors += w;
    (hyp == 0 ? result.error0 : result.error1) = errors / n_paths;
  }
  return result;
}

std::string to_string(ObservationModel m) {
  switch (m) {
    case ObservationModel::full: return "full";
    case ObservationModel::intermediate: return "intermediate";
    case ObservationModel::simplified: return "simplified";
  }
  return "?";
}

ObservationModel observation_model_from_string(const std::string& s) {
  if (s == "full") return ObservationModel::full;
  if (s == "intermediate") return ObservationModel::intermediate;
  if (s == "simplified") return ObservationModel::simplified;
  throw ValidationError("model must be full|intermediate|simplified, got '" + s + "'");
}

namespace {

TestSpec aggregated_spec(const ChainModel& c0, const ChainModel& c1,
                         const StatePartition& partition) {
  const AggregatedChain a0 = ideal_aggregate(c0, partition);
  const AggregatedChain a1 = ideal_aggregate(c1, partition);
  const UniformizedPair pair = uniformize_aggregated_pair(a0, a1);
  return make_spec_from_matrices(TestMode::supervised, pair.P0, pair.P1, a0.pi, a1.pi, pair.u);
}

}  // namespace

std::vector<AggregatedExperimentResult> aggregated_experiments(
    const ChainModel& c0, const ChainModel& c1, const std::vector<ObservationModel>& models,
    long W, int n_paths, uint64_t seed, int threads) {
  const TestSpec full_spec = make_supervised_spec(c0, c1);

  struct ModelContext {
    ObservationModel model;
    StatePartition partition;
    TestSpec spec;
  };
  std::vector<ModelContext> ctx;
  for (const ObservationModel model : models) {
    StatePartition partition;
    switch (model) {
      case ObservationModel::full: partition = identity_partition(c0.space); break;
      case ObservationModel::intermediate: partition = intermediate_partition(c0.space); break;
      case ObservationModel::simplified: partition = simplified_partition(c0.space); break;
    }
    ctx.push_back({model, partition, aggregated_spec(c0, c1, partition)});
  }

  // One set of full-model sample paths, observed through each partition.
  const DtmcSampler s0(full_spec.P0, full_spec.pi0), s1(full_spec.P1, full_spec.pi1);
  std::vector<ZSamples> samples(ctx.size());
  for (auto& s : samples) {
    s.z0.resize(n_paths);
    s.z1.resize(n_paths);
  }
  for (int hyp = 0; hyp < 2; ++hyp) {
    const DtmcSampler& sampler = hyp == 0 ? s0 : s1;
    parallel_for(n_paths, threads, [&](int p) {
      Xoshiro256 rng(seed, path_stream(hyp, p));
      const std::vector<int> path = sampler.simulate(W, rng);
      for (size_t c = 0; c < ctx.size(); ++c) {
        const std::vector<int> mapped = map_path(path, ctx[c].partition);
        std::vector<double>& z = hyp == 0 ? samples[c].z0 : samples[c].z1;
        z[p] = z_of_mapped_path(mapped, ctx[c].spec.l, W);
      }
    });
  }

  std::vector<AggregatedExperimentResult> results;
  for (size_t c = 0; c < ctx.size(); ++c) {
    AggregatedExperimentResult r;
    r.model = ctx[c].model;
    r.u_full = full_spec.u;
    r.u_aggregated = ctx[c].spec.u;
    r.roc = empirical_roc(samples[c], TestMode::supervised);
    const StatisticMoments m = statistic_moments(ctx[c].spec, W);
    r.analytic_eer = equal_error_rate(m, TestMode::supervised).eer;
    results.push_back(std::move(r));
  }
  return results;
}

AggregatedExperimentResult aggregated_experiment(const ChainModel& c0, const ChainModel& c1,
                                                 ObservationModel model, long W, int n_paths,
                                                 uint64_t seed, int threads) {
  return aggregated_experiments(c0, c1, {model}, W, n_paths, seed, threads).front();
}

void pareto_frontier(std::vector<ParetoPoint>& points) {
  if (points.empty()) return;
  double eta_lo = kInf, eta_hi = -kInf, eer_lo = kInf, eer_hi = -kInf;
  for (const auto& p : points) {
    eta_lo = std::min(eta_lo, p.eta);
    eta_hi = std::max(eta_hi, p.eta);
    eer_lo = std::min(eer_lo, p.eer);
    eer_hi = std::max(eer_hi, p.eer);
  }
  const double eta_span = eta_hi > eta_lo ? eta_hi - eta_lo : 1.0;
  const double eer_span = eer_hi > eer_lo ? eer_hi - eer_lo : 1.0;

  // Non-dominated under (maximize eta, maximize EER).
  std::vector<int> order(points.size());
  for (size_t i = 0; i < points.size(); ++i) order[i] = static_cast<int>(i);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    return points[a].eta > points[b].eta ||
           (points[a].eta == points[b].eta && points[a].eer > points[b].eer);
  });
  double best_eer = -kInf;
  std::vector<std::pair<double, double>> frontier; // normalized (eta, eer)
  for (int idx : order) {
    auto& p = points[idx];
    if (p.eer > best_eer) {
      p.on_frontier = true;
      best_eer = p.eer;
      frontier.emplace_back((p.eta - eta_lo) / eta_span, (p.eer - eer_lo) / eer_span);
    } else {
      p.on_frontier = false;
    }
  }
  std::sort(frontier.begin(), frontier.end());

  const auto segment_distance = [](double px, double py, std::pair<double, double> a,
                                   std::pair<double, double> b) {
    const double vx = b.first - a.first, vy = b.second - a.second;
    const double wx = px - a.first, wy = py - a.second;
    const double vv = vx * vx + vy * vy;
    const double t = vv > 0 ? std::clamp((wx * vx + wy * vy) / vv, 0.0, 1.0) : 0.0;
    const double dx = px - (a.first + t * vx), dy = py - (a.second + t * vy);
    return std::hypot(dx, dy);
  };
  for (auto& p : points) {
    if (p.on_frontier) {
      p.distance = 0;
      continue;
    }
    const double px = (p.eta - eta_lo) / eta_span, py = (p.eer - eer_lo) / eer_span;
    double best = kInf;
    if (frontier.size() == 1)
      best = std::hypot(px - frontier[0].first, py - frontier[0].second);
    for (size_t s = 0; s + 1 < frontier.size(); ++s)
      best = std::min(best, segment_distance(px, py, frontier[s], frontier[s + 1]));
    p.distance = best;
  }
}

OracleReport run_oracles(const IdleTable& idle, double lambda, double gamma,
                         const OracleConfig& cfg) {
  OracleReport report;
  const auto push = [&](const std::string& name, double value, double reference,
                        double tolerance) {
    OracleEntry e;
    e.name = name;
    e.value = value;
    e.reference = reference;
    e.tolerance = tolerance;
    e.pass = std::abs(value - reference) <= tolerance;
    report.entries.push_back(e);
    report.all_pass = report.all_pass && e.pass;
  };

  // Closed-form idle probability vs direct sampling of the weighted
  // exponential sum, on randomized topologies including repeated distances.
  {
    Xoshiro256 topo_rng(cfg.seed, 0xC0FFEE);
    for (int case_idx = 0; case_idx < cfg.channel_cases; ++case_idx) {
      NetworkTopology topo = idle.topology();
      topo.fading = Fading::rayleigh;
      const int m = 4 + static_cast<int>(topo_rng.next_u64() % 3);
      topo.m = m;
      topo.positions.clear();
      const bool force_repeats = case_idx % 3 == 0;
      for (int k = 0; k < m; ++k) {
        if (force_repeats && k >= 2 && k % 2 == 0) {
          // mirror an earlier station across the sensing station at origin
          const auto& src = topo.positions[k - 1];
          topo.positions.push_back({-src[0], -src[1]});
        } else {
          topo.positions.push_back(
              {20.0 + 80.0 * topo_rng.uniform(), -50.0 + 100.0 * topo_rng.uniform()});
        }
      }
      const int sensing = 0;
      StateMask active = 0;
      for (int k = 1; k < m; ++k)
        if (topo_rng.uniform() < 0.7) active |= 1u << k;
      if (active == 0) active = 2;
      // the sensing station sits at the origin for the mirror construction
      topo.positions[0] = {0.0, 0.0};
      const double closed = idle_probability(sensing, active, topo);

      const DistanceGrouping grouping = group_distances(sensing, active, topo);
      Xoshiro256 mc_rng(cfg.seed, 0xE0 + case_idx);
      long hits = 0;
      const double threshold = topo.theta - topo.N_0;
      for (long s = 0; s < cfg.channel_draws; ++s) {
        double acc = 0;
        for (const auto& g : grouping.groups)
          for (int rep = 0; rep < g.multiplicity; ++rep) acc += g.weight * mc_rng.exponential();
        if (acc <= threshold) ++hits;
      }
      const double mc = static_cast<double>(hits) / static_cast<double>(cfg.channel_draws);
      const double p_clamped = std::clamp(mc, 1.0 / cfg.channel_draws, 1.0 - 1.0 / cfg.channel_draws);
      const double stderr_mc =
          std::sqrt(p_clamped * (1.0 - p_clamped) / static_cast<double>(cfg.channel_draws));
      push("channel_cdf_vs_mc_case" + std::to_string(case_idx), closed, mc, 3.0 * stderr_mc);
    }
  }

  // Analytic moments of Z vs Monte Carlo over sample paths.
  {
    const ChainModel c0 = build_compliant(idle, lambda, gamma);
    const ChainModel c1 = build_rrj(idle, lambda, gamma, 0.8, 0.2);
    const TestSpec spec = make_supervised_spec(c0, c1);
    const StatisticMoments m = statistic_moments(spec, cfg.moment_W);
    const ZSamples zs =
        sample_statistics(spec, cfg.moment_W, cfg.moment_paths, cfg.seed, cfg.threads);
    for (int hyp = 0; hyp < 2; ++hyp) {
      const std::vector<double>& z = hyp == 0 ? zs.z0 : zs.z1;
      const double mean_ref = hyp == 0 ? m.mean0 : m.mean1;
      const double var_ref = hyp == 0 ? m.var0 : m.var1;
      double mean = 0;
      for (double v : z) mean += v;
      mean /= z.size();
      double var = 0;
      for (double v : z) var += (v - mean) * (v - mean);
      var /= (z.size() - 1);
      const double mean_stderr = std::sqrt(var / z.size());
      push("z_mean_mc_vs_analytic_h" + std::to_string(hyp), mean, mean_ref, 3.0 * mean_stderr);
      push("z_var_mc_vs_analytic_h" + std::to_string(hyp), var, var_ref, 0.10 * var_ref);
    }
  }

  // Spectral k-step probabilities vs direct matrix powers.
  {
    const ChainModel c0 = build_compliant(idle, lambda, gamma);
    const SpectralData s = spectral_decompose(c0.P);
    if (s.simple) {
      for (const long t : {1L, 5L, 50L}) {
        Eigen::MatrixXd power = Eigen::MatrixXd::Identity(c0.space.size, c0.space.size);
        for (long k = 0; k < t; ++k) power = power * c0.P;
        double max_diff = 0;
        for (int j = 0; j < c0.space.size; ++j)
          for (int i = 0; i < c0.space.size; ++i)
            max_diff = std::max(max_diff, std::abs(s.k_step_probability(j, i, t) - power(j, i)));
        push("spectral_kstep_t" + std::to_string(t), max_diff, 0.0, 1e-8);
      }
    }
  }

  // Strategy solver vs dense feasible-region grid search.
  {
    JammerDesign design;
    design.expansion = {0.5, 0.5};
    design.order = 1;
    const StrategyProblem probe(design, idle, lambda, gamma);
    const double eta_max = std::max({probe.eta_ts_at(1, 1), probe.eta_ts_at(1, 0),
                                     probe.eta_ts_at(0, 1), probe.eta_ts_at(0, 0)});
    design.tau_eta = 1.0 + 0.6 * (eta_max - 1.0);
    const StrategyResult solved = optimize_strategy(design, idle, lambda, gamma);

    const StrategyProblem prob(design, idle, lambda, gamma);
    const StrategyGridSearch grid(prob, cfg.grid_step);
    const StrategyGridSearch::Result best = grid.argmin_for(design.tau_eta);
    const double tol = 2.0 * cfg.grid_step; // 0.01 at the default 0.005 step
    push("optimizer_grid_pR", solved.p_R, best.p_R, tol);
    push("optimizer_grid_pJ", solved.p_J, best.p_J, tol);
  }

  return report;
}

nlohmann::json oracle_report_to_json(const OracleReport& report) {
  nlohmann::json j;
  j["all_pass"] = report.all_pass;
  auto entries = nlohmann::json::array();
  for (const auto& e : report.entries) {
    entries.push_back({{"name", e.name},
                       {"value", e.value},
                       {"reference", e.reference},
                       {"tolerance", e.tolerance},
                       {"pass", e.pass}});
  }
  j["checks"] = entries;
  return j;
}

}  // namespace rrjam
