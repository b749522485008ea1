// Command-line front-end: loads a scenario config, drives the library, and
// writes CSV/JSON artifacts for external plotting. All state flows through
// files; a fixed seed reproduces every output byte for byte.

#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <thread>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "rrjam/chain.hpp"
#include "rrjam/errors.hpp"
#include "rrjam/io.hpp"
#include "rrjam/ldp.hpp"
#include "rrjam/scenario.hpp"
#include "rrjam/simulate.hpp"

namespace {

using namespace rrjam;

struct GlobalOptions {
  std::string config;
  std::optional<std::string> out;
  std::optional<uint64_t> seed;
  int threads = 0;
};

struct Context {
  Scenario scenario;
  std::string out_dir;
  int threads = 1;
};

Context load_context(const GlobalOptions& opt) {
  Context ctx;
  ctx.scenario = Scenario::from_file(opt.config);
  if (opt.seed) ctx.scenario.experiment.seed = *opt.seed;
  ctx.out_dir = opt.out.value_or(ctx.scenario.out_dir.value_or("."));
  std::filesystem::create_directories(ctx.out_dir);
  ctx.threads = opt.threads > 0 ? opt.threads
                                : static_cast<int>(std::thread::hardware_concurrency());
  if (ctx.threads < 1) ctx.threads = 1;
  return ctx;
}

std::string join(const std::string& dir, const std::string& name) {
  return (std::filesystem::path(dir) / name).string();
}

JammerParams jammer_point(const Scenario& s) {
  if (!s.jammer.point)
    throw ValidationError("scenario: this command needs jammer.p_R and jammer.p_J");
  return *s.jammer.point;
}

nlohmann::json moments_json(const StatisticMoments& m) {
  nlohmann::json j;
  j["W"] = m.W;
  j["mean0"] = m.mean0;
  j["mean1"] = m.mean1;
  j["var0"] = m.var0;
  j["var1"] = m.var1;
  if (m.var0_ub) j["var0_upper_bound"] = *m.var0_ub;
  if (m.var1_ub) j["var1_upper_bound"] = *m.var1_ub;
  if (m.finite_part0 || m.finite_part1) j["finite_part_only"] = true;
  return j;
}

void write_roc_csv(const std::string& path, const std::vector<RocPoint>& roc) {
  CsvWriter csv({"threshold", "FAR", "MDR"});
  for (const auto& p : roc) csv.add_row(std::vector<double>{p.threshold, p.far, p.mdr});
  csv.write_file(path);
}

int cmd_build(const Context& ctx) {
  const Scenario& s = ctx.scenario;
  const IdleTable idle = IdleTable::build(s.topology);
  const ChainModel c0 = build_compliant(idle, s.lambda, s.gamma);
  write_json_file(join(ctx.out_dir, "chain_compliant.json"), chain_to_json(c0));
  std::cout << "wrote chain_compliant.json (u=" << format_double(c0.u) << ")\n";
  if (s.jammer.point) {
    const ChainModel c1 = build_rrj(idle, s.lambda, s.gamma, s.jammer.point->p_R,
                                    s.jammer.point->p_J);
    write_json_file(join(ctx.out_dir, "chain_rrj.json"), chain_to_json(c1));
    std::cout << "wrote chain_rrj.json (u=" << format_double(c1.u) << ")\n";
  }
  if (s.jammer.p_J_naive) {
    const ChainModel cn = build_naive_rj(idle, s.lambda, s.gamma, *s.jammer.p_J_naive);
    write_json_file(join(ctx.out_dir, "chain_naive.json"), chain_to_json(cn));
    std::cout << "wrote chain_naive.json (u=" << format_double(cn.u) << ")\n";
  }
  return 0;
}

int cmd_detect(const Context& ctx) {
  const Scenario& s = ctx.scenario;
  const IdleTable idle = IdleTable::build(s.topology);
  const ChainModel c0 = build_compliant(idle, s.lambda, s.gamma);
  ChainModel c1;
  if (s.jammer.p_J_naive)
    c1 = build_naive_rj(idle, s.lambda, s.gamma, *s.jammer.p_J_naive);
  else {
    const JammerParams jp = jammer_point(s);
    c1 = build_rrj(idle, s.lambda, s.gamma, jp.p_R, jp.p_J);
  }

  nlohmann::json summary;
  std::vector<TestMode> modes;
  if (s.experiment.both_detectors)
    modes = {TestMode::supervised, TestMode::semi_supervised};
  else
    modes = {s.experiment.detector};

  for (const TestMode mode : modes) {
    const std::string tag = mode == TestMode::supervised ? "supervised" : "semi_supervised";
    const TestSpec spec = mode == TestMode::supervised ? make_supervised_spec(c0, c1)
                                                       : make_semi_supervised_spec(c0, c1);
    nlohmann::json entry;
    entry["u"] = spec.u;
    entry["singular"] = spec.singular;
    if (spec.singular) {
      entry["note"] = "singular detection - arbitrarily small error achievable";
      std::cout << tag << ": singular detection - arbitrarily small error achievable\n";
    }
    const StatisticMoments m = statistic_moments(spec, s.experiment.W);
    entry["moments"] = moments_json(m);
    if (!spec.singular) {
      const EerResult eer = equal_error_rate(m, mode);
      entry["eer"] = eer.eer;
      entry["eer_threshold"] = eer.threshold;
      const auto roc = roc_curve(m, 512, mode);
      const std::string roc_name =
          mode == TestMode::supervised ? "roc.csv" : "roc_semi_supervised.csv";
      write_roc_csv(join(ctx.out_dir, roc_name), roc);
      entry["roc_csv"] = roc_name;
      std::cout << tag << ": EER=" << format_double(eer.eer)
                << " threshold=" << format_double(eer.threshold) << "\n";
    }
    summary[tag] = entry;
  }
  write_json_file(join(ctx.out_dir, "detect_summary.json"), summary);
  return 0;
}

int cmd_simulate(const Context& ctx) {
  const Scenario& s = ctx.scenario;
  const IdleTable idle = IdleTable::build(s.topology);
  const ChainModel c0 = build_compliant(idle, s.lambda, s.gamma);
  ChainModel c1;
  if (s.jammer.p_J_naive)
    c1 = build_naive_rj(idle, s.lambda, s.gamma, *s.jammer.p_J_naive);
  else {
    const JammerParams jp = jammer_point(s);
    c1 = build_rrj(idle, s.lambda, s.gamma, jp.p_R, jp.p_J);
  }

  nlohmann::json summary;

  if (s.experiment.model != ObservationModel::full) {
    // aggregated observation: full paths mapped through the partition and
    // tested against the ideal-aggregate pair (supervised only)
    if (s.experiment.detector != TestMode::supervised || s.experiment.both_detectors)
      throw ValidationError("simulate: aggregated observation models support the supervised "
                            "detector only");
    const AggregatedExperimentResult r =
        aggregated_experiment(c0, c1, s.experiment.model, s.experiment.W, s.experiment.n_paths,
                              s.experiment.seed, ctx.threads);
    const std::string tag = to_string(r.model);
    write_roc_csv(join(ctx.out_dir, "roc_empirical.csv"), r.roc.points);
    nlohmann::json entry;
    entry["model"] = tag;
    entry["u_full"] = r.u_full;
    entry["u_aggregated"] = r.u_aggregated;
    entry["empirical_eer"] = r.roc.eer;
    entry["analytic_eer"] = r.analytic_eer;
    entry["eer_gap"] = std::abs(r.analytic_eer - r.roc.eer);
    entry["roc_csv"] = "roc_empirical.csv";
    summary["supervised"] = entry;
    summary["W"] = s.experiment.W;
    summary["n_paths"] = s.experiment.n_paths;
    write_json_file(join(ctx.out_dir, "simulate_summary.json"), summary);
    std::cout << tag << ": empirical EER=" << format_double(r.roc.eer) << "\n";
    return 0;
  }
  std::vector<TestMode> modes;
  if (s.experiment.both_detectors)
    modes = {TestMode::supervised, TestMode::semi_supervised};
  else
    modes = {s.experiment.detector};

  for (const TestMode mode : modes) {
    const std::string tag = mode == TestMode::supervised ? "supervised" : "semi_supervised";
    const TestSpec spec = mode == TestMode::supervised ? make_supervised_spec(c0, c1)
                                                       : make_semi_supervised_spec(c0, c1);
    const ZSamples zs = sample_statistics(spec, s.experiment.W, s.experiment.n_paths,
                                          s.experiment.seed, ctx.threads);
    const EmpiricalRoc roc = empirical_roc(zs, mode);
    const std::string roc_name = mode == TestMode::supervised
                                     ? "roc_empirical.csv"
                                     : "roc_empirical_semi_supervised.csv";
    write_roc_csv(join(ctx.out_dir, roc_name), roc.points);
    nlohmann::json entry;
    entry["u"] = spec.u;
    entry["singular"] = spec.singular;
    entry["empirical_eer"] = roc.eer;
    entry["empirical_eer_threshold"] = roc.eer_threshold;
    entry["roc_csv"] = roc_name;
    if (!spec.singular) {
      const StatisticMoments m = statistic_moments(spec, s.experiment.W);
      const EerResult analytic = equal_error_rate(m, mode);
      entry["analytic_eer"] = analytic.eer;
      entry["eer_gap"] = std::abs(analytic.eer - roc.eer);
    }
    summary[tag] = entry;
    std::cout << tag << ": empirical EER=" << format_double(roc.eer) << "\n";
  }
  summary["W"] = s.experiment.W;
  summary["n_paths"] = s.experiment.n_paths;
  write_json_file(join(ctx.out_dir, "simulate_summary.json"), summary);
  return 0;
}

int cmd_aggregate(const Context& ctx) {
  const Scenario& s = ctx.scenario;
  const IdleTable idle = IdleTable::build(s.topology);
  const ChainModel c0 = build_compliant(idle, s.lambda, s.gamma);
  const JammerParams jp = jammer_point(s);
  const ChainModel c1 = build_rrj(idle, s.lambda, s.gamma, jp.p_R, jp.p_J);

  const std::vector<ObservationModel> models = {
      ObservationModel::full, ObservationModel::intermediate, ObservationModel::simplified};
  const auto results = aggregated_experiments(c0, c1, models, s.experiment.W,
                                              s.experiment.n_paths, s.experiment.seed,
                                              ctx.threads);

  // exported aggregated chains carry the block-label metadata
  for (const auto& [name, partition] :
       {std::pair{"intermediate", intermediate_partition(c0.space)},
        std::pair{"simplified", simplified_partition(c0.space)}}) {
    nlohmann::json chains;
    chains["compliant"] = aggregated_to_json(ideal_aggregate(c0, partition));
    chains["rrj"] = aggregated_to_json(ideal_aggregate(c1, partition));
    write_json_file(join(ctx.out_dir, std::string("chains_") + name + ".json"), chains);
  }

  nlohmann::json summary;
  for (const auto& r : results) {
    const std::string tag = to_string(r.model);
    write_roc_csv(join(ctx.out_dir, "roc_" + tag + ".csv"), r.roc.points);
    nlohmann::json entry;
    entry["empirical_eer"] = r.roc.eer;
    entry["analytic_eer"] = r.analytic_eer;
    entry["u_full"] = r.u_full;
    entry["u_aggregated"] = r.u_aggregated; // fresh per-pair clock, not the full model's
    entry["roc_csv"] = "roc_" + tag + ".csv";
    summary[tag] = entry;
    std::cout << tag << ": empirical EER=" << format_double(r.roc.eer) << "\n";
  }
  write_json_file(join(ctx.out_dir, "aggregate_summary.json"), summary);
  return 0;
}

int cmd_optimize(const Context& ctx) {
  const Scenario& s = ctx.scenario;
  const IdleTable idle = IdleTable::build(s.topology);

  JammerDesign design;
  design.expansion = s.jammer.expansion;
  design.order = s.jammer.order;

  std::vector<double> taus;
  if (s.jammer.tau_eta_sweep) {
    taus = s.jammer.tau_eta_sweep->values();
  } else if (s.jammer.tau_eta) {
    taus = {*s.jammer.tau_eta};
  } else {
    // default sweep: from just above compliant efficiency to just below the
    // linearized maximum
    design.tau_eta = 1.0;
    const StrategyProblem probe(design, idle, s.lambda, s.gamma);
    const double eta_max = std::max({probe.eta_ts_at(1, 1), probe.eta_ts_at(1, 0),
                                     probe.eta_ts_at(0, 1), probe.eta_ts_at(0, 0)});
    GridSpec sweep{1.02, 1.0 + 0.98 * (eta_max - 1.0), 8};
    taus = sweep.values();
  }

  design.tau_eta = taus.front();
  const StrategyProblem problem(design, idle, s.lambda, s.gamma);
  const StrategyGridSearch grid(problem, 0.005);

  CsvWriter csv({"tau_eta", "p_R", "p_J", "rate", "eta_ts", "eta_true", "grid_p_R", "grid_p_J",
                 "grid_agrees"});
  bool any_infeasible = false;
  for (const double tau : taus) {
    JammerDesign d = design;
    d.tau_eta = tau;
    const StrategyResult r = optimize_strategy(d, idle, s.lambda, s.gamma);
    if (!r.feasible) {
      any_infeasible = true;
      std::cerr << "tau_eta=" << format_double(tau) << ": " << r.message << "\n";
      continue;
    }
    const StrategyGridSearch::Result g = grid.argmin_for(tau);
    const bool agrees =
        g.feasible && std::abs(g.p_R - r.p_R) <= 0.01 && std::abs(g.p_J - r.p_J) <= 0.01;
    csv.add_row({format_double(tau), format_double(r.p_R), format_double(r.p_J),
                 format_double(r.rate), format_double(r.eta_ts),
                 format_double(r.eta_true.value_or(-1.0)), format_double(g.p_R),
                 format_double(g.p_J), agrees ? "1" : "0"});
    std::cout << "tau_eta=" << format_double(tau) << " -> p_R*=" << format_double(r.p_R)
              << " p_J*=" << format_double(r.p_J) << " I*=" << format_double(r.rate) << "\n";
  }
  csv.write_file(join(ctx.out_dir, "strategy.csv"));
  if (any_infeasible)
    throw ValidationError("optimize: requested tau_eta exceeds the linearized efficiency "
                          "attainable on [0,1]^2");
  return 0;
}

int cmd_pareto(const Context& ctx) {
  const Scenario& s = ctx.scenario;
  const IdleTable idle = IdleTable::build(s.topology);
  const ChainModel c0 = build_compliant(idle, s.lambda, s.gamma);

  const GridSpec grid_R = s.jammer.grid_R.value_or(GridSpec{0.05, 1.0, 20});
  const GridSpec grid_J = s.jammer.grid_J.value_or(GridSpec{0.0, 1.0, 21});

  const StatePartition inter = intermediate_partition(c0.space);
  const StatePartition simpl = simplified_partition(c0.space);

  std::vector<ParetoPoint> full_points, inter_points, simpl_points;
  for (const double pR : grid_R.values()) {
    for (const double pJ : grid_J.values()) {
      if (pR == 0.0 && pJ == 0.0) continue; // SUT never transmits: chain degenerates
      const ChainModel c1 = build_rrj(idle, s.lambda, s.gamma, pR, pJ);
      const EfficiencyReport eff = jamming_efficiency(c0.pi, c1.pi, c0.space);
      if (!eff.eta) continue;

      const TestSpec full_spec = make_supervised_spec(c0, c1);
      const double full_eer =
          equal_error_rate(statistic_moments(full_spec, s.experiment.W), TestMode::supervised)
              .eer;
      full_points.push_back({pR, pJ, *eff.eta, full_eer, "full", false, 0});

      const AggregatedChain ai0 = ideal_aggregate(c0, inter);
      const AggregatedChain ai1 = ideal_aggregate(c1, inter);
      const UniformizedPair pi_pair = uniformize_aggregated_pair(ai0, ai1);
      const TestSpec inter_spec = make_spec_from_matrices(
          TestMode::supervised, pi_pair.P0, pi_pair.P1, ai0.pi, ai1.pi, pi_pair.u);
      const double inter_eer =
          equal_error_rate(statistic_moments(inter_spec, s.experiment.W), TestMode::supervised)
              .eer;
      inter_points.push_back({pR, pJ, *eff.eta, inter_eer, "intermediate", false, 0});

      const AggregatedChain as0 = ideal_aggregate(c0, simpl);
      const AggregatedChain as1 = ideal_aggregate(c1, simpl);
      const UniformizedPair ps_pair = uniformize_aggregated_pair(as0, as1);
      const TestSpec simpl_spec = make_spec_from_matrices(
          TestMode::supervised, ps_pair.P0, ps_pair.P1, as0.pi, as1.pi, ps_pair.u);
      const double simpl_eer =
          equal_error_rate(statistic_moments(simpl_spec, s.experiment.W), TestMode::supervised)
              .eer;
      simpl_points.push_back({pR, pJ, *eff.eta, simpl_eer, "simplified", false, 0});
    }
  }
  pareto_frontier(full_points);
  pareto_frontier(inter_points);
  pareto_frontier(simpl_points);

  CsvWriter csv({"p_R", "p_J", "eta", "eer", "model", "on_frontier", "distance"});
  const auto emit = [&](const std::vector<ParetoPoint>& pts) {
    for (const auto& p : pts)
      csv.add_row({format_double(p.p_R), format_double(p.p_J), format_double(p.eta),
                   format_double(p.eer), p.model, p.on_frontier ? "1" : "0",
                   format_double(p.distance)});
  };
  emit(full_points);
  emit(inter_points);
  emit(simpl_points);
  csv.write_file(join(ctx.out_dir, "pareto.csv"));
  std::cout << "wrote pareto.csv (" << full_points.size() << " grid points per model)\n";
  return 0;
}

int cmd_oracles(const Context& ctx) {
  const Scenario& s = ctx.scenario;
  const IdleTable idle = IdleTable::build(s.topology);
  OracleConfig cfg;
  cfg.seed = s.experiment.seed;
  cfg.threads = ctx.threads;
  const OracleReport report = run_oracles(idle, s.lambda, s.gamma, cfg);
  write_json_file(join(ctx.out_dir, "oracle_report.json"), oracle_report_to_json(report));
  for (const auto& e : report.entries) {
    if (!e.pass)
      std::cerr << "FAIL " << e.name << ": value=" << format_double(e.value)
                << " reference=" << format_double(e.reference)
                << " tolerance=" << format_double(e.tolerance) << "\n";
  }
  std::cout << (report.all_pass ? "all oracles passed" : "oracle failures detected") << "\n";
  if (!report.all_pass) throw OracleError("oracle cross-checks failed; see oracle_report.json");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Markov-chain modeling and likelihood-ratio detection of random reactive "
               "jammers in CSMA networks with hidden terminals"};
  app.require_subcommand(1);

  GlobalOptions opt;
  app.add_option("--config", opt.config, "scenario JSON file")->required();
  std::string out_dir;
  auto* out_opt = app.add_option("--out", out_dir, "output directory (overrides scenario)");
  uint64_t seed = 0;
  auto* seed_opt = app.add_option("--seed", seed, "RNG seed (overrides scenario)");
  app.add_option("--threads", opt.threads, "worker threads for simulation (0 = auto)");
  app.fallthrough();

  auto* c_build = app.add_subcommand("build", "build chains and export them as JSON");
  auto* c_detect = app.add_subcommand("detect", "analytic moments, EER and ROC");
  auto* c_simulate = app.add_subcommand("simulate", "Monte Carlo ROC/EER");
  auto* c_optimize = app.add_subcommand("optimize", "solve the jammer strategy problem");
  auto* c_aggregate = app.add_subcommand("aggregate", "detection under aggregated observation");
  auto* c_pareto = app.add_subcommand("pareto", "efficiency/EER Pareto frontier over a grid");
  auto* c_oracles = app.add_subcommand("oracles", "run independent cross-check oracles");

  CLI11_PARSE(app, argc, argv);
  if (*out_opt) opt.out = out_dir;
  if (*seed_opt) opt.seed = seed;

  try {
    const Context ctx = load_context(opt);
    if (c_build->parsed()) return cmd_build(ctx);
    if (c_detect->parsed()) return cmd_detect(ctx);
    if (c_simulate->parsed()) return cmd_simulate(ctx);
    if (c_optimize->parsed()) return cmd_optimize(ctx);
    if (c_aggregate->parsed()) return cmd_aggregate(ctx);
    if (c_pareto->parsed()) return cmd_pareto(ctx);
    if (c_oracles->parsed()) return cmd_oracles(ctx);
  } catch (const ValidationError& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return 1;
  } catch (const NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return 2;
  } catch (const OracleError& e) {
    std::cerr << "oracle failure: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
