#include <benchmark/benchmark.h>

#include "rrjam/detector.hpp"
#include "rrjam/ldp.hpp"
#include "rrjam/simulate.hpp"
#include "rrjam/spectral.hpp"
#include "test_support.hpp"

using namespace rrjam;
using namespace rrjam::test;

namespace {

const IdleTable& hex_idle() {
  static const IdleTable idle = IdleTable::build(hexagon_r40());
  return idle;
}

void BM_IdleTableBuild(benchmark::State& state) {
  const NetworkTopology topo = hexagon_r40();
  for (auto _ : state) benchmark::DoNotOptimize(IdleTable::build(topo));
}
BENCHMARK(BM_IdleTableBuild);

void BM_BuildRrjChain(benchmark::State& state) {
  const IdleTable& idle = hex_idle();
  for (auto _ : state)
    benchmark::DoNotOptimize(build_rrj(idle, kLambda, kGamma, 0.8, 0.2));
}
BENCHMARK(BM_BuildRrjChain);

void BM_StationarySolve(benchmark::State& state) {
  const IdleTable& idle = hex_idle();
  const Eigen::MatrixXd Q = chain_generator(ChainKind::rrj, idle, kLambda, kGamma, {0.8, 0.2});
  for (auto _ : state) benchmark::DoNotOptimize(stationary_distribution(Q));
}
BENCHMARK(BM_StationarySolve);

void BM_SpectralDecompose(benchmark::State& state) {
  const IdleTable& idle = hex_idle();
  const ChainModel c = build_compliant(idle, kLambda, kGamma);
  for (auto _ : state) benchmark::DoNotOptimize(spectral_decompose(c.P));
}
BENCHMARK(BM_SpectralDecompose);

void BM_StatisticMoments(benchmark::State& state) {
  const IdleTable& idle = hex_idle();
  const ChainModel c0 = build_compliant(idle, kLambda, kGamma);
  const ChainModel c1 = build_rrj(idle, kLambda, kGamma, 0.8, 0.2);
  const TestSpec spec = make_supervised_spec(c0, c1);
  for (auto _ : state) benchmark::DoNotOptimize(statistic_moments(spec, state.range(0)));
}
BENCHMARK(BM_StatisticMoments)->Arg(1000)->Arg(4000);

void BM_SimulatePath(benchmark::State& state) {
  const IdleTable& idle = hex_idle();
  const ChainModel c = build_compliant(idle, kLambda, kGamma);
  const DtmcSampler sampler(c.P, c.pi);
  Xoshiro256 rng(1, 2);
  for (auto _ : state) benchmark::DoNotOptimize(sampler.simulate(1000, rng));
}
BENCHMARK(BM_SimulatePath);

void BM_RateFunction(benchmark::State& state) {
  const IdleTable& idle = hex_idle();
  JammerDesign design;
  design.tau_eta = 1.5;
  const StrategyProblem prob(design, idle, kLambda, kGamma);
  for (auto _ : state) benchmark::DoNotOptimize(prob.rate_at(0.7, 0.4));
}
BENCHMARK(BM_RateFunction);

void BM_GroupInverse(benchmark::State& state) {
  const IdleTable& idle = hex_idle();
  const ChainModel c = build_rrj(idle, kLambda, kGamma, 0.5, 0.5);
  for (auto _ : state) benchmark::DoNotOptimize(group_inverse(c.Q, c.pi));
}
BENCHMARK(BM_GroupInverse);

}  // namespace

BENCHMARK_MAIN();
