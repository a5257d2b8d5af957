#include <benchmark/benchmark.h>

#include <cstddef>
#include <span>
#include <vector>

#include "ove/bootstrap.hpp"
#include "ove/bounds.hpp"
#include "ove/envs.hpp"
#include "ove/estimators.hpp"
#include "ove/rng.hpp"

namespace {

// Shared gridworld fixture; built once, the per-benchmark cost is the thing
// being measured.
struct Workload {
  ove::TabularMdp mdp = ove::gridworld();
  ove::TabularPolicy pi;
  ove::TabularPolicy beta;
  ove::Dataset data;
  std::vector<ove::TrajectoryStats> stats;

  explicit Workload(std::size_t n) {
    pi = ove::smoothed_policy(mdp, ove::kGridworldSmoothing);
    beta = ove::mix_behavior(pi, 0.5);
    data = ove::sample_dataset(mdp, beta, n, ove::SeededRng(1, 0));
    stats = ove::dataset_stats(data, pi);
  }
};

const Workload& workload() {
  static const Workload w(4096);
  return w;
}

void BM_TrajectoryStats(benchmark::State& state) {
  const Workload& w = workload();
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        ove::trajectory_stats(w.data.trajectories[i], w.pi, w.data.spec));
    i = (i + 1) % w.data.size();
  }
}
BENCHMARK(BM_TrajectoryStats)->Unit(benchmark::kMicrosecond);

void BM_DatasetStats(benchmark::State& state) {
  const Workload& w = workload();
  ove::Dataset slice;
  slice.spec = w.data.spec;
  slice.trajectories.assign(w.data.trajectories.begin(),
                            w.data.trajectories.begin() + state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(ove::dataset_stats(slice, w.pi));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_DatasetStats)->Arg(256)->Arg(1024)->Arg(4096)->Unit(benchmark::kMillisecond);

void BM_DoubleSampled(benchmark::State& state) {
  const Workload& w = workload();
  const auto n = static_cast<std::size_t>(state.range(0));
  const std::span<const ove::TrajectoryStats> rows(w.stats.data(), n);
  const ove::SplitPlan plan = ove::SplitPlan::even_odd(n);
  for (auto _ : state) benchmark::DoNotOptimize(ove::double_sampled_variance(rows, plan).raw);
}
BENCHMARK(BM_DoubleSampled)->Arg(1024)->Arg(4096)->Unit(benchmark::kMicrosecond);

void BM_VarianceReduced(benchmark::State& state) {
  const Workload& w = workload();
  const auto n = static_cast<std::size_t>(state.range(0));
  const std::span<const ove::TrajectoryStats> rows(w.stats.data(), n);
  const ove::SplitPlan plan = ove::SplitPlan::even_odd(n);
  for (auto _ : state) benchmark::DoNotOptimize(ove::variance_reduced_variance(rows, plan).raw);
}
BENCHMARK(BM_VarianceReduced)->Arg(1024)->Arg(4096)->Unit(benchmark::kMicrosecond);

void BM_HcoveInterval(benchmark::State& state) {
  const Workload& w = workload();
  ove::Dataset slice;
  slice.spec = w.data.spec;
  slice.trajectories.assign(w.data.trajectories.begin(),
                            w.data.trajectories.begin() + state.range(0));
  for (auto _ : state) {
    ove::SeededRng rng(2, 0);
    benchmark::DoNotOptimize(ove::hcove_interval(slice, w.pi, 0.05, rng));
  }
}
BENCHMARK(BM_HcoveInterval)->Arg(1024)->Arg(4096)->Unit(benchmark::kMillisecond);

void BM_BootstrapInterval(benchmark::State& state) {
  const Workload& w = workload();
  ove::Dataset slice;
  slice.spec = w.data.spec;
  slice.trajectories.assign(w.data.trajectories.begin(),
                            w.data.trajectories.begin() + 512);
  ove::BootstrapConfig cfg;
  cfg.b = static_cast<int>(state.range(0));
  cfg.seed = 3;
  for (auto _ : state)
    benchmark::DoNotOptimize(
        ove::bootstrap_interval(slice, w.pi, cfg, ove::BootstrapEstimator::variance_reduced));
}
BENCHMARK(BM_BootstrapInterval)->Arg(100)->Arg(1000)->Unit(benchmark::kMillisecond);

void BM_SampleDataset(benchmark::State& state) {
  const Workload& w = workload();
  for (auto _ : state)
    benchmark::DoNotOptimize(
        ove::sample_dataset(w.mdp, w.beta, static_cast<std::size_t>(state.range(0)),
                            ove::SeededRng(4, 0)));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_SampleDataset)->Arg(1024)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
