#include "fodgmm/dgp.hpp"
#include "fodgmm/estimator.hpp"
#include "fodgmm/montecarlo.hpp"
#include "fodgmm/transform.hpp"

#include <benchmark/benchmark.h>

using namespace fodgmm;

namespace {

const SimulatedPanel& sample(Index T) {
  static const SimulatedPanel t20 = generate(catalog_design(27, 200, 20), 1);
  static const SimulatedPanel t100 = generate(catalog_design(27, 200, 100), 1);
  return T == 20 ? t20 : t100;
}

void BM_Generate(benchmark::State& state) {
  const DesignConfig cfg = catalog_design(27, 200, state.range(0));
  std::uint64_t rep = 0;
  for (auto _ : state) benchmark::DoNotOptimize(generate(cfg, 1, rep++));
}
BENCHMARK(BM_Generate)->Arg(20)->Arg(100)->Unit(benchmark::kMicrosecond);

void BM_FodTransform(benchmark::State& state) {
  const PanelDataset& p = sample(state.range(0)).panel;
  for (auto _ : state) benchmark::DoNotOptimize(fod(p.y()));
}
BENCHMARK(BM_FodTransform)->Arg(20)->Arg(100)->Unit(benchmark::kMicrosecond);

void BM_FitFodLimited(benchmark::State& state) {
  const PanelDataset& p = sample(state.range(0)).panel;
  for (auto _ : state) benchmark::DoNotOptimize(fit_fod(p, InstrumentPlan::limited()));
}
BENCHMARK(BM_FitFodLimited)->Arg(20)->Arg(100)->Unit(benchmark::kMicrosecond);

void BM_FitFdLimited(benchmark::State& state) {
  const PanelDataset& p = sample(state.range(0)).panel;
  for (auto _ : state) benchmark::DoNotOptimize(fit_fd(p, InstrumentPlan::limited()));
}
BENCHMARK(BM_FitFdLimited)->Arg(20)->Arg(100)->Unit(benchmark::kMicrosecond);

void BM_FitEfficient(benchmark::State& state) {
  const PanelDataset& p = sample(20).panel;
  for (auto _ : state) benchmark::DoNotOptimize(fit_efficient(p));
}
BENCHMARK(BM_FitEfficient)->Unit(benchmark::kMicrosecond);

void BM_FitFdAllInstruments(benchmark::State& state) {
  const PanelDataset& p = sample(20).panel;
  for (auto _ : state) benchmark::DoNotOptimize(fit_fd(p, InstrumentPlan::all_available()));
}
BENCHMARK(BM_FitFdAllInstruments)->Unit(benchmark::kMicrosecond);

void BM_MonteCarloCell(benchmark::State& state) {
  ExperimentSpec spec;
  spec.designs = {catalog_design(5, 200, 20)};
  spec.estimators = {{EstimatorTag::FOD, InstrumentPlan::limited()}};
  spec.reps = 50;
  spec.threads = 1;
  for (auto _ : state) benchmark::DoNotOptimize(run(spec));
}
BENCHMARK(BM_MonteCarloCell)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
