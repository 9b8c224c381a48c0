#include "safeadapt/batch.hpp"

#include <benchmark/benchmark.h>

using namespace safeadapt;

namespace {

std::vector<RunSpec> seeded_specs(int n) {
  Scenario s = default_p2();
  s.horizon = 5.0;
  std::vector<RunSpec> specs;
  for (int i = 0; i < n; ++i) specs.push_back({s, Method::Ebsf, true, static_cast<std::uint64_t>(i)});
  return specs;
}

void BM_BatchSerial(benchmark::State& state) {
  const auto specs = seeded_specs(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(run_batch_serial(specs));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_BatchParallel(benchmark::State& state) {
  const auto specs = seeded_specs(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(run_batch(specs));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

}  // namespace

BENCHMARK(BM_BatchSerial)->Arg(8)->Arg(32)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_BatchParallel)->Arg(8)->Arg(32)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
