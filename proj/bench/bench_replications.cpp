// Serial reference vs OpenMP replication driver on the same scenarios.
// Results are bitwise identical; only wall time differs.

#include <benchmark/benchmark.h>

#include "coopsim/sim.hpp"

namespace {

using namespace coopsim;

ScenarioConfig collision_scenario() {
  ScenarioConfig c;
  c.channel = table1_params(8, false);
  c.strategy = Strategy::TwoRelaySimple;
  c.horizon_slots = 100'000;
  c.warmup_slots = 10'000;
  c.replications = 8;
  return c;
}

ScenarioConfig mpr_scenario() {
  ScenarioConfig c;
  c.channel = table2_topology(20, true);
  c.strategy = Strategy::TwoRelayClustered;
  c.horizon_slots = 20'000;
  c.warmup_slots = 2'000;
  c.replications = 8;
  return c;
}

template <MetricsReport (*Runner)(const ScenarioConfig&)>
void run_scenario(benchmark::State& state, const ScenarioConfig& config) {
  for (auto _ : state) benchmark::DoNotOptimize(Runner(config));
  state.counters["slots/s"] = benchmark::Counter(
      static_cast<double>(config.horizon_slots * config.replications),
      benchmark::Counter::kIsIterationInvariantRate);
  state.counters["workers"] = worker_count();
}

void BM_CollisionSerial(benchmark::State& s) { run_scenario<run_serial>(s, collision_scenario()); }
void BM_CollisionParallel(benchmark::State& s) { run_scenario<run>(s, collision_scenario()); }
void BM_MprSerial(benchmark::State& s) { run_scenario<run_serial>(s, mpr_scenario()); }
void BM_MprParallel(benchmark::State& s) { run_scenario<run>(s, mpr_scenario()); }

BENCHMARK(BM_CollisionSerial)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_CollisionParallel)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_MprSerial)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_MprParallel)->Unit(benchmark::kMillisecond)->UseRealTime();

}  // namespace

BENCHMARK_MAIN();
