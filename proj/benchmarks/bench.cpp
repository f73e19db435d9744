#include <benchmark/benchmark.h>

#include "beepsim/bfw.hpp"
#include "beepsim/engine.hpp"
#include "beepsim/flowcheck.hpp"
#include "beepsim/markov.hpp"

using namespace beepsim;

static void BM_StepPath(benchmark::State& state) {
  const auto g = generate("path:" + std::to_string(state.range(0)));
  const auto proto = bfw_protocol({});
  Rng rng(7);
  Configuration cfg = initial_configuration(g, proto);
  for (auto _ : state) {
    cfg = step(g, proto, cfg, rng);
    benchmark::DoNotOptimize(cfg.state.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_StepPath)->Arg(64)->Arg(1024);

static void BM_StepClique(benchmark::State& state) {
  const auto g = generate("clique:" + std::to_string(state.range(0)));
  const auto proto = bfw_protocol({});
  Rng rng(7);
  Configuration cfg = initial_configuration(g, proto);
  for (auto _ : state) {
    cfg = step(g, proto, cfg, rng);
    benchmark::DoNotOptimize(cfg.state.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_StepClique)->Arg(64)->Arg(256);

static void BM_RunToConvergence(benchmark::State& state) {
  const auto g = generate("path:" + std::to_string(state.range(0)));
  const auto proto = bfw_protocol({});
  TraceOptions opts;
  opts.record_snapshots = false;
  opts.record_beeps = false;
  std::uint64_t seed = 0;
  for (auto _ : state) {
    const auto trace = run(g, proto, ++seed, 1 << 22, StopRule::single_leader, opts);
    benchmark::DoNotOptimize(trace.rounds_executed);
  }
}
BENCHMARK(BM_RunToConvergence)->Arg(16)->Arg(32);

static void BM_ChainVisits(benchmark::State& state) {
  for (auto _ : state) {
    const auto stats = simulate_chain({0.5}, state.range(0), 11, 1, ChainStart::waiting, 1);
    benchmark::DoNotOptimize(stats.mean_visits[1]);
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_ChainVisits)->Arg(10000)->Arg(100000);

static void BM_AuditOhmFullPath(benchmark::State& state) {
  const auto g = generate("path:32");
  const auto proto = bfw_protocol({});
  const auto trace = run(g, proto, 3, 500, StopRule::fixed_rounds, {});
  std::vector<int> vertices(32);
  for (int i = 0; i < 32; ++i) vertices[i] = i;
  const auto path = OrientedPath::of(vertices, g);
  for (auto _ : state) {
    const auto report = audit_ohm(g, trace, path);
    benchmark::DoNotOptimize(report.clean());
  }
}
BENCHMARK(BM_AuditOhmFullPath);

BENCHMARK_MAIN();
