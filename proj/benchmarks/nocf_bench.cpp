#include <benchmark/benchmark.h>

#include <random>

#include "nocf/checker.hpp"
#include "nocf/config.hpp"
#include "nocf/policy.hpp"
#include "nocf/system.hpp"

namespace {

using namespace nocf;

void BM_TableDecide(benchmark::State& state) {
  RuleTable t(static_cast<std::size_t>(state.range(0)));
  for (int i = 0; i < state.range(0); ++i) {
    t.insert(make_rule(0x80000000u + static_cast<Address>(i) * 0x100000u, SizeCode(8), true, i % 2));
  }
  std::mt19937 rng(1);
  std::vector<Address> addrs(4096);
  for (auto& a : addrs) a = 0x80000000u + (rng() & 0x00FFFFFFu);
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(t.decide(addrs[i++ & 4095], AccessKind::Write));
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_TableDecide)->Arg(1)->Arg(2)->Arg(4);

void BM_CheckCommitBuffered(benchmark::State& state) {
  CheckConfig cfg;
  cfg.variant = FilterVariant::CommitBuffered;
  cfg.depth = static_cast<std::uint64_t>(state.range(0));
  cfg.threads = static_cast<unsigned>(state.range(1));
  std::uint64_t states = 0;
  for (auto _ : state) {
    const auto r = check(cfg);
    states = r.stats.states;
    benchmark::DoNotOptimize(r.verified());
  }
  state.counters["states"] = static_cast<double>(states);
  state.counters["states_per_s"] =
      benchmark::Counter(static_cast<double>(states) * state.iterations(), benchmark::Counter::kIsRate);
}
BENCHMARK(BM_CheckCommitBuffered)
    ->Args({8, 1})
    ->Args({16, 1})
    ->Args({16, 4})
    ->UseRealTime()
    ->Unit(benchmark::kMillisecond);

void BM_CheckVulnerable(benchmark::State& state) {
  CheckConfig cfg;
  cfg.variant = FilterVariant::Vulnerable;
  cfg.depth = 6;
  for (auto _ : state) benchmark::DoNotOptimize(check(cfg).violated());
}
BENCHMARK(BM_CheckVulnerable)->Unit(benchmark::kMillisecond);

void BM_SimulatePrototype(benchmark::State& state) {
  const Topology t =
      load_topology(load_config_file(std::string(NOCF_BENCH_CONFIG_DIR) + "/prototype.yaml"));
  const auto cycles = static_cast<std::uint64_t>(state.range(0));
  for (auto _ : state) {
    System sys(t);
    benchmark::DoNotOptimize(sys.run(cycles, [](const TraceRecord&) {}).forwards);
  }
  state.counters["cycles_per_s"] = benchmark::Counter(
      static_cast<double>(cycles) * state.iterations(), benchmark::Counter::kIsRate);
}
BENCHMARK(BM_SimulatePrototype)->Arg(10000)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
