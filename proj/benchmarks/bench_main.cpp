#include <benchmark/benchmark.h>

#include <memory>

#include "abakit/aba_from_llsc.hpp"
#include "abakit/aba_register.hpp"
#include "abakit/llsc.hpp"
#include "abakit/sim_scheduler.hpp"
#include "abakit/spec_models.hpp"

using namespace abakit;

namespace {

// Uncontended native operation cost, one process.
void BM_NativeAbaWriteRead(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  NativeMemory mem(n);
  AbaRegister<NativeMemory> reg(mem, n, 16);
  std::uint64_t x = 0;
  for (auto _ : state) {
    run_operation(reg, mem, 0, dwrite(x++ & 0xffff));
    benchmark::DoNotOptimize(run_operation(reg, mem, 0, dread()));
  }
  state.SetItemsProcessed(2 * state.iterations());
}
BENCHMARK(BM_NativeAbaWriteRead)->Arg(2)->Arg(8)->Arg(32);

void BM_NativeLlscPair(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  NativeMemory mem(n);
  Llsc<NativeMemory> obj(mem, n, 16, 0);
  std::uint64_t x = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(obj.load_linked(mem, 0));
    benchmark::DoNotOptimize(obj.store_conditional(mem, 0, x++ & 0xffff));
  }
  state.SetItemsProcessed(2 * state.iterations());
}
BENCHMARK(BM_NativeLlscPair)->Arg(2)->Arg(8)->Arg(32);

// Contended: thread i acts as process i on a shared object.
std::unique_ptr<NativeMemory> g_mem;
std::unique_ptr<Llsc<NativeMemory>> g_llsc;

void BM_NativeLlscContended(benchmark::State& state) {
  if (state.thread_index() == 0) {
    g_mem = std::make_unique<NativeMemory>(state.threads());
    g_llsc = std::make_unique<Llsc<NativeMemory>>(*g_mem, state.threads(), 16, 0);
  }
  const auto p = static_cast<ProcessId>(state.thread_index());
  std::uint64_t ok = 0;
  for (auto _ : state) {
    const std::uint64_t v = g_llsc->load_linked(*g_mem, p);
    ok += g_llsc->store_conditional(*g_mem, p, (v + 1) & 0xffff);
  }
  state.counters["sc_success"] = benchmark::Counter(static_cast<double>(ok), benchmark::Counter::kAvgThreads);
  state.SetItemsProcessed(2 * state.iterations());
}
BENCHMARK(BM_NativeLlscContended)->ThreadRange(1, 4)->UseRealTime();

// Explorer throughput: schedules per second for a fixed workload.
void BM_ExploreAbaRegister(benchmark::State& state) {
  const auto root = make_execution<AbaRegister<SimMemory>>(
      2, parse_workload("W1;W2|R;R"), 4u);
  const auto check = make_check(AbaSpec(2));
  std::uint64_t schedules = 0;
  for (auto _ : state) schedules += explore_exhaustive(root, check).schedules_run;
  state.counters["schedules/s"] = benchmark::Counter(static_cast<double>(schedules), benchmark::Counter::kIsRate);
}
BENCHMARK(BM_ExploreAbaRegister)->Unit(benchmark::kMillisecond);

void BM_ExploreLlsc(benchmark::State& state) {
  const auto root = make_execution<Llsc<SimMemory>>(2, parse_workload("L;S1;V|S2;L;S3"), 4u, 0u);
  const auto check = make_check(LlscSpec(2, 0));
  std::uint64_t schedules = 0;
  for (auto _ : state) schedules += explore_exhaustive(root, check).schedules_run;
  state.counters["schedules/s"] = benchmark::Counter(static_cast<double>(schedules), benchmark::Counter::kIsRate);
}
BENCHMARK(BM_ExploreLlsc)->Unit(benchmark::kMillisecond);

// Checker cost on histories of growing size from random schedules of the
// layered register; the verdict cache is bypassed by calling the checker
// directly.
void BM_CheckerLayered(benchmark::State& state) {
  const auto ops = static_cast<std::size_t>(state.range(0));
  Workload w(3);
  for (std::size_t i = 0; i < ops; ++i) w[i % 3].push_back(i % 2 ? dread() : dwrite(i % 8));
  const auto root = make_execution<AbaFromLlsc<SimMemory>>(3, w, 3u);
  std::vector<History> histories;
  explore_random<AbaFromLlsc<SimMemory>>(root, [](const History&) { return Verdict{true, {}, {}}; }, 5, 64,
                                         {}, [&](const auto& e) { histories.push_back(e.history()); });
  const LinearizabilityChecker checker{AbaSpec(3)};
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(checker.check(histories[i++ % histories.size()]).linearizable);
  }
}
BENCHMARK(BM_CheckerLayered)->Arg(6)->Arg(12)->Arg(18)->Arg(24);

}  // namespace

BENCHMARK_MAIN();
