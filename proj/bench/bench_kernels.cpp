// Parallel Kloosterman progression against the serial reference, and the
// harmonic average built on top of it.

#include <benchmark/benchmark.h>

#include "nldlab/kloosterman.hpp"
#include "nldlab/parallel.hpp"
#include "nldlab/petersson.hpp"

namespace {

const std::vector<nldlab::KloostermanPair> kPairs{{1, 1}, {1, 2}, {2, 3}};

void BM_ProgressionParallel(benchmark::State& state) {
  nldlab::set_worker_count(static_cast<int>(state.range(1)));
  for (auto _ : state) {
    auto t = nldlab::kloosterman_progression(kPairs, 1, static_cast<std::uint64_t>(state.range(0)));
    benchmark::DoNotOptimize(t.values.data());
  }
}
BENCHMARK(BM_ProgressionParallel)->ArgsProduct({{1000, 4000}, {1, 2, 4}})->Unit(benchmark::kMillisecond);

void BM_ProgressionReference(benchmark::State& state) {
  for (auto _ : state) {
    auto t = nldlab::kloosterman_progression_reference(kPairs, 1, static_cast<std::uint64_t>(state.range(0)));
    benchmark::DoNotOptimize(t.values.data());
  }
}
BENCHMARK(BM_ProgressionReference)->Arg(1000)->Arg(4000)->Unit(benchmark::kMillisecond);

void BM_HarmonicAverage(benchmark::State& state) {
  const auto table = nldlab::kloosterman_progression(kPairs, 1, 20000);
  for (auto _ : state) {
    auto h = nldlab::harmonic_averages(static_cast<int>(state.range(0)), table);
    benchmark::DoNotOptimize(h.data());
  }
}
BENCHMARK(BM_HarmonicAverage)->Arg(4)->Arg(14)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
