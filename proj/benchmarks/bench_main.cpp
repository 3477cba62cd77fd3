#include <benchmark/benchmark.h>

#include <random>

#include "monolab/bell.hpp"
#include "monolab/monogamy.hpp"
#include "monolab/polylp.hpp"
#include "monolab/quantum.hpp"

using namespace monolab;

static void BM_NsMinimum(benchmark::State& state) {
  const auto f = recursive_bkp(2, static_cast<int>(state.range(0)), static_cast<int>(state.range(1)));
  const auto objective = f.dense();
  for (auto _ : state) {
    benchmark::DoNotOptimize(optimize_over_ns(f.scenario(), objective, Sense::kMinimize));
  }
}
BENCHMARK(BM_NsMinimum)->Args({2, 2})->Args({3, 3})->Unit(benchmark::kMillisecond);

static void BM_ClassicalMinimum(benchmark::State& state) {
  const auto f = recursive_bkp(static_cast<int>(state.range(0)), 2, 2);
  for (auto _ : state) benchmark::DoNotOptimize(classical_minimum(f));
}
BENCHMARK(BM_ClassicalMinimum)->Arg(2)->Arg(3)->Arg(4)->Unit(benchmark::kMillisecond);

static void BM_Tightness(benchmark::State& state) {
  const Scenario sc(3, 2, 2);
  const std::vector<Rational> grid{Rational(1, 2)};
  for (auto _ : state) benchmark::DoNotOptimize(tightness_scan(sc, 0, 0, 0, grid));
}
BENCHMARK(BM_Tightness)->Unit(benchmark::kMillisecond);

static void BM_QuantumViolation(benchmark::State& state) {
  for (auto _ : state) {
    benchmark::DoNotOptimize(chained_quantum_violation(static_cast<int>(state.range(0)), static_cast<int>(state.range(1))));
  }
}
BENCHMARK(BM_QuantumViolation)->Args({2, 2})->Args({8, 2})->Args({4, 3})->Unit(benchmark::kMillisecond);

static void BM_Theorem4Check(benchmark::State& state) {
  std::mt19937_64 rng(5);
  const auto psi = random_real_state(3, rng);
  for (auto _ : state) benchmark::DoNotOptimize(check_theorem4(psi, 1.5));
}
BENCHMARK(BM_Theorem4Check)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
