#include <benchmark/benchmark.h>

#include "tiltcut/barriers.hpp"
#include "tiltcut/dynamics.hpp"
#include "tiltcut/generators.hpp"
#include "tiltcut/state_space.hpp"

using namespace tiltcut;

static void BM_TiltedCutwidth(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const Network g = random_regular(n, 3, 1).with_uniform_field(0.3);
  for (auto _ : state) benchmark::DoNotOptimize(tilted_cutwidth(g).value);
  state.SetComplexityN(n);
}
BENCHMARK(BM_TiltedCutwidth)->DenseRange(10, 20, 2)->Unit(benchmark::kMillisecond);

static void BM_GammaStar(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const Network g = random_regular(n, 3, 2).with_uniform_field(0.1);
  for (auto _ : state) {
    benchmark::DoNotOptimize(gamma_star(g, {.with_general_barrier = false}).gamma_star);
  }
}
BENCHMARK(BM_GammaStar)->DenseRange(6, 12, 2)->Unit(benchmark::kMillisecond);

static void BM_GeneralBarrier(benchmark::State& state) {
  const Network g = random_regular(static_cast<int>(state.range(0)), 3, 3).with_uniform_field(0.2);
  for (auto _ : state) benchmark::DoNotOptimize(general_barrier(g).value);
}
BENCHMARK(BM_GeneralBarrier)->DenseRange(8, 14, 2)->Unit(benchmark::kMillisecond);

static void BM_LeadingEigenpair(benchmark::State& state) {
  const Network g = random_regular(static_cast<int>(state.range(0)), 3, 4).with_uniform_field(0.5);
  const auto ss = build_state_space(g, DynamicsSpec::glauber(2.0));
  for (auto _ : state) benchmark::DoNotOptimize(leading_eigenpair(ss, {.compute_second = false}).lambda0);
}
BENCHMARK(BM_LeadingEigenpair)->DenseRange(6, 10, 2)->Unit(benchmark::kMillisecond);

static void BM_ExactQuantile(benchmark::State& state) {
  const Network g = random_regular(static_cast<int>(state.range(0)), 3, 5).with_uniform_field(0.5);
  const auto ss = build_state_space(g, DynamicsSpec::glauber(1.5));
  const auto eig = leading_eigenpair(ss);
  for (auto _ : state) benchmark::DoNotOptimize(exact_hitting_quantile(ss, 0, &eig).steps);
}
BENCHMARK(BM_ExactQuantile)->DenseRange(6, 10, 2)->Unit(benchmark::kMillisecond);

static void BM_Simulation(benchmark::State& state) {
  const Network g = grid(8, 2).with_uniform_field(1.0);
  const unsigned workers = static_cast<unsigned>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        typical_hitting_time(g, DynamicsSpec::glauber(1.0), {.n_trials = 200, .seed = 1, .workers = workers})
            .quantile_value);
  }
}
BENCHMARK(BM_Simulation)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK_MAIN();
