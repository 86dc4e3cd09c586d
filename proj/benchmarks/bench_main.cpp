#include <benchmark/benchmark.h>

#include <vector>

#include "workreal/oscillator.hpp"
#include "workreal/squeeze.hpp"
#include "workreal/two_level.hpp"

using namespace workreal;

static void BM_SqueezeClosedForm(benchmark::State& state) {
    const auto n_max = static_cast<std::size_t>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(squeeze_matrix_closed_form(0.1, n_max));
}
BENCHMARK(BM_SqueezeClosedForm)->Arg(63)->Arg(127)->Arg(255)->Unit(benchmark::kMillisecond);

static void BM_SqueezeOracle(benchmark::State& state) {
    const auto n_max = static_cast<std::size_t>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(squeeze_matrix_exponential_oracle(0.1, n_max));
}
BENCHMARK(BM_SqueezeOracle)->Arg(63)->Arg(127)->Arg(255)->Unit(benchmark::kMillisecond);

static void BM_SqueezeElementHighIndex(benchmark::State& state) {
    for (auto _ : state) benchmark::DoNotOptimize(squeeze_element(399, 201, 0.2));
}
BENCHMARK(BM_SqueezeElementHighIndex)->Unit(benchmark::kMicrosecond);

static void BM_OscillatorJoints(benchmark::State& state) {
    SqueezeMatrixCache cache;
    (void)oscillator_three_time(1.0, 0.1, 0.1, 0, &cache);
    for (auto _ : state) benchmark::DoNotOptimize(oscillator_three_time(1.0, 0.1, 0.1, 0, &cache));
}
BENCHMARK(BM_OscillatorJoints)->Unit(benchmark::kMillisecond);

static void BM_SqueezeGrid(benchmark::State& state) {
    std::vector<double> axis;
    for (int i = 0; i <= 10; ++i) axis.push_back(0.01 * i);
    OscillatorOptions options;
    for (auto _ : state) benchmark::DoNotOptimize(squeeze_grid_sweep(1.0, axis, axis, options, false));
}
BENCHMARK(BM_SqueezeGrid)->Unit(benchmark::kMillisecond);

static void BM_TlsThetaSweep(benchmark::State& state) {
    const auto grid = default_theta_grid();
    for (auto _ : state) benchmark::DoNotOptimize(tls_theta_sweep(1.0, TlsSpectra::equal(), grid));
}
BENCHMARK(BM_TlsThetaSweep)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
