// Serial reference vs OpenMP trial loop. Both produce bit-identical
// statistics (see test_estimator), so the only question is throughput.

#include <benchmark/benchmark.h>

#include "jamdof/baseband.hpp"
#include "jamdof/estimator.hpp"
#include "jamdof/jammer.hpp"
#include "jamdof/schemes.hpp"

using namespace jamdof;

namespace {

JammerDistribution square_dist() {
    return JammerDistribution::from_probs(2, {0.3, 0.3, 0.3, 0.1});
}

void bench_estimate(benchmark::State& state, Parallelism par) {
    JammerDistribution d = square_dist();
    int trials = static_cast<int>(state.range(0));
    auto runner = [&](std::uint64_t s) { return run_dd(d, {4000, 4000}, s); };
    for (auto _ : state) {
        EmpiricalDof est = estimate(runner, Config::DD, 2, trials, 7, par);
        benchmark::DoNotOptimize(est.sum_mean);
    }
    state.SetItemsProcessed(state.iterations() * trials);
}

void BM_estimate_serial(benchmark::State& state) {
    bench_estimate(state, Parallelism::serial);
}

void BM_estimate_openmp(benchmark::State& state) {
    bench_estimate(state, Parallelism::openmp);
}

void bench_slope(benchmark::State& state, Parallelism par) {
    JammerDistribution d = square_dist();
    std::vector<double> grid = {30, 40, 50, 60};
    long long slots = state.range(0);
    for (auto _ : state) {
        SlopeEstimate est = estimate_slope(Config::PP, d, grid, slots, 7, {}, par);
        benchmark::DoNotOptimize(est.slope[0]);
    }
    state.SetItemsProcessed(state.iterations() * slots * static_cast<long long>(grid.size()));
}

void BM_slope_serial(benchmark::State& state) { bench_slope(state, Parallelism::serial); }

void BM_slope_openmp(benchmark::State& state) { bench_slope(state, Parallelism::openmp); }

}  // namespace

BENCHMARK(BM_estimate_serial)->Arg(8)->Arg(32)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_estimate_openmp)->Arg(8)->Arg(32)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_slope_serial)->Arg(2000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_slope_openmp)->Arg(2000)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
