// OpenMP kernels against their serial references.
#include <benchmark/benchmark.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "platoon/metrics.hpp"
#include "platoon/sweep.hpp"

using namespace platoon;

namespace {

std::vector<cacc::Vec2> circle(std::size_t n, double radius, double offset)
{
    std::vector<cacc::Vec2> pts(n);
    for (std::size_t k = 0; k < n; ++k) {
        const double a = 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(n);
        pts[k] = {(radius + offset) * std::cos(a), (radius + offset) * std::sin(a)};
    }
    return pts;
}

template <auto Fn>
void bm_cross_track(benchmark::State& state)
{
    const auto n = static_cast<std::size_t>(state.range(0));
    const auto path = circle(n, 10.0, 0.0);
    const auto samples = circle(n, 10.0, 0.05);
    for (auto _ : state) {
        benchmark::DoNotOptimize(Fn(path, samples));
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n));
}

std::vector<scenario::ScenarioConfig> sweep_configs()
{
    std::vector<scenario::ScenarioConfig> cfgs;
    for (int k = 0; k < 4; ++k) {
        auto cfg = scenario::realistic_config();
        cfg.duration = 20.0;
        cfg.seed = 100 + static_cast<std::uint64_t>(k);
        cfgs.push_back(cfg);
    }
    return cfgs;
}

void bm_sweep_parallel(benchmark::State& state)
{
    const auto cfgs = sweep_configs();
    for (auto _ : state) {
        benchmark::DoNotOptimize(sweep::run_sweep(cfgs));
    }
}

void bm_sweep_serial(benchmark::State& state)
{
    const auto cfgs = sweep_configs();
    for (auto _ : state) {
        benchmark::DoNotOptimize(sweep::run_sweep_serial(cfgs));
    }
}

} // namespace

BENCHMARK(bm_cross_track<metrics::cross_track_rmse>)->Arg(1000)->Arg(4000);
BENCHMARK(bm_cross_track<metrics::cross_track_rmse_serial>)->Arg(1000)->Arg(4000);
BENCHMARK(bm_sweep_parallel)->Unit(benchmark::kMillisecond);
BENCHMARK(bm_sweep_serial)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
