#include <benchmark/benchmark.h>

#include "edp/hypergeometric.hpp"
#include "edp/quarkonia.hpp"
#include "edp/spectrum.hpp"
#include "edp/transform.hpp"

namespace {

void BM_SolveClosedQ4(benchmark::State& state) {
    const edp::SaturationModel model{-0.7, 4.0};
    double e0 = 0.1;
    for (auto _ : state) {
        benchmark::DoNotOptimize(edp::solve_closed(model, e0).energy);
        e0 = e0 < 50.0 ? e0 + 0.1 : 0.1;
    }
}
BENCHMARK(BM_SolveClosedQ4);

void BM_SolveGenericQ4(benchmark::State& state) {
    const edp::SaturationModel model{-0.7, 4.0};
    double e0 = 0.1;
    for (auto _ : state) {
        benchmark::DoNotOptimize(edp::solve_generic(model, e0).energy);
        e0 = e0 < 50.0 ? e0 + 0.1 : 0.1;
    }
}
BENCHMARK(BM_SolveGenericQ4);

void BM_SolveGenericFractionalExponent(benchmark::State& state) {
    const edp::SaturationModel model{-0.4, 3.0};
    for (auto _ : state) {
        benchmark::DoNotOptimize(edp::solve_generic(model, 4.5).energy);
    }
}
BENCHMARK(BM_SolveGenericFractionalExponent);

void BM_Hyp1F1Terminating(benchmark::State& state) {
    for (auto _ : state) {
        benchmark::DoNotOptimize(edp::specfun::hyp1f1(-8.0, 2.5, 3.7));
    }
}
BENCHMARK(BM_Hyp1F1Terminating);

void BM_Hyp1F1Series(benchmark::State& state) {
    for (auto _ : state) {
        benchmark::DoNotOptimize(edp::specfun::hyp1f1(1.0, 1.0, 2.6));
    }
}
BENCHMARK(BM_Hyp1F1Series);

void BM_MapCoordinate(benchmark::State& state) {
    const auto spec = edp::xform::oscillator_spec(2.0, 1.5, -1.0);
    for (auto _ : state) {
        benchmark::DoNotOptimize(edp::xform::map_coordinate(spec, 3.7));
    }
}
BENCHMARK(BM_MapCoordinate);

void BM_GaugeWeight(benchmark::State& state) {
    const auto spec = edp::xform::oscillator_spec(2.0, 1.5, -1.0);
    for (auto _ : state) {
        benchmark::DoNotOptimize(edp::xform::gauge_weight(spec, 1.7));
    }
}
BENCHMARK(BM_GaugeWeight);

void BM_QuarkoniaFit(benchmark::State& state) {
    const auto tables = edp::quarkonia::load_experimental(EDP_DATA_FILE);
    const auto& cc = tables.at(edp::quarkonia::System::ccbar);
    for (auto _ : state) {
        benchmark::DoNotOptimize(
            edp::quarkonia::fit(edp::quarkonia::System::ccbar, -0.4, cc, 1.697));
    }
}
BENCHMARK(BM_QuarkoniaFit);

} // namespace

BENCHMARK_MAIN();
