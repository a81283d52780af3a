#include <benchmark/benchmark.h>

#include <string>

#include "radialkit/curves.hpp"
#include "radialkit/geometry.hpp"
#include "radialkit/quality.hpp"
#include "radialkit/random.hpp"
#include "radialkit/synthetic.hpp"
#include "radialkit/warp.hpp"

using namespace radialkit;

static void BM_DmRoundTrip(benchmark::State& state) {
    NormPoint p{0.3, -0.2};
    for (auto _ : state) {
        p = dm_distort(dm_undistort(p, 0.6), 0.6);
        benchmark::DoNotOptimize(p);
    }
}
BENCHMARK(BM_DmRoundTrip);

static void BM_Warp(benchmark::State& state) {
    const auto img = synthetic_face(1, 0, {.size = static_cast<int>(state.range(0)), .channels = 3});
    WarpSpec spec;
    spec.model = DistortionModel::parse("dm:0.5");
    for (auto _ : state) benchmark::DoNotOptimize(warp(img, spec, static_cast<int>(state.range(1))));
    state.SetItemsProcessed(state.iterations() * state.range(0) * state.range(0));
}
BENCHMARK(BM_Warp)->Args({128, 1})->Args({256, 1})->Args({256, 4})->UseRealTime()->Unit(benchmark::kMillisecond);

static void BM_RadialFeatures(benchmark::State& state) {
    const auto img = synthetic_face(2, 0, {.size = 128});
    for (auto _ : state) benchmark::DoNotOptimize(radial_features(img, 8));
}
BENCHMARK(BM_RadialFeatures);

static void BM_EdcCurve(benchmark::State& state) {
    CounterRng rng(3, 3);
    std::vector<ComparisonRecord> c;
    std::map<std::string, double> q;
    for (int i = 0; i < state.range(0); ++i) {
        const std::string id = "p" + std::to_string(i);
        c.push_back({id, "r" + id, rng.uniform(-1, 1), true});
        q[id] = rng.uniform(0, 1);
        q["r" + id] = 1.0;
    }
    const double tau = calibrate_threshold(c, 0.05).tau;
    for (auto _ : state) benchmark::DoNotOptimize(edc_curve(c, q, tau));
}
BENCHMARK(BM_EdcCurve)->Arg(1000)->Arg(10000);
BENCHMARK_MAIN();
