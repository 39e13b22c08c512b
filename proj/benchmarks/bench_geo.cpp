#include <benchmark/benchmark.h>

#include <random>

#include "narrator/geo.hpp"

using namespace narrator;

namespace {

std::vector<GeoPoint> random_points(std::size_t n, double box_m) {
    std::mt19937 rng(12345);
    std::uniform_real_distribution<double> d(0.0, box_m);
    std::vector<GeoPoint> pts;
    pts.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        pts.push_back({-37.75 + d(rng) / 111194.9266, 144.96 + d(rng) / 87000.0,
                       Timestamp{static_cast<std::int64_t>(i) * 60000}, std::nullopt});
    }
    return pts;
}

}  // namespace

static void BM_Haversine(benchmark::State& state) {
    double lat = -37.75, acc = 0.0;
    for (auto _ : state) {
        acc += haversine_m(lat, 144.96, lat + 0.01, 144.97);
        lat += 1e-9;
    }
    benchmark::DoNotOptimize(acc);
}
BENCHMARK(BM_Haversine);

static void BM_ClusterLocations(benchmark::State& state) {
    const auto pts = random_points(static_cast<std::size_t>(state.range(0)), 2000.0);
    for (auto _ : state) {
        auto clusters = cluster_locations(pts, 50.0);
        benchmark::DoNotOptimize(clusters);
    }
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_ClusterLocations)->RangeMultiplier(2)->Range(64, 1024)->Complexity();

static void BM_ClusterDense(benchmark::State& state) {
    // Everything within one block: maximal merging.
    const auto pts = random_points(static_cast<std::size_t>(state.range(0)), 45.0);
    for (auto _ : state) {
        auto clusters = cluster_locations(pts, 50.0);
        benchmark::DoNotOptimize(clusters);
    }
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_ClusterDense)->RangeMultiplier(2)->Range(64, 512)->Complexity();
