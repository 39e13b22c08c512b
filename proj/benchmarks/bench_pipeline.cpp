#include <benchmark/benchmark.h>

#include <random>

#include "narrator/ingest.hpp"
#include "narrator/narrate.hpp"
#include "narrator/sessions.hpp"

using namespace narrator;

namespace {

std::vector<std::vector<SensorEvent>> random_streams(std::size_t streams, std::size_t each) {
    std::mt19937 rng(99);
    std::uniform_int_distribution<int> gap(1, 4000);
    std::vector<std::vector<SensorEvent>> out(streams);
    for (std::size_t s = 0; s < streams; ++s) {
        std::int64_t t = 0;
        for (std::size_t i = 0; i < each; ++i) {
            t += gap(rng);
            SensorEvent ev;
            ev.ts = Timestamp{t};
            ev.row_id = static_cast<std::int64_t>(i);
            ev.device_id = "bench";
            ev.payload = Screen{ScreenStatus::On};
            out[s].push_back(std::move(ev));
        }
    }
    return out;
}

}  // namespace

static void BM_MergeChronological(benchmark::State& state) {
    const auto streams = random_streams(12, static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) {
        auto copy = streams;
        auto merged = merge_chronological(std::move(copy));
        benchmark::DoNotOptimize(merged);
    }
    state.SetComplexityN(state.range(0) * 12);
}
BENCHMARK(BM_MergeChronological)->RangeMultiplier(4)->Range(256, 16384)->Complexity();

static void BM_BatteryExtrema(benchmark::State& state) {
    std::mt19937 rng(7);
    std::uniform_int_distribution<int> step(-3, 3);
    std::vector<BatteryInput> events;
    int level = 50;
    for (int i = 0; i < state.range(0); ++i) {
        level = std::clamp(level + step(rng), 0, 100);
        events.push_back({Timestamp{static_cast<std::int64_t>(i) * 1000}, i,
                          Battery{level, BatteryStatus::LevelSample}});
    }
    for (auto _ : state) {
        auto out = battery_extrema(events);
        benchmark::DoNotOptimize(out);
    }
}
BENCHMARK(BM_BatteryExtrema)->Range(1024, 65536);

static void BM_RenderLine(benchmark::State& state) {
    const PersonRegistry persons;
    const PrivacyConfig privacy;
    const Renderable event = ApplicationForeground{"Spotify", "com.spotify.music", false};
    for (auto _ : state) {
        auto line = render_line(Timestamp{1694683750000}, event, persons, privacy);
        benchmark::DoNotOptimize(line);
    }
}
BENCHMARK(BM_RenderLine);

BENCHMARK_MAIN();
