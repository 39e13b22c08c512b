#include "narrator/sessions.hpp"

#include <algorithm>
#include <cctype>

namespace narrator {

namespace {

bool blank(const std::string& s) {
    return std::all_of(s.begin(), s.end(),
                       [](unsigned char c) { return std::isspace(c) != 0; });
}

}  // namespace

std::vector<BatteryEmission> battery_extrema(const std::vector<BatteryInput>& events) {
    std::vector<BatteryEmission> out;
    if (events.empty()) return out;

    // Split into status changes and level samples first.
    std::vector<std::size_t> samples;
    BatteryStatus running = BatteryStatus::LevelSample;
    bool have_running = false;
    std::vector<bool> is_change(events.size(), false);
    for (std::size_t i = 0; i < events.size(); ++i) {
        const BatteryStatus st = events[i].payload.status;
        if (st != BatteryStatus::LevelSample && (!have_running || st != running)) {
            is_change[i] = true;
            running = st;
            have_running = true;
        } else {
            samples.push_back(i);
        }
    }

    // Deduplicate consecutive equal levels, keeping the first sample of each
    // run, then mark strict direction changes.
    std::vector<std::size_t> dedup;
    for (std::size_t idx : samples) {
        if (dedup.empty() || events[dedup.back()].payload.level != events[idx].payload.level)
            dedup.push_back(idx);
    }

    std::vector<bool> emit_sample(events.size(), false);
    if (!samples.empty()) {
        emit_sample[samples.front()] = true;
        emit_sample[samples.back()] = true;
    }
    for (std::size_t k = 1; k + 1 < dedup.size(); ++k) {
        const int prev = events[dedup[k - 1]].payload.level;
        const int cur = events[dedup[k]].payload.level;
        const int next = events[dedup[k + 1]].payload.level;
        if ((cur > prev && cur > next) || (cur < prev && cur < next))
            emit_sample[dedup[k]] = true;
    }

    for (std::size_t i = 0; i < events.size(); ++i) {
        if (!is_change[i] && !emit_sample[i]) continue;
        BatteryEmission e;
        e.ts = events[i].ts;
        e.row_id = events[i].row_id;
        e.kind = is_change[i] ? BatteryEmission::Kind::StatusChange
                              : BatteryEmission::Kind::LocalExtremum;
        e.status = events[i].payload.status;
        e.level = events[i].payload.level;
        out.push_back(e);
    }
    return out;
}

std::vector<KeyboardSession> keyboard_sessions(const std::vector<KeyboardInput>& events,
                                               double gap_s) {
    std::vector<KeyboardSession> out;
    const std::int64_t gap_ms = static_cast<std::int64_t>(gap_s * 1000.0);

    std::size_t begin = 0;
    auto flush = [&](std::size_t end) {  // [begin, end)
        if (begin >= end) return;
        std::string text;
        for (std::size_t i = end; i-- > begin;) {
            if (!blank(events[i].payload.current_text)) {
                text = events[i].payload.current_text;
                break;
            }
        }
        if (!text.empty()) {
            KeyboardSession s;
            s.start_ts = events[begin].ts;
            s.end_ts = events[end - 1].ts;
            s.package = events[begin].payload.package;
            s.final_text = std::move(text);
            s.row_id = events[end - 1].row_id;
            out.push_back(std::move(s));
        }
        begin = end;
    };

    for (std::size_t i = 1; i < events.size(); ++i) {
        const bool same_package = events[i].payload.package == events[i - 1].payload.package;
        const bool within_gap = events[i].ts.epoch_ms - events[i - 1].ts.epoch_ms <= gap_ms;
        if (!same_package || !within_gap) flush(i);
    }
    flush(events.size());
    return out;
}

}  // namespace narrator
