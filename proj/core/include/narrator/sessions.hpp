#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "narrator/events.hpp"
#include "narrator/time.hpp"

namespace narrator {

// Battery event reduced to the points worth narrating.
struct BatteryEmission {
    Timestamp ts;
    enum class Kind { StatusChange, LocalExtremum } kind = Kind::LocalExtremum;
    BatteryStatus status = BatteryStatus::LevelSample;
    int level = 0;
    std::int64_t row_id = 0;
};

struct BatteryInput {
    Timestamp ts;
    std::int64_t row_id = 0;
    Battery payload;
};

// Keeps status transitions plus the level samples where the trend turns.
// A row is a status change when its status differs from the running status;
// repeats and LevelSample rows count as level samples. Of those, the strict
// local extrema of the run-length-deduplicated level sequence are emitted,
// plus the first and last sample so each narrated span has anchor levels.
std::vector<BatteryEmission> battery_extrema(const std::vector<BatteryInput>& events);

struct KeyboardSession {
    Timestamp start_ts;
    Timestamp end_ts;
    std::string package;
    std::string final_text;  // last non-empty snapshot of the session
    std::int64_t row_id = 0;  // of the closing event
};

struct KeyboardInput {
    Timestamp ts;
    std::int64_t row_id = 0;
    Keyboard payload;
};

// Consecutive snapshots from the same package within gap_s form a session;
// each emits its final non-empty buffer. All-blank sessions emit nothing.
std::vector<KeyboardSession> keyboard_sessions(const std::vector<KeyboardInput>& events,
                                               double gap_s = 30.0);

}  // namespace narrator
