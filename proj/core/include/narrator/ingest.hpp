#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "narrator/events.hpp"

namespace narrator {

// Column layout for one sensor table. `payload_cols` maps logical field
// names (fixed per sensor kind, see default_schema) to actual CSV headers.
struct TableSchema {
    SensorKind kind = SensorKind::Applications;
    std::string row_id_col = "_id";
    std::string timestamp_col = "timestamp";
    std::string device_col = "device_id";
    std::map<std::string, std::string> payload_cols;
};

TableSchema default_schema(SensorKind kind);

// Integer status codes as exported by the sensing app; overridable from the
// run config since only the English statuses are fixed.
using BatteryCodeMap = std::map<int, BatteryStatus>;
using ScreenCodeMap = std::map<int, ScreenStatus>;

BatteryCodeMap default_battery_codes();  // -2 rebooted, -1 shutdown, 2..5 android states
ScreenCodeMap default_screen_codes();    // 0 off, 1 on, 2 locked, 3 unlocked

struct CodeMaps {
    BatteryCodeMap battery = default_battery_codes();
    ScreenCodeMap screen = default_screen_codes();
};

struct RowError {
    int row = 0;  // 1-based record number, header = 1
    std::string reason;
};

struct LoadResult {
    std::vector<SensorEvent> events;  // in file order
    std::vector<RowError> errors;    // malformed rows, reported not dropped silently
};

// Reads one delimited sensor table. Throws MissingColumn when the schema
// names a column absent from the header; malformed rows land in `errors`.
// A zero-byte stream and a header-only stream both yield an empty list.
LoadResult load_table(std::istream& source, SensorKind kind, const TableSchema& schema,
                      const CodeMaps& codes = {});

std::string format_row_warning(const std::string& file, const RowError& err);

// Merges per-sensor streams into one chronological stream. Each input must
// already be sorted by (ts, row_id) or UnsortedInput is thrown. Ties at
// identical timestamps break by sensor priority (SensorKind order), then
// row_id.
std::vector<SensorEvent> merge_chronological(std::vector<std::vector<SensorEvent>> streams);

// Labels every call/message event with an ordinal person id, first
// appearance first. Pure relabeling; idempotent on already-labeled data.
std::pair<std::vector<SensorEvent>, PersonRegistry> assign_person_ids(
    std::vector<SensorEvent> events, PersonRegistry registry = {});

// Narratives are per-person. With a filter, keeps only that device's events;
// without one, mixed-device input is rejected (MixedDevices).
std::vector<SensorEvent> apply_device_filter(std::vector<SensorEvent> events,
                                             const std::optional<std::string>& device_id);

}  // namespace narrator
