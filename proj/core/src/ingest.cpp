#include "narrator/ingest.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <istream>
#include <queue>
#include <set>

#include "narrator/csv.hpp"
#include "narrator/errors.hpp"

namespace narrator {

namespace {

constexpr const char* kTableNames[kSensorKindCount] = {
    "applications", "notifications", "battery",   "bluetooth", "calls",  "installations",
    "keyboard",     "locations",     "messages",  "screen",    "touch",  "wifi"};

constexpr const char* kNarrativeLabels[kSensorKindCount] = {
    "applications", "notifications", "battery",   "bluetooth",     "calls",  "installations",
    "keyboard",     "locations",     "messages",  "screen status", "touch",  "wifi"};

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

std::string trimmed(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

}  // namespace

const char* table_name(SensorKind kind) { return kTableNames[static_cast<int>(kind)]; }
const char* narrative_label(SensorKind kind) { return kNarrativeLabels[static_cast<int>(kind)]; }

std::optional<SensorKind> sensor_kind_from_table(const std::string& name) {
    for (int i = 0; i < kSensorKindCount; ++i)
        if (name == kTableNames[i]) return static_cast<SensorKind>(i);
    return std::nullopt;
}

TableSchema default_schema(SensorKind kind) {
    TableSchema s;
    s.kind = kind;
    switch (kind) {
        case SensorKind::Applications:
            s.payload_cols = {{"app_name", "application_name"},
                              {"package", "package_name"},
                              {"is_system", "is_system_app"}};
            break;
        case SensorKind::Notifications:
            s.payload_cols = {{"app_name", "application_name"}, {"text", "text"}};
            break;
        case SensorKind::Battery:
            s.payload_cols = {{"status", "battery_status"}, {"level", "battery_level"}};
            break;
        case SensorKind::Bluetooth:
            s.payload_cols = {{"name", "bt_name"}, {"mode", "mode"}};
            break;
        case SensorKind::Calls:
            s.payload_cols = {{"direction", "call_type"},
                              {"duration", "call_duration"},
                              {"trace", "trace"}};
            break;
        case SensorKind::Installations:
            s.payload_cols = {{"app_name", "application_name"},
                              {"action", "installation_status"}};
            break;
        case SensorKind::Keyboard:
            s.payload_cols = {{"package", "package_name"}, {"current_text", "current_text"}};
            break;
        case SensorKind::Locations:
            s.payload_cols = {{"lat", "double_latitude"},
                              {"lon", "double_longitude"},
                              {"speed", "double_speed"}};
            break;
        case SensorKind::Messages:
            s.payload_cols = {{"direction", "message_type"}, {"trace", "trace"}};
            break;
        case SensorKind::Screen:
            s.payload_cols = {{"status", "screen_status"}};
            break;
        case SensorKind::Touch:
            s.payload_cols = {{"action", "touch_action"},
                              {"content", "touch_action_text"},
                              {"app_name", "touch_app"}};
            break;
        case SensorKind::Wifi:
            s.payload_cols = {{"ssid", "ssid"}, {"mode", "mode"}};
            break;
    }
    return s;
}

BatteryCodeMap default_battery_codes() {
    return {{-2, BatteryStatus::Rebooted},
            {-1, BatteryStatus::Shutdown},
            {2, BatteryStatus::StartedCharging},
            {3, BatteryStatus::StartedDischarging},
            {4, BatteryStatus::NotCharging},
            {5, BatteryStatus::FullyCharged}};
}

ScreenCodeMap default_screen_codes() {
    return {{0, ScreenStatus::Off},
            {1, ScreenStatus::On},
            {2, ScreenStatus::Locked},
            {3, ScreenStatus::Unlocked}};
}

namespace {

// Cell accessor bound to one row; parse failures throw RowError via
// CellError so the row is reported and skipped as a unit.
struct CellError {
    std::string reason;
};

class Row {
public:
    Row(const std::vector<std::string>& cells, const std::map<std::string, int>& index)
        : cells_(cells), index_(index) {}

    const std::string& raw(const std::string& col) const {
        auto it = index_.find(col);
        if (it == index_.end() || it->second >= static_cast<int>(cells_.size())) {
            static const std::string empty;
            return empty;
        }
        return cells_[static_cast<std::size_t>(it->second)];
    }

    std::int64_t integer(const std::string& col) const {
        const std::string v = trimmed(raw(col));
        std::int64_t out = 0;
        auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
        if (ec == std::errc() && p == v.data() + v.size()) return out;
        // MySQL exports sometimes render integral columns as doubles.
        try {
            std::size_t used = 0;
            const double d = std::stod(v, &used);
            if (used == v.size()) return static_cast<std::int64_t>(std::llround(d));
        } catch (...) {
        }
        throw CellError{"column '" + col + "': expected integer, got '" + v + "'"};
    }

    double real(const std::string& col) const {
        const std::string v = trimmed(raw(col));
        try {
            std::size_t used = 0;
            const double d = std::stod(v, &used);
            if (used == v.size()) return d;
        } catch (...) {
        }
        throw CellError{"column '" + col + "': expected number, got '" + v + "'"};
    }

    bool boolean(const std::string& col) const {
        const std::string v = lower(trimmed(raw(col)));
        if (v == "1" || v == "true" || v == "yes") return true;
        if (v == "0" || v == "false" || v == "no" || v.empty()) return false;
        throw CellError{"column '" + col + "': expected boolean, got '" + v + "'"};
    }

    bool empty(const std::string& col) const { return trimmed(raw(col)).empty(); }

private:
    const std::vector<std::string>& cells_;
    const std::map<std::string, int>& index_;
};

const std::string& payload_col(const TableSchema& schema, const std::string& logical) {
    auto it = schema.payload_cols.find(logical);
    if (it == schema.payload_cols.end())
        throw MissingColumn("schema for '" + std::string(table_name(schema.kind)) +
                            "' lacks logical column '" + logical + "'");
    return it->second;
}

CallDirection parse_call_direction(const Row& row, const std::string& col) {
    const std::string v = lower(trimmed(row.raw(col)));
    if (v == "1" || v == "incoming") return CallDirection::Incoming;
    if (v == "2" || v == "outgoing") return CallDirection::Outgoing;
    if (v == "3" || v == "missed") return CallDirection::Missed;
    throw CellError{"column '" + col + "': unknown call type '" + v + "'"};
}

MessageDirection parse_message_direction(const Row& row, const std::string& col) {
    const std::string v = lower(trimmed(row.raw(col)));
    if (v == "1" || v == "received" || v == "inbox") return MessageDirection::Received;
    if (v == "2" || v == "sent") return MessageDirection::Sent;
    throw CellError{"column '" + col + "': unknown message type '" + v + "'"};
}

InstallAction parse_install_action(const Row& row, const std::string& col) {
    const std::string v = lower(trimmed(row.raw(col)));
    if (v == "0" || v == "removed") return InstallAction::Removed;
    if (v == "1" || v == "added") return InstallAction::Added;
    if (v == "2" || v == "updated") return InstallAction::Updated;
    throw CellError{"column '" + col + "': unknown installation status '" + v + "'"};
}

TouchAction parse_touch_action(const Row& row, const std::string& col) {
    std::string v = lower(trimmed(row.raw(col)));
    std::replace(v.begin(), v.end(), ' ', '_');
    if (v == "clicked") return TouchAction::Clicked;
    if (v == "clicked_longer" || v == "long_clicked") return TouchAction::ClickedLonger;
    if (v == "scrolled_down") return TouchAction::ScrolledDown;
    if (v == "scrolled_up") return TouchAction::ScrolledUp;
    throw CellError{"column '" + col + "': unknown touch action '" + v + "'"};
}

template <typename ModeT>
ModeT parse_mode(const Row& row, const std::string& col, ModeT detected, ModeT connected) {
    const std::string v = lower(trimmed(row.raw(col)));
    if (v == "0" || v == "detected" || v.empty()) return detected;
    if (v == "1" || v == "connected") return connected;
    throw CellError{"column '" + col + "': unknown mode '" + v + "'"};
}

Payload parse_payload(const Row& row, const TableSchema& schema, const CodeMaps& codes) {
    switch (schema.kind) {
        case SensorKind::Applications: {
            ApplicationForeground p;
            p.app_name = row.raw(payload_col(schema, "app_name"));
            p.package = row.raw(payload_col(schema, "package"));
            p.is_system = row.boolean(payload_col(schema, "is_system"));
            return p;
        }
        case SensorKind::Notifications: {
            Notification p;
            p.app_name = row.raw(payload_col(schema, "app_name"));
            const std::string& col = payload_col(schema, "text");
            if (!row.empty(col)) p.text = row.raw(col);
            return p;
        }
        case SensorKind::Battery: {
            Battery p;
            const std::int64_t level = row.integer(payload_col(schema, "level"));
            if (level < 0 || level > 100)
                throw CellError{"battery level " + std::to_string(level) + " out of 0..100"};
            p.level = static_cast<int>(level);
            const int code = static_cast<int>(row.integer(payload_col(schema, "status")));
            auto it = codes.battery.find(code);
            p.status = it == codes.battery.end() ? BatteryStatus::LevelSample : it->second;
            return p;
        }
        case SensorKind::Bluetooth: {
            Bluetooth p;
            const std::string& name_col = payload_col(schema, "name");
            if (!row.empty(name_col)) p.name = row.raw(name_col);
            p.mode = parse_mode(row, payload_col(schema, "mode"), BluetoothMode::Detected,
                                BluetoothMode::Connected);
            return p;
        }
        case SensorKind::Calls: {
            Call p;
            p.direction = parse_call_direction(row, payload_col(schema, "direction"));
            p.trace = trimmed(row.raw(payload_col(schema, "trace")));
            const std::int64_t dur = row.integer(payload_col(schema, "duration"));
            if (dur < 0) throw CellError{"negative call duration"};
            // Missed calls ring but never connect; the model forces zero.
            p.duration_s = p.direction == CallDirection::Missed ? 0 : dur;
            return p;
        }
        case SensorKind::Installations: {
            Installation p;
            p.app_name = row.raw(payload_col(schema, "app_name"));
            p.action = parse_install_action(row, payload_col(schema, "action"));
            return p;
        }
        case SensorKind::Keyboard: {
            Keyboard p;
            p.package = row.raw(payload_col(schema, "package"));
            p.current_text = row.raw(payload_col(schema, "current_text"));
            return p;
        }
        case SensorKind::Locations: {
            Location p;
            p.lat = row.real(payload_col(schema, "lat"));
            p.lon = row.real(payload_col(schema, "lon"));
            if (p.lat < -90.0 || p.lat > 90.0 || p.lon < -180.0 || p.lon > 180.0)
                throw CellError{"coordinates out of range"};
            const std::string& speed_col = payload_col(schema, "speed");
            if (!row.empty(speed_col)) {
                const double s = row.real(speed_col);
                if (s < 0) throw CellError{"negative speed"};
                p.speed_mps = s;
            }
            return p;
        }
        case SensorKind::Messages: {
            Message p;
            p.direction = parse_message_direction(row, payload_col(schema, "direction"));
            p.trace = trimmed(row.raw(payload_col(schema, "trace")));
            return p;
        }
        case SensorKind::Screen: {
            Screen p;
            const int code = static_cast<int>(row.integer(payload_col(schema, "status")));
            auto it = codes.screen.find(code);
            if (it == codes.screen.end())
                throw CellError{"unknown screen status code " + std::to_string(code)};
            p.status = it->second;
            return p;
        }
        case SensorKind::Touch: {
            Touch p;
            p.action = parse_touch_action(row, payload_col(schema, "action"));
            const std::string& content_col = payload_col(schema, "content");
            if (!row.empty(content_col)) p.content = row.raw(content_col);
            p.app_name = row.raw(payload_col(schema, "app_name"));
            return p;
        }
        case SensorKind::Wifi: {
            Wifi p;
            const std::string& ssid_col = payload_col(schema, "ssid");
            if (!row.empty(ssid_col)) p.ssid = row.raw(ssid_col);
            p.mode = parse_mode(row, payload_col(schema, "mode"), WifiMode::Detected,
                                WifiMode::Connected);
            return p;
        }
    }
    throw CellError{"unhandled sensor kind"};
}

}  // namespace

LoadResult load_table(std::istream& source, SensorKind kind, const TableSchema& schema,
                      const CodeMaps& codes) {
    LoadResult result;
    CsvReader reader(source);
    std::vector<std::string> header;
    if (!reader.next(header)) return result;  // zero-byte source

    std::map<std::string, int> index;
    for (int i = 0; i < static_cast<int>(header.size()); ++i) index[trimmed(header[i])] = i;

    auto require = [&](const std::string& col) {
        if (!index.count(col))
            throw MissingColumn("table '" + std::string(table_name(kind)) +
                                "': column '" + col + "' not in header");
    };
    require(schema.row_id_col);
    require(schema.timestamp_col);
    require(schema.device_col);
    // The speed column is genuinely optional in the wild; all others must exist.
    for (const auto& [logical, actual] : schema.payload_cols) {
        if (kind == SensorKind::Locations && logical == "speed" && !index.count(actual)) continue;
        require(actual);
    }

    std::vector<std::string> cells;
    while (reader.next(cells)) {
        if (cells.size() == 1 && trimmed(cells[0]).empty()) continue;  // blank line
        Row row(cells, index);
        try {
            SensorEvent ev;
            const std::int64_t ms = row.integer(schema.timestamp_col);
            if (ms < 0) throw CellError{"negative timestamp"};
            ev.ts = Timestamp{ms};
            ev.row_id = row.integer(schema.row_id_col);
            ev.device_id = trimmed(row.raw(schema.device_col));
            ev.payload = parse_payload(row, schema, codes);
            result.events.push_back(std::move(ev));
        } catch (const CellError& e) {
            result.errors.push_back({reader.record_number(), e.reason});
        }
    }
    return result;
}

std::string format_row_warning(const std::string& file, const RowError& err) {
    return "WARN row " + std::to_string(err.row) + " in " + file + ": " + err.reason;
}

namespace {

// (ts, priority, row_id) lexicographic
bool event_before(const SensorEvent& a, const SensorEvent& b) {
    if (a.ts != b.ts) return a.ts < b.ts;
    if (a.payload.index() != b.payload.index()) return a.payload.index() < b.payload.index();
    return a.row_id < b.row_id;
}

}  // namespace

std::vector<SensorEvent> merge_chronological(std::vector<std::vector<SensorEvent>> streams) {
    std::size_t total = 0;
    for (std::size_t s = 0; s < streams.size(); ++s) {
        const auto& stream = streams[s];
        total += stream.size();
        for (std::size_t i = 1; i < stream.size(); ++i) {
            const auto& prev = stream[i - 1];
            const auto& cur = stream[i];
            if (cur.ts < prev.ts || (cur.ts == prev.ts && cur.row_id < prev.row_id))
                throw UnsortedInput("input stream " + std::to_string(s) +
                                    " violates (ts, row_id) order at position " +
                                    std::to_string(i));
        }
    }

    using Cursor = std::pair<std::size_t, std::size_t>;  // (stream, index)
    auto later = [&](const Cursor& a, const Cursor& b) {
        return event_before(streams[b.first][b.second], streams[a.first][a.second]);
    };
    std::priority_queue<Cursor, std::vector<Cursor>, decltype(later)> heap(later);
    for (std::size_t s = 0; s < streams.size(); ++s)
        if (!streams[s].empty()) heap.push({s, 0});

    std::vector<SensorEvent> out;
    out.reserve(total);
    while (!heap.empty()) {
        auto [s, i] = heap.top();
        heap.pop();
        out.push_back(std::move(streams[s][i]));
        if (i + 1 < streams[s].size()) heap.push({s, i + 1});
    }
    return out;
}

std::pair<std::vector<SensorEvent>, PersonRegistry> assign_person_ids(
    std::vector<SensorEvent> events, PersonRegistry registry) {
    for (auto& ev : events) {
        if (auto* call = std::get_if<Call>(&ev.payload))
            call->person = registry.assign(call->trace);
        else if (auto* msg = std::get_if<Message>(&ev.payload))
            msg->person = registry.assign(msg->trace);
    }
    return {std::move(events), std::move(registry)};
}

std::vector<SensorEvent> apply_device_filter(std::vector<SensorEvent> events,
                                             const std::optional<std::string>& device_id) {
    if (device_id) {
        std::erase_if(events, [&](const SensorEvent& ev) { return ev.device_id != *device_id; });
        return events;
    }
    std::set<std::string> seen;
    for (const auto& ev : events) seen.insert(ev.device_id);
    if (seen.size() > 1)
        throw MixedDevices("input mixes " + std::to_string(seen.size()) +
                           " device ids; supply a device filter");
    return events;
}

}  // namespace narrator
