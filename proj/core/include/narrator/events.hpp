#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <variant>

#include "narrator/time.hpp"

namespace narrator {

// Order doubles as the chronological-merge tie-break priority at equal
// timestamps, so it must match the payload variant order below.
enum class SensorKind {
    Applications,
    Notifications,
    Battery,
    Bluetooth,
    Calls,
    Installations,
    Keyboard,
    Locations,
    Messages,
    Screen,
    Touch,
    Wifi,
};

inline constexpr int kSensorKindCount = 12;

// Table name, e.g. "screen"; also the default CSV file stem.
const char* table_name(SensorKind kind);
// Label used in rendered narrative lines, e.g. "screen status".
const char* narrative_label(SensorKind kind);
std::optional<SensorKind> sensor_kind_from_table(const std::string& name);

enum class BatteryStatus {
    Rebooted,
    Shutdown,
    StartedCharging,
    StartedDischarging,
    NotCharging,
    FullyCharged,
    LevelSample,
};

enum class BluetoothMode { Detected, Connected };
enum class CallDirection { Incoming, Outgoing, Missed };
enum class InstallAction { Added, Removed, Updated };
enum class MessageDirection { Received, Sent };
enum class ScreenStatus { Off, On, Locked, Unlocked };
enum class TouchAction { Clicked, ClickedLonger, ScrolledDown, ScrolledUp };
enum class WifiMode { Detected, Connected };

struct ApplicationForeground {
    std::string app_name;
    std::string package;
    bool is_system = false;
};

struct Notification {
    std::string app_name;
    std::optional<std::string> text;
};

struct Battery {
    int level = 0;  // percent 0..100
    BatteryStatus status = BatteryStatus::LevelSample;
};

struct Bluetooth {
    std::optional<std::string> name;
    BluetoothMode mode = BluetoothMode::Detected;
};

struct Call {
    CallDirection direction = CallDirection::Incoming;
    std::string trace;  // opaque per-contact identifier
    std::int64_t duration_s = 0;
    std::optional<int> person;  // ordinal filled in by assign_person_ids
};

struct Installation {
    std::string app_name;
    InstallAction action = InstallAction::Added;
};

struct Keyboard {
    std::string package;
    std::string current_text;
};

struct Location {
    double lat = 0.0;
    double lon = 0.0;
    std::optional<double> speed_mps;
};

struct Message {
    MessageDirection direction = MessageDirection::Received;
    std::string trace;
    std::optional<int> person;
};

struct Screen {
    ScreenStatus status = ScreenStatus::Off;
};

struct Touch {
    TouchAction action = TouchAction::Clicked;
    std::optional<std::string> content;
    std::string app_name;
};

struct Wifi {
    std::optional<std::string> ssid;
    WifiMode mode = WifiMode::Detected;
};

// Variant order mirrors SensorKind: index() is the merge tie-break priority.
using Payload = std::variant<ApplicationForeground, Notification, Battery, Bluetooth, Call,
                             Installation, Keyboard, Location, Message, Screen, Touch, Wifi>;

struct SensorEvent {
    Timestamp ts;
    std::string device_id;
    std::int64_t row_id = 0;
    Payload payload;

    SensorKind kind() const { return static_cast<SensorKind>(payload.index()); }
};

// Maps opaque contact traces to ordinal person ids (1, 2, 3, ...) in order
// of first appearance. Re-running over the same data is stable.
class PersonRegistry {
public:
    int assign(const std::string& trace) {
        auto [it, inserted] = ids_.try_emplace(trace, next_);
        if (inserted) ++next_;
        return it->second;
    }

    std::optional<int> find(const std::string& trace) const {
        auto it = ids_.find(trace);
        if (it == ids_.end()) return std::nullopt;
        return it->second;
    }

    std::size_t size() const { return ids_.size(); }

private:
    std::map<std::string, int> ids_;
    int next_ = 1;
};

}  // namespace narrator
