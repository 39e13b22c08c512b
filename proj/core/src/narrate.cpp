#include "narrator/narrate.hpp"

#include <algorithm>
#include <cstdio>
#include <ostream>

#include "narrator/errors.hpp"

namespace narrator {

namespace {

const char* battery_sentence(BatteryStatus status) {
    switch (status) {
        case BatteryStatus::Rebooted: return "The phone rebooted";
        case BatteryStatus::Shutdown: return "The phone shutdown";
        case BatteryStatus::StartedCharging: return "The phone started charging";
        case BatteryStatus::StartedDischarging: return "The phone started discharging";
        case BatteryStatus::NotCharging: return "The phone was not charging";
        case BatteryStatus::FullyCharged: return "The phone battery became fully charged";
        case BatteryStatus::LevelSample: return "The battery level changed";
    }
    return "The battery level changed";
}

std::string format_distance(double meters) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.1f", meters);
    return buf;
}

int person_ordinal(const std::optional<int>& assigned, const std::string& trace,
                   const PersonRegistry& persons, const char* what) {
    if (assigned) return *assigned;
    if (auto found = persons.find(trace)) return *found;
    throw UnsupportedEvent(std::string(what) + " event has no person ordinal for its trace");
}

struct Renderer {
    const PersonRegistry& persons;
    const PrivacyConfig& privacy;

    std::pair<const char*, std::string> operator()(const ApplicationForeground& p) const {
        return {"applications", "Opened the app " + p.app_name};
    }

    std::pair<const char*, std::string> operator()(const Notification& p) const {
        if (p.text && privacy.include_notification_text)
            return {"notifications", "Received a notification from the " + p.app_name +
                                         ". The content of the notification was " + *p.text};
        return {"notifications", "Received a notification from the " + p.app_name};
    }

    std::pair<const char*, std::string> operator()(const BatteryEmission& p) const {
        return {"battery", std::string(battery_sentence(p.status)) +
                               ", the battery level was " + std::to_string(p.level)};
    }

    std::pair<const char*, std::string> operator()(const Bluetooth& p) const {
        const bool named = p.name && privacy.include_network_names;
        if (p.mode == BluetoothMode::Detected)
            return {"bluetooth", named ? "Detected the nearby bluetooth device " + *p.name
                                       : std::string("Detected a nearby bluetooth device")};
        return {"bluetooth", named ? "Connected to the bluetooth device " + *p.name
                                   : std::string("Connected to a bluetooth device")};
    }

    std::pair<const char*, std::string> operator()(const Call& p) const {
        const int person = person_ordinal(p.person, p.trace, persons, "call");
        std::string head;
        switch (p.direction) {
            case CallDirection::Incoming:
                head = "Received a phone call from person " + std::to_string(person) + ".";
                break;
            case CallDirection::Outgoing:
                head = "Made a phone call to person " + std::to_string(person) + ".";
                break;
            case CallDirection::Missed:
                head = "Missed a call from person " + std::to_string(person) + ".";
                break;
        }
        return {"calls",
                head + " The call lasted " + std::to_string(p.duration_s) + " seconds"};
    }

    std::pair<const char*, std::string> operator()(const Installation& p) const {
        const char* verb = p.action == InstallAction::Removed  ? "removed"
                           : p.action == InstallAction::Added ? "added"
                                                              : "updated";
        return {"installations", p.app_name + " was " + verb};
    }

    std::pair<const char*, std::string> operator()(const KeyboardSession& p) const {
        if (!privacy.include_keyboard_text)
            return {"keyboard", "Entered text into the phone keyboard"};
        return {"keyboard", "Entered the following text into the phone keyboard: " + p.final_text};
    }

    std::pair<const char*, std::string> operator()(const LocatedFix& p) const {
        const LocationNarration& loc = p.narration;
        std::string desc = loc.place(privacy.include_place_labels);
        if (!loc.is_home && loc.distance_from_home_m)
            desc += ", " + format_distance(*loc.distance_from_home_m) + "m from home";
        desc += ", ";
        desc += movement_word(loc.status);
        return {"locations", std::move(desc)};
    }

    std::pair<const char*, std::string> operator()(const Message& p) const {
        const int person = person_ordinal(p.person, p.trace, persons, "message");
        if (p.direction == MessageDirection::Received)
            return {"messages", "Received a message from person " + std::to_string(person)};
        return {"messages", "Sent a message to person " + std::to_string(person)};
    }

    std::pair<const char*, std::string> operator()(const Screen& p) const {
        const char* word = nullptr;
        switch (p.status) {
            case ScreenStatus::Off: word = "turned off"; break;
            case ScreenStatus::On: word = "turned on"; break;
            case ScreenStatus::Locked: word = "locked"; break;
            case ScreenStatus::Unlocked: word = "unlocked"; break;
        }
        return {"screen status", std::string("Phone screen ") + word};
    }

    std::pair<const char*, std::string> operator()(const Touch& p) const {
        const char* verb = nullptr;
        switch (p.action) {
            case TouchAction::Clicked: verb = "Clicked"; break;
            case TouchAction::ClickedLonger: verb = "Clicked longer"; break;
            case TouchAction::ScrolledDown: verb = "Scrolled down within a view"; break;
            case TouchAction::ScrolledUp: verb = "Scrolled up within a view"; break;
        }
        std::string desc = verb;
        if (p.content) desc += " " + *p.content;
        desc += " in the app " + p.app_name;
        return {"touch", std::move(desc)};
    }

    std::pair<const char*, std::string> operator()(const Wifi& p) const {
        const bool named = p.ssid && privacy.include_network_names;
        if (p.mode == WifiMode::Detected)
            return {"wifi", named ? "Detected the nearby wifi network \"" + *p.ssid + "\""
                                  : std::string("Detected a nearby wifi network")};
        return {"wifi", named ? "Connected to the wifi network " + *p.ssid
                              : std::string("Connected to a wifi network")};
    }
};

std::string sanitize(std::string description) {
    // Descriptions must stay single-line.
    std::replace(description.begin(), description.end(), '\n', ' ');
    std::replace(description.begin(), description.end(), '\r', ' ');
    return description;
}

}  // namespace

std::string NarrativeLine::serialize(const Timezone& zone,
                                     const std::string& datetime_format) const {
    return zone.format(ts, datetime_format) + " | " + sensor_label + " | " + description;
}

std::string to_text(const NarrativeDocument& doc, const Timezone& zone,
                    const std::string& datetime_format) {
    std::string out;
    for (std::size_t i = 0; i < doc.lines.size(); ++i) {
        if (i) out += '\n';
        out += doc.lines[i].serialize(zone, datetime_format);
    }
    return out;
}

std::size_t write_document(const NarrativeDocument& doc, std::ostream& sink, const Timezone& zone,
                           const std::string& datetime_format) {
    std::size_t bytes = 0;
    for (const auto& line : doc.lines) {
        const std::string s = line.serialize(zone, datetime_format) + '\n';
        sink.write(s.data(), static_cast<std::streamsize>(s.size()));
        bytes += s.size();
    }
    if (!sink) throw IoFailure("failed writing narrative document");
    return bytes;
}

NarrativeLine render_line(Timestamp ts, const Renderable& event, const PersonRegistry& persons,
                          const PrivacyConfig& privacy) {
    auto [label, description] = std::visit(Renderer{persons, privacy}, event);
    return NarrativeLine{ts, label, sanitize(std::move(description))};
}

namespace {

struct RenderItem {
    Timestamp ts;
    int priority;  // SensorKind order
    std::int64_t row_id;
    Renderable event;
};

}  // namespace

NarrativeDocument narrate_day(const std::vector<SensorEvent>& merged, const LocalDate& date,
                              const GeoPipeline& geo, const PersonRegistry& persons,
                              const NarrateOptions& opts, const Timezone& zone) {
    NarrativeDocument doc;
    doc.date = date;

    std::vector<BatteryInput> battery;
    std::vector<KeyboardInput> keyboard;
    std::vector<RenderItem> items;

    for (const auto& ev : merged) {
        if (zone.local_date(ev.ts) != date) continue;
        const int priority = static_cast<int>(ev.payload.index());
        switch (ev.kind()) {
            case SensorKind::Battery:
                battery.push_back({ev.ts, ev.row_id, std::get<Battery>(ev.payload)});
                break;
            case SensorKind::Keyboard:
                keyboard.push_back({ev.ts, ev.row_id, std::get<Keyboard>(ev.payload)});
                break;
            case SensorKind::Locations: {
                const LocationNarration* narration = geo.narration_for(ev.ts, ev.row_id);
                if (!narration)
                    throw UnsupportedEvent("location fix missing from the geo pipeline");
                items.push_back({ev.ts, priority, ev.row_id, LocatedFix{*narration}});
                break;
            }
            case SensorKind::Applications: {
                const auto& app = std::get<ApplicationForeground>(ev.payload);
                if (app.app_name == "System UI") break;  // noise, excluded
                items.push_back({ev.ts, priority, ev.row_id, app});
                break;
            }
            case SensorKind::Notifications:
                items.push_back({ev.ts, priority, ev.row_id, std::get<Notification>(ev.payload)});
                break;
            case SensorKind::Bluetooth:
                items.push_back({ev.ts, priority, ev.row_id, std::get<Bluetooth>(ev.payload)});
                break;
            case SensorKind::Calls:
                items.push_back({ev.ts, priority, ev.row_id, std::get<Call>(ev.payload)});
                break;
            case SensorKind::Installations:
                items.push_back({ev.ts, priority, ev.row_id, std::get<Installation>(ev.payload)});
                break;
            case SensorKind::Messages:
                items.push_back({ev.ts, priority, ev.row_id, std::get<Message>(ev.payload)});
                break;
            case SensorKind::Screen:
                items.push_back({ev.ts, priority, ev.row_id, std::get<Screen>(ev.payload)});
                break;
            case SensorKind::Touch:
                items.push_back({ev.ts, priority, ev.row_id, std::get<Touch>(ev.payload)});
                break;
            case SensorKind::Wifi:
                items.push_back({ev.ts, priority, ev.row_id, std::get<Wifi>(ev.payload)});
                break;
        }
    }

    for (const auto& emission : battery_extrema(battery))
        items.push_back({emission.ts, static_cast<int>(SensorKind::Battery), emission.row_id,
                         emission});
    for (const auto& session : keyboard_sessions(keyboard, opts.keyboard_gap_s))
        items.push_back({session.end_ts, static_cast<int>(SensorKind::Keyboard), session.row_id,
                         session});

    std::stable_sort(items.begin(), items.end(), [](const RenderItem& a, const RenderItem& b) {
        if (a.ts != b.ts) return a.ts < b.ts;
        if (a.priority != b.priority) return a.priority < b.priority;
        return a.row_id < b.row_id;
    });

    doc.lines.reserve(items.size());
    for (const auto& item : items)
        doc.lines.push_back(render_line(item.ts, item.event, persons, opts.privacy));
    return doc;
}

}  // namespace narrator
