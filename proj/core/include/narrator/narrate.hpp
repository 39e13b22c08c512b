#pragma once

#include <iosfwd>
#include <string>
#include <variant>
#include <vector>

#include "narrator/events.hpp"
#include "narrator/geo.hpp"
#include "narrator/sessions.hpp"
#include "narrator/time.hpp"

namespace narrator {

inline constexpr const char* kDefaultDatetimeFormat = "EEE MMM d HH:mm:ss";

// One rendered sensing statement. Serialized form is exactly
//   <datetime> | <sensor label> | <description>
struct NarrativeLine {
    Timestamp ts;
    std::string sensor_label;
    std::string description;

    std::string serialize(const Timezone& zone,
                          const std::string& datetime_format = kDefaultDatetimeFormat) const;
};

// Content classes that can be stripped from narratives for privacy.
struct PrivacyConfig {
    bool include_notification_text = true;
    bool include_keyboard_text = true;
    bool include_place_labels = true;
    bool include_network_names = true;
};

struct NarrativeDocument {
    LocalDate date;
    std::vector<NarrativeLine> lines;
};

// Lines joined by '\n', no trailing terminator; the {data} block of prompts.
std::string to_text(const NarrativeDocument& doc, const Timezone& zone,
                    const std::string& datetime_format = kDefaultDatetimeFormat);

// UTF-8, one line per statement with '\n' terminators. Returns bytes written.
std::size_t write_document(const NarrativeDocument& doc, std::ostream& sink, const Timezone& zone,
                           const std::string& datetime_format = kDefaultDatetimeFormat);

// A location event after the geo pass.
struct LocatedFix {
    LocationNarration narration;
};

// Everything render_line knows how to phrase. Battery and keyboard arrive
// post-reduction; locations arrive post-geo.
using Renderable = std::variant<ApplicationForeground, Notification, BatteryEmission, Bluetooth,
                                Call, Installation, KeyboardSession, LocatedFix, Message, Screen,
                                Touch, Wifi>;

// Renders one processed event through the fixed English templates.
// Throws UnsupportedEvent for events that cannot be phrased (a call or
// message with no person ordinal and no registry entry).
NarrativeLine render_line(Timestamp ts, const Renderable& event, const PersonRegistry& persons,
                          const PrivacyConfig& privacy);

struct NarrateOptions {
    PrivacyConfig privacy;
    double keyboard_gap_s = 30.0;
    std::string datetime_format = kDefaultDatetimeFormat;
};

// Renders one local calendar day from the merged chronological stream:
// slices the day, reduces battery and keyboard, resolves locations through
// the geo pipeline, drops "System UI" foreground events, and renders the
// rest in merge order.
NarrativeDocument narrate_day(const std::vector<SensorEvent>& merged, const LocalDate& date,
                              const GeoPipeline& geo, const PersonRegistry& persons,
                              const NarrateOptions& opts, const Timezone& zone);

}  // namespace narrator
