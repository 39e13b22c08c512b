#include "narrator/config.hpp"

#include <charconv>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <set>

#include "narrator/errors.hpp"

namespace narrator {

namespace {

std::string trimmed(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

const std::set<std::string>& known_keys() {
    static const std::set<std::string> keys = {
        "run.input_dir",      "run.output_dir",      "run.device_id",
        "run.place_map",      "geo.timezone",        "geo.diameter_m",
        "geo.stop_epsilon",   "geo.night_start",     "geo.night_end",
        "geo.max_snap_m",     "sessions.keyboard_gap_s",
        "narrate.datetime_format",
        "privacy.include_notification_text",
        "privacy.include_keyboard_text",
        "privacy.include_place_labels",
        "privacy.include_network_names",
        "prompts.raw_week",   "prompts.max_tokens_warn",
        "llm.provider",       "llm.endpoint",        "llm.model",
        "llm.api_key",        "llm.timeout_s",       "llm.max_retries",
        "llm.backoff_s",      "llm.requests_per_minute",
        "llm.mock_fixtures",
    };
    return keys;
}

bool dynamic_key(const std::string& key) {
    return key.rfind("csv.", 0) == 0 || key.rfind("codes.", 0) == 0;
}

bool parse_bool(const std::string& key, const std::string& value) {
    if (value == "true" || value == "1" || value == "yes") return true;
    if (value == "false" || value == "0" || value == "no") return false;
    throw ConfigError("key '" + key + "': expected boolean, got '" + value + "'");
}

double parse_real(const std::string& key, const std::string& value) {
    try {
        std::size_t used = 0;
        const double d = std::stod(value, &used);
        if (used == value.size()) return d;
    } catch (...) {
    }
    throw ConfigError("key '" + key + "': expected number, got '" + value + "'");
}

int parse_int(const std::string& key, const std::string& value) {
    int out = 0;
    auto [p, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
    if (ec == std::errc() && p == value.data() + value.size()) return out;
    throw ConfigError("key '" + key + "': expected integer, got '" + value + "'");
}

int parse_minute_of_day(const std::string& key, const std::string& value) {
    int h = 0, m = 0;
    char sep = 0;
    if (std::sscanf(value.c_str(), "%d%c%d", &h, &sep, &m) != 3 || sep != ':' || h < 0 || h > 23 ||
        m < 0 || m > 59)
        throw ConfigError("key '" + key + "': expected HH:MM, got '" + value + "'");
    return h * 60 + m;
}

}  // namespace

KeyValues parse_key_values(std::istream& in) {
    KeyValues out;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string t = trimmed(line);
        if (t.empty() || t[0] == '#') continue;
        const auto eq = t.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config line " + std::to_string(lineno) +
                              ": expected 'key = value'");
        const std::string key = trimmed(t.substr(0, eq));
        const std::string value = trimmed(t.substr(eq + 1));
        if (key.empty())
            throw ConfigError("config line " + std::to_string(lineno) + ": empty key");
        out[key] = value;
    }
    return out;
}

KeyValues load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoFailure("cannot open config file '" + path + "'");
    return parse_key_values(in);
}

KeyValues RunConfig::environment_overrides() {
    KeyValues env;
    if (const char* v = std::getenv("NARRATOR_API_KEY")) env["llm.api_key"] = v;
    if (const char* v = std::getenv("NARRATOR_ENDPOINT")) env["llm.endpoint"] = v;
    if (const char* v = std::getenv("NARRATOR_MODEL")) env["llm.model"] = v;
    return env;
}

RunConfig RunConfig::from_sources(const KeyValues& file, const KeyValues& flags,
                                  const KeyValues& env) {
    KeyValues merged = file;
    for (const auto& [k, v] : flags) merged[k] = v;
    for (const auto& [k, v] : env) merged[k] = v;

    for (const auto& [key, value] : merged) {
        (void)value;
        if (!known_keys().count(key) && !dynamic_key(key))
            throw ConfigError("unknown config key '" + key + "'");
    }

    RunConfig cfg;
    cfg.raw = merged;
    auto get = [&](const char* key) -> std::optional<std::string> {
        auto it = merged.find(key);
        if (it == merged.end()) return std::nullopt;
        return it->second;
    };

    if (auto v = get("run.input_dir")) cfg.input_dir = *v;
    if (auto v = get("run.output_dir")) cfg.output_dir = *v;
    if (auto v = get("run.device_id"); v && !v->empty()) cfg.device_id = *v;
    if (auto v = get("run.place_map"); v && !v->empty()) cfg.place_map_path = *v;
    if (auto v = get("geo.timezone")) cfg.timezone = *v;

    if (auto v = get("geo.diameter_m")) cfg.geo.diameter_m = parse_real("geo.diameter_m", *v);
    if (auto v = get("geo.stop_epsilon"))
        cfg.geo.stop_epsilon = parse_real("geo.stop_epsilon", *v);
    if (auto v = get("geo.max_snap_m")) cfg.geo.max_snap_m = parse_real("geo.max_snap_m", *v);
    if (auto v = get("geo.night_start"))
        cfg.geo.night_window.start_minute = parse_minute_of_day("geo.night_start", *v);
    if (auto v = get("geo.night_end"))
        cfg.geo.night_window.end_minute = parse_minute_of_day("geo.night_end", *v);

    if (auto v = get("sessions.keyboard_gap_s"))
        cfg.keyboard_gap_s = parse_real("sessions.keyboard_gap_s", *v);
    if (auto v = get("narrate.datetime_format")) cfg.datetime_format = *v;

    if (auto v = get("privacy.include_notification_text"))
        cfg.privacy.include_notification_text = parse_bool("privacy.include_notification_text", *v);
    if (auto v = get("privacy.include_keyboard_text"))
        cfg.privacy.include_keyboard_text = parse_bool("privacy.include_keyboard_text", *v);
    if (auto v = get("privacy.include_place_labels"))
        cfg.privacy.include_place_labels = parse_bool("privacy.include_place_labels", *v);
    if (auto v = get("privacy.include_network_names"))
        cfg.privacy.include_network_names = parse_bool("privacy.include_network_names", *v);

    if (auto v = get("prompts.raw_week")) cfg.raw_week = parse_bool("prompts.raw_week", *v);
    if (auto v = get("prompts.max_tokens_warn"))
        cfg.max_tokens_warn = parse_int("prompts.max_tokens_warn", *v);

    if (auto v = get("llm.provider")) {
        auto kind = provider_from_name(*v);
        if (!kind) throw ConfigError("unknown provider '" + *v + "'");
        cfg.provider.provider = *kind;
    }
    if (auto v = get("llm.endpoint")) cfg.provider.endpoint = *v;
    if (auto v = get("llm.model")) cfg.provider.model = *v;
    if (auto v = get("llm.api_key")) cfg.provider.api_key = *v;
    if (auto v = get("llm.timeout_s")) cfg.provider.timeout_s = parse_real("llm.timeout_s", *v);
    if (auto v = get("llm.max_retries"))
        cfg.provider.max_retries = parse_int("llm.max_retries", *v);
    if (auto v = get("llm.backoff_s")) cfg.provider.backoff_s = parse_real("llm.backoff_s", *v);
    if (auto v = get("llm.requests_per_minute"))
        cfg.provider.requests_per_minute = parse_int("llm.requests_per_minute", *v);
    if (auto v = get("llm.mock_fixtures")) cfg.provider.mock_fixtures = *v;

    if (cfg.geo.diameter_m <= 0) throw ConfigError("geo.diameter_m must be positive");
    if (cfg.geo.stop_epsilon < 0) throw ConfigError("geo.stop_epsilon must be non-negative");
    if (cfg.geo.max_snap_m < 0) throw ConfigError("geo.max_snap_m must be non-negative");
    if (cfg.keyboard_gap_s <= 0) throw ConfigError("sessions.keyboard_gap_s must be positive");
    if (cfg.provider.timeout_s <= 0) throw ConfigError("llm.timeout_s must be positive");
    if (cfg.provider.max_retries < 0) throw ConfigError("llm.max_retries must be non-negative");
    if (cfg.max_tokens_warn < 0) throw ConfigError("prompts.max_tokens_warn must be non-negative");
    Timezone check(cfg.timezone);  // validates the zone name

    return cfg;
}

TableSchema RunConfig::schema_for(SensorKind kind) const {
    TableSchema schema = default_schema(kind);
    const std::string prefix = std::string("csv.") + table_name(kind) + ".";
    for (const auto& [key, value] : raw) {
        if (key.rfind(prefix, 0) != 0) continue;
        const std::string logical = key.substr(prefix.size());
        if (logical == "row_id")
            schema.row_id_col = value;
        else if (logical == "timestamp")
            schema.timestamp_col = value;
        else if (logical == "device_id")
            schema.device_col = value;
        else if (schema.payload_cols.count(logical))
            schema.payload_cols[logical] = value;
        else
            throw ConfigError("key '" + key + "': no such column for sensor '" +
                              table_name(kind) + "'");
    }
    return schema;
}

CodeMaps RunConfig::code_maps() const {
    CodeMaps maps;
    for (const auto& [key, value] : raw) {
        if (key.rfind("codes.battery.", 0) == 0) {
            const int code = parse_int(key, key.substr(14));
            static const std::map<std::string, BatteryStatus> names = {
                {"rebooted", BatteryStatus::Rebooted},
                {"shutdown", BatteryStatus::Shutdown},
                {"started_charging", BatteryStatus::StartedCharging},
                {"started_discharging", BatteryStatus::StartedDischarging},
                {"not_charging", BatteryStatus::NotCharging},
                {"fully_charged", BatteryStatus::FullyCharged},
                {"level_sample", BatteryStatus::LevelSample}};
            auto it = names.find(value);
            if (it == names.end())
                throw ConfigError("key '" + key + "': unknown battery status '" + value + "'");
            maps.battery[code] = it->second;
        } else if (key.rfind("codes.screen.", 0) == 0) {
            const int code = parse_int(key, key.substr(13));
            static const std::map<std::string, ScreenStatus> names = {
                {"off", ScreenStatus::Off},
                {"on", ScreenStatus::On},
                {"locked", ScreenStatus::Locked},
                {"unlocked", ScreenStatus::Unlocked}};
            auto it = names.find(value);
            if (it == names.end())
                throw ConfigError("key '" + key + "': unknown screen status '" + value + "'");
            maps.screen[code] = it->second;
        }
    }
    return maps;
}

}  // namespace narrator
