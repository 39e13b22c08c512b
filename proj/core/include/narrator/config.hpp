#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <string>

#include "narrator/geo.hpp"
#include "narrator/ingest.hpp"
#include "narrator/llm.hpp"
#include "narrator/narrate.hpp"

namespace narrator {

// Flat "section.key = value" settings. '#' lines are comments.
using KeyValues = std::map<std::string, std::string>;

KeyValues parse_key_values(std::istream& in);
KeyValues load_config_file(const std::string& path);  // IoFailure when unreadable

// Everything one run needs. Assembled from a config file, overridden by
// command-line flags, overridden by environment variables.
struct RunConfig {
    std::string input_dir;
    std::string output_dir = "out";
    std::optional<std::string> device_id;
    std::string timezone = "UTC";
    std::optional<std::string> place_map_path;

    GeoOptions geo;
    double keyboard_gap_s = 30.0;
    std::string datetime_format = kDefaultDatetimeFormat;
    PrivacyConfig privacy;

    bool raw_week = false;
    int max_tokens_warn = 100000;

    ProviderConfig provider;

    // csv.<sensor>.<logical> column overrides and codes.<table>.<code>
    // status-code overrides, applied to the per-sensor defaults.
    TableSchema schema_for(SensorKind kind) const;
    CodeMaps code_maps() const;

    KeyValues raw;  // merged key set this config was built from

    static RunConfig from_sources(const KeyValues& file, const KeyValues& flags,
                                  const KeyValues& env);

    // Parses NARRATOR_API_KEY / NARRATOR_ENDPOINT / NARRATOR_MODEL.
    static KeyValues environment_overrides();

    Timezone make_timezone() const { return Timezone(timezone); }
};

}  // namespace narrator
