#include "narrator/app.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <future>
#include <ostream>
#include <sstream>

#include "narrator/errors.hpp"
#include "narrator/llm.hpp"
#include "narrator/narrate.hpp"
#include "narrator/prompts.hpp"

namespace narrator::app {

namespace fs = std::filesystem;

namespace {

void atomic_write(const fs::path& path, const std::string& bytes) {
    fs::create_directories(path.parent_path());
    const fs::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
        if (!out) throw IoFailure("cannot write '" + tmp.string() + "'");
    }
    fs::rename(tmp, path);
}

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoFailure("cannot read '" + path.string() + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

struct LoadedRun {
    std::vector<SensorEvent> events;  // merged, person ids assigned
    PersonRegistry persons;
    std::string device_id;
    std::size_t row_errors = 0;
};

// Loads every sensor table present under input_dir, reports malformed rows
// on err, and produces the merged per-device stream.
LoadedRun load_run(const RunConfig& cfg, std::ostream& err) {
    if (cfg.input_dir.empty()) throw ConfigError("run.input_dir not set");
    if (!fs::is_directory(cfg.input_dir))
        throw ConfigError("input directory '" + cfg.input_dir + "' does not exist");

    LoadedRun run;
    std::vector<std::vector<SensorEvent>> streams;
    const CodeMaps codes = cfg.code_maps();
    bool any_table = false;

    for (int i = 0; i < kSensorKindCount; ++i) {
        const auto kind = static_cast<SensorKind>(i);
        const fs::path file = fs::path(cfg.input_dir) / (std::string(table_name(kind)) + ".csv");
        if (!fs::exists(file)) continue;
        any_table = true;
        std::ifstream in(file, std::ios::binary);
        if (!in) throw IoFailure("cannot read '" + file.string() + "'");
        LoadResult result = load_table(in, kind, cfg.schema_for(kind), codes);
        for (const auto& e : result.errors)
            err << format_row_warning(file.filename().string(), e) << "\n";
        run.row_errors += result.errors.size();
        // Exports are usually time-ordered already; make it a guarantee.
        std::stable_sort(result.events.begin(), result.events.end(),
                         [](const SensorEvent& a, const SensorEvent& b) {
                             if (a.ts != b.ts) return a.ts < b.ts;
                             return a.row_id < b.row_id;
                         });
        streams.push_back(std::move(result.events));
    }
    if (!any_table)
        throw ConfigError("no sensor tables (*.csv) found under '" + cfg.input_dir + "'");

    auto merged = merge_chronological(std::move(streams));
    merged = apply_device_filter(std::move(merged), cfg.device_id);
    if (merged.empty()) throw ConfigError("no events left after device filtering");
    run.device_id = cfg.device_id ? *cfg.device_id : merged.front().device_id;

    auto [events, persons] = assign_person_ids(std::move(merged));
    run.events = std::move(events);
    run.persons = std::move(persons);
    return run;
}

PlaceMap load_places(const RunConfig& cfg) {
    if (!cfg.place_map_path) return {};
    std::ifstream in(*cfg.place_map_path);
    if (!in) throw IoFailure("cannot read place map '" + *cfg.place_map_path + "'");
    return load_place_map(in);
}

std::vector<LocalDate> dates_in(const DateRange& range, const std::vector<SensorEvent>& events,
                                const Timezone& zone) {
    LocalDate from, to;
    if (range.from && range.to) {
        from = *range.from;
        to = *range.to;
    } else {
        if (events.empty()) throw ConfigError("no events to derive a date range from");
        from = range.from ? *range.from : zone.local_date(events.front().ts);
        to = range.to ? *range.to : zone.local_date(events.back().ts);
    }
    if (to < from) throw ConfigError("date range end precedes start");
    std::vector<LocalDate> dates;
    for (LocalDate d = from; d <= to; d = next_day(d)) dates.push_back(d);
    return dates;
}

std::vector<LocalDate> explicit_dates(const DateRange& range) {
    if (!range.from || !range.to) throw ConfigError("both --from and --to are required");
    if (*range.to < *range.from) throw ConfigError("date range end precedes start");
    std::vector<LocalDate> dates;
    for (LocalDate d = *range.from; d <= *range.to; d = next_day(d)) dates.push_back(d);
    return dates;
}

fs::path device_dir(const RunConfig& cfg, const std::string& device) {
    return fs::path(cfg.output_dir) / device;
}

fs::path narrative_path(const RunConfig& cfg, const std::string& device, const LocalDate& date) {
    return device_dir(cfg, device) / (to_iso(date) + ".txt");
}

std::string require_device(const RunConfig& cfg) {
    if (cfg.device_id) return *cfg.device_id;
    // A run with a single narrated device is unambiguous.
    std::vector<std::string> candidates;
    std::error_code ec;
    for (const auto& entry : fs::directory_iterator(cfg.output_dir, ec))
        if (entry.is_directory()) candidates.push_back(entry.path().filename().string());
    if (candidates.size() == 1) return candidates.front();
    throw ConfigError("cannot infer the device id, pass --device");
}

// Reads a day's narrative back; empty optional when the file is missing or
// holds no lines. Trailing newline is stripped so prompt data matches the
// in-memory serialization.
std::optional<std::string> read_narrative(const fs::path& path) {
    if (!fs::exists(path)) return std::nullopt;
    std::string text = read_file(path);
    while (!text.empty() && (text.back() == '\n' || text.back() == '\r')) text.pop_back();
    if (text.empty()) return std::nullopt;
    return text;
}

void warn_tokens(const RunConfig& cfg, const PromptBundle& bundle, std::ostream& err) {
    if (cfg.max_tokens_warn > 0 && bundle.token_estimate > cfg.max_tokens_warn)
        err << "WARN prompt estimates " << bundle.token_estimate << " tokens (limit hint "
            << cfg.max_tokens_warn << ")\n";
}

int run_guarded(std::ostream& err, const std::function<int()>& body) {
    try {
        return body();
    } catch (const ParseError& e) {
        err << "error: " << e.what() << "\n";
        return kExitParse;
    } catch (const ProviderError& e) {
        err << "error: " << e.what() << "\n";
        return kExitProvider;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitFatal;
    }
}

}  // namespace

int cmd_narrate(const RunConfig& cfg, const DateRange& range, std::ostream& out,
                std::ostream& err) {
    return run_guarded(err, [&] {
        const Timezone zone = cfg.make_timezone();
        LoadedRun run = load_run(cfg, err);
        const GeoPipeline geo(run.events, load_places(cfg), cfg.geo, zone);

        NarrateOptions opts;
        opts.privacy = cfg.privacy;
        opts.keyboard_gap_s = cfg.keyboard_gap_s;
        opts.datetime_format = cfg.datetime_format;

        const auto dates = dates_in(range, run.events, zone);

        // Rendering is pure, so days fan out; writes stay in date order.
        std::vector<std::future<std::string>> rendered;
        rendered.reserve(dates.size());
        for (const LocalDate& date : dates)
            rendered.push_back(std::async(std::launch::async | std::launch::deferred, [&, date] {
                const NarrativeDocument doc =
                    narrate_day(run.events, date, geo, run.persons, opts, zone);
                std::string text = to_text(doc, zone, opts.datetime_format);
                if (!text.empty()) text += '\n';
                return text;
            }));

        for (std::size_t i = 0; i < dates.size(); ++i) {
            const std::string text = rendered[i].get();
            atomic_write(narrative_path(cfg, run.device_id, dates[i]), text);
            const auto lines = std::count(text.begin(), text.end(), '\n');
            out << to_iso(dates[i]) << ": " << lines << " lines\n";
        }
        return run.row_errors ? kExitPartialData : kExitOk;
    });
}

int cmd_summarize(const RunConfig& cfg, const DateRange& range, std::ostream& out,
                  std::ostream& err) {
    return run_guarded(err, [&] {
        const std::string device = require_device(cfg);
        for (const LocalDate& date : explicit_dates(range)) {
            const auto text = read_narrative(narrative_path(cfg, device, date));
            if (!text) {
                err << "WARN no narrative for " << to_iso(date) << ", skipped\n";
                continue;
            }
            const PromptBundle prompt = build_daily_summary_prompt(*text);
            warn_tokens(cfg, prompt, err);
            const std::string summary = complete(prompt, cfg.provider);
            atomic_write(device_dir(cfg, device) / "summaries" / (to_iso(date) + ".md"),
                         summary + "\n");
            out << to_iso(date) << ": summarized\n";
        }
        return kExitOk;
    });
}

int cmd_predict(const RunConfig& cfg, const std::string& scale, const DateRange& range,
                std::ostream& out, std::ostream& err) {
    return run_guarded(err, [&] {
        if (scale != "dass" && scale != "panas")
            throw ConfigError("scale must be 'dass' or 'panas', got '" + scale + "'");
        const std::string device = require_device(cfg);
        const auto dates = explicit_dates(range);
        if (dates.size() > 7) throw ConfigError("predict works on at most 7 days");

        std::vector<std::string> summaries;
        for (const LocalDate& date : dates) {
            const auto text = read_narrative(narrative_path(cfg, device, date));
            if (!text) {
                err << "WARN no narrative for " << to_iso(date) << ", proceeding without it\n";
                continue;
            }
            if (cfg.raw_week) {
                summaries.push_back(*text);
                continue;
            }
            const PromptBundle prompt = build_daily_summary_prompt(*text);
            warn_tokens(cfg, prompt, err);
            const std::string summary = complete(prompt, cfg.provider);
            atomic_write(device_dir(cfg, device) / "summaries" / (to_iso(date) + ".md"),
                         summary + "\n");
            summaries.push_back(summary);
        }

        Warnings warnings;
        const PromptBundle prompt = scale == "dass" ? build_dass_prompt(summaries, &warnings)
                                                    : build_panas_prompt(summaries, &warnings);
        for (const auto& w : warnings) err << "WARN " << w << "\n";
        warn_tokens(cfg, prompt, err);

        const std::string reply = complete(prompt, cfg.provider);
        const fs::path dir = device_dir(cfg, device) / "predictions";
        atomic_write(dir / (scale + ".raw"), reply);

        try {
            std::string result;
            if (scale == "dass") {
                const DassPrediction p = parse_dass_response(reply);
                result = std::string("depression = ") + severity_name(p.depression) +
                         "\nanxiety = " + severity_name(p.anxiety) +
                         "\nstress = " + severity_name(p.stress) + "\n";
            } else {
                const PanasScores s = parse_panas_response(reply);
                for (std::size_t i = 0; i < 10; ++i) {
                    std::string affect = kPanasAffects[i];
                    std::transform(affect.begin(), affect.end(), affect.begin(),
                                   [](unsigned char c) { return std::tolower(c); });
                    result += "panas." + affect + " = " + std::to_string(s.values[i]) + "\n";
                }
            }
            atomic_write(dir / (scale + ".txt"), result);
            out << result;
        } catch (const ParseError& e) {
            // Keep the raw reply for inspection; record why parsing failed.
            atomic_write(dir / (scale + ".error"), std::string(e.what()) + "\n");
            throw;
        }
        return kExitOk;
    });
}

int cmd_ask(const RunConfig& cfg, const LocalDate& date, const std::string& question_or_category,
            std::ostream& out, std::ostream& err) {
    return run_guarded(err, [&] {
        const std::string device = require_device(cfg);
        const auto text = read_narrative(narrative_path(cfg, device, date));
        if (!text)
            throw ConfigError("no narrative for " + to_iso(date) + "; run narrate first");

        const QuestionBank bank;
        std::vector<std::string> questions;
        if (auto category = category_from_name(question_or_category)) {
            questions = bank.questions(*category);
        } else if (question_or_category.find(' ') == std::string::npos &&
                   question_or_category.find('?') == std::string::npos) {
            std::string valid;
            for (const auto c : bank.categories()) {
                if (!valid.empty()) valid += ", ";
                valid += category_name(c);
            }
            throw ConfigError("unknown question category '" + question_or_category +
                              "'; valid categories: " + valid);
        } else {
            questions.push_back(question_or_category);
        }

        for (const auto& question : questions) {
            const PromptBundle prompt = build_daily_question_prompt(question, *text);
            warn_tokens(cfg, prompt, err);
            out << "Q: " << question << "\n" << complete(prompt, cfg.provider) << "\n\n";
        }
        return kExitOk;
    });
}

int cmd_home(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    return run_guarded(err, [&] {
        const Timezone zone = cfg.make_timezone();
        LoadedRun run = load_run(cfg, err);
        const PlaceMap places = load_places(cfg);

        std::vector<GeoPoint> points;
        for (const auto& ev : run.events)
            if (const auto* loc = std::get_if<Location>(&ev.payload))
                points.push_back({loc->lat, loc->lon, ev.ts, loc->speed_mps});
        if (points.empty()) throw ConfigError("no location fixes in input");

        auto clusters = cluster_locations(points, cfg.geo.diameter_m);
        label_clusters(clusters, places, cfg.geo.max_snap_m);
        const HomeModel home = detect_home(clusters, points, cfg.geo.night_window, zone);

        const PlaceCluster* home_cluster = nullptr;
        for (const auto& c : clusters)
            if (c.id == home.home_cluster_id) home_cluster = &c;

        char buf[160];
        std::snprintf(buf, sizeof(buf), "home centroid: %.5f,%.5f (cluster %d)\n",
                      home_cluster->centroid_lat, home_cluster->centroid_lon,
                      home_cluster->id);
        out << buf;
        out << "nighttime fixes: " << home_cluster->nighttime_count << "\n";
        out << "clusters:\n";
        out << "id\tcentroid\tmembers\tnight\tlabel\n";
        for (const auto& c : clusters) {
            std::snprintf(buf, sizeof(buf), "%d\t%.5f,%.5f\t%zu\t%zu\t%s\n", c.id, c.centroid_lat,
                          c.centroid_lon, c.member_count, c.nighttime_count,
                          c.label ? c.label->c_str() : "-");
            out << buf;
        }
        return kExitOk;
    });
}

int cmd_questions(std::ostream& out) {
    out << QuestionBank().export_tsv();
    return kExitOk;
}

}  // namespace narrator::app
