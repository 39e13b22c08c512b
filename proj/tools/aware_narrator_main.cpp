// Command-line front end for the narrator pipeline: narrate sensor CSVs,
// query and summarize the resulting narratives, and run the weekly
// DASS-21 / I-PANAS-SF prediction prompts.

#include <CLI11.hpp>
#include <iostream>
#include <optional>
#include <string>

#include "narrator/app.hpp"
#include "narrator/config.hpp"
#include "narrator/errors.hpp"

using namespace narrator;

namespace {

struct CliState {
    std::string config_path;
    KeyValues flags;
    std::string from, to;

    std::string scale;     // predict
    std::string date;      // ask
    std::string question;  // ask
};

app::DateRange parse_range(const CliState& state) {
    app::DateRange range;
    if (!state.from.empty()) range.from = parse_iso_date(state.from);
    if (!state.to.empty()) range.to = parse_iso_date(state.to);
    return range;
}

RunConfig assemble_config(const CliState& state) {
    KeyValues file;
    if (!state.config_path.empty()) file = load_config_file(state.config_path);
    return RunConfig::from_sources(file, state.flags, RunConfig::environment_overrides());
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App cli{"AWARE Narrator: smartphone sensing tables to daily English narratives, "
                 "with LLM question, summary, and psychometric-prediction prompts"};
    cli.require_subcommand(1);
    cli.fallthrough();

    CliState state;

    cli.add_option("--config", state.config_path, "key-value config file (section.key = value)");
    auto add_kv = [&](const char* flag, const char* key, const char* help) {
        cli.add_option_function<std::string>(
               flag, [&state, key](const std::string& v) { state.flags[key] = v; }, help)
            ->expected(1);
    };
    add_kv("--input", "run.input_dir", "directory of per-sensor CSV files");
    add_kv("--output", "run.output_dir", "output root (default: out)");
    add_kv("--device", "run.device_id", "device id to narrate");
    add_kv("--tz", "geo.timezone", "IANA timezone for rendering (default: UTC)");
    add_kv("--place-map", "run.place_map", "CSV of lat,lon,label place labels");
    add_kv("--provider", "llm.provider", "openai | gemini | anthropic | mock");
    add_kv("--endpoint", "llm.endpoint", "provider base URL");
    add_kv("--model", "llm.model", "provider model name");
    add_kv("--mock-fixtures", "llm.mock_fixtures", "mock reply table (sha256<TAB>path)");

    auto add_privacy = [&](const char* flag, const char* key, const char* help) {
        cli.add_flag_callback(
            flag, [&state, key] { state.flags[key] = "false"; }, help);
    };
    add_privacy("--no-notification-text", "privacy.include_notification_text",
                "mask notification content");
    add_privacy("--no-keyboard-text", "privacy.include_keyboard_text", "mask typed text");
    add_privacy("--no-place-labels", "privacy.include_place_labels", "mask place labels");
    add_privacy("--no-network-names", "privacy.include_network_names",
                "mask wifi/bluetooth names");
    cli.add_flag_callback(
        "--raw-week", [&state] { state.flags["prompts.raw_week"] = "true"; },
        "feed raw daily narratives to weekly prompts instead of summaries");

    cli.add_option("--from", state.from, "first date, YYYY-MM-DD");
    cli.add_option("--to", state.to, "last date, YYYY-MM-DD");

    auto* narrate = cli.add_subcommand("narrate", "convert sensor CSVs to daily narratives");
    auto* summarize = cli.add_subcommand("summarize", "summarize narrated days via the provider");
    auto* predict = cli.add_subcommand("predict", "weekly DASS-21 / I-PANAS-SF prediction");
    predict->add_option("scale", state.scale, "dass | panas")->required();
    auto* ask = cli.add_subcommand("ask", "ask one question (or a bank category) about a day");
    ask->add_option("date", state.date, "YYYY-MM-DD")->required();
    ask->add_option("question", state.question, "literal question or category name")->required();
    auto* home = cli.add_subcommand("home", "report the detected home cluster");
    auto* questions = cli.add_subcommand("questions", "print the built-in question bank");

    try {
        cli.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        // --help exits 0; every usage error maps onto the fatal exit code.
        const int code = cli.exit(e);
        return code == 0 ? 0 : app::kExitFatal;
    }

    try {
        if (questions->parsed()) return app::cmd_questions(std::cout);

        const RunConfig cfg = assemble_config(state);
        if (narrate->parsed())
            return app::cmd_narrate(cfg, parse_range(state), std::cout, std::cerr);
        if (summarize->parsed())
            return app::cmd_summarize(cfg, parse_range(state), std::cout, std::cerr);
        if (predict->parsed())
            return app::cmd_predict(cfg, state.scale, parse_range(state), std::cout, std::cerr);
        if (ask->parsed())
            return app::cmd_ask(cfg, parse_iso_date(state.date), state.question, std::cout,
                                std::cerr);
        if (home->parsed()) return app::cmd_home(cfg, std::cout, std::cerr);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return app::kExitFatal;
    }
    return app::kExitFatal;
}
