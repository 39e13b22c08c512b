#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sstream>

#include "narrator/app.hpp"
#include "narrator/config.hpp"
#include "narrator/llm.hpp"
#include "narrator/prompts.hpp"
#include "narrator/sha256.hpp"
#include "temp_dir.hpp"

using namespace narrator;
using testsupport::TempDir;
using testsupport::slurp;

namespace {

RunConfig make_config(const KeyValues& extra) {
    return RunConfig::from_sources({}, extra, {});
}

// Minimal one-day input: a couple of screen events on 2023-09-14 (UTC).
void write_screen_csv(const TempDir& dir, const std::string& extra_rows = "") {
    dir.write("in/screen.csv",
              "_id,timestamp,device_id,screen_status\n"
              "1,1694683750000,dev-1,1\n"
              "2,1694683760000,dev-1,3\n"
              "3,1694683770000,dev-1,0\n" +
                  extra_rows);
}

}  // namespace

TEST_CASE("narrate: empty input dir is fatal") {
    TempDir tmp("cli-empty");
    std::filesystem::create_directories(tmp.path() / "in");
    std::ostringstream out, err;
    const int rc = app::cmd_narrate(make_config({{"run.input_dir", (tmp.path() / "in").string()},
                                                 {"run.output_dir", (tmp.path() / "out").string()}}),
                                    {}, out, err);
    CHECK(rc == app::kExitFatal);
    CHECK(err.str().find("error:") != std::string::npos);

    const int rc2 = app::cmd_narrate(
        make_config({{"run.input_dir", (tmp.path() / "missing").string()}}), {}, out, err);
    CHECK(rc2 == app::kExitFatal);
}

TEST_CASE("narrate: clean run writes files and reports line counts") {
    TempDir tmp("cli-ok");
    write_screen_csv(tmp);
    std::ostringstream out, err;
    const int rc = app::cmd_narrate(make_config({{"run.input_dir", (tmp.path() / "in").string()},
                                                 {"run.output_dir", (tmp.path() / "out").string()}}),
                                    {}, out, err);
    CHECK(rc == app::kExitOk);
    CHECK(out.str() == "2023-09-14: 3 lines\n");
    const std::string text = slurp(tmp.path() / "out" / "dev-1" / "2023-09-14.txt");
    CHECK(text ==
          "Thu Sep 14 09:29:10 | screen status | Phone screen turned on\n"
          "Thu Sep 14 09:29:20 | screen status | Phone screen unlocked\n"
          "Thu Sep 14 09:29:30 | screen status | Phone screen turned off\n");
}

TEST_CASE("narrate: malformed rows warn and exit 2, output still written") {
    TempDir tmp("cli-partial");
    write_screen_csv(tmp,
                     "4,badts,dev-1,1\n"
                     "5,1694683780000,dev-1,notanint\n"
                     "6,1694683790000,dev-1,42\n");
    std::ostringstream out, err;
    const int rc = app::cmd_narrate(make_config({{"run.input_dir", (tmp.path() / "in").string()},
                                                 {"run.output_dir", (tmp.path() / "out").string()}}),
                                    {}, out, err);
    CHECK(rc == app::kExitPartialData);
    std::size_t warnings = 0;
    std::istringstream err_lines(err.str());
    std::string line;
    while (std::getline(err_lines, line))
        if (line.rfind("WARN row ", 0) == 0) ++warnings;
    CHECK(warnings == 3);
    CHECK(err.str().find("in screen.csv:") != std::string::npos);
    CHECK(std::filesystem::exists(tmp.path() / "out" / "dev-1" / "2023-09-14.txt"));
}

TEST_CASE("narrate: datetime format is configurable") {
    TempDir tmp("cli-fmt");
    write_screen_csv(tmp);
    std::ostringstream out, err;
    const int rc = app::cmd_narrate(
        make_config({{"run.input_dir", (tmp.path() / "in").string()},
                     {"run.output_dir", (tmp.path() / "out").string()},
                     {"narrate.datetime_format", "yyyy-MM-dd HH:mm:ss"}}),
        {}, out, err);
    CHECK(rc == app::kExitOk);
    const std::string text = slurp(tmp.path() / "out" / "dev-1" / "2023-09-14.txt");
    CHECK(text.rfind("2023-09-14 09:29:10 | screen status | Phone screen turned on\n", 0) == 0);
}

TEST_CASE("predict with no narrated days at all is fatal") {
    TempDir tmp("cli-nosummaries");
    std::filesystem::create_directories(tmp.path() / "out" / "dev-1");
    std::ostringstream out, err;
    app::DateRange week;
    week.from = LocalDate{2023, 9, 11};
    week.to = LocalDate{2023, 9, 12};
    const int rc = app::cmd_predict(
        make_config({{"run.output_dir", (tmp.path() / "out").string()},
                     {"run.device_id", "dev-1"},
                     {"llm.provider", "mock"}}),
        "dass", week, out, err);
    CHECK(rc == app::kExitFatal);
    CHECK(err.str().find("no daily summaries") != std::string::npos);
}

TEST_CASE("narrate: mixed devices need a filter") {
    TempDir tmp("cli-mixed");
    tmp.write("in/screen.csv",
              "_id,timestamp,device_id,screen_status\n"
              "1,1694683750000,dev-1,1\n"
              "2,1694683760000,dev-2,0\n");
    std::ostringstream out, err;
    KeyValues base{{"run.input_dir", (tmp.path() / "in").string()},
                   {"run.output_dir", (tmp.path() / "out").string()}};
    CHECK(app::cmd_narrate(make_config(base), {}, out, err) == app::kExitFatal);

    base["run.device_id"] = "dev-2";
    CHECK(app::cmd_narrate(make_config(base), {}, out, err) == app::kExitOk);
    CHECK(std::filesystem::exists(tmp.path() / "out" / "dev-2" / "2023-09-14.txt"));
}

TEST_CASE("summarize and predict run the mock chain end to end") {
    TempDir tmp("cli-predict");
    write_screen_csv(tmp);
    KeyValues base{{"run.input_dir", (tmp.path() / "in").string()},
                   {"run.output_dir", (tmp.path() / "out").string()},
                   {"llm.provider", "mock"}};
    std::ostringstream out, err;
    REQUIRE(app::cmd_narrate(make_config(base), {}, out, err) == app::kExitOk);

    app::DateRange day;
    day.from = day.to = LocalDate{2023, 9, 14};

    SUBCASE("summarize writes the summary file") {
        const int rc = app::cmd_summarize(make_config(base), day, out, err);
        CHECK(rc == app::kExitOk);
        const std::string summary =
            slurp(tmp.path() / "out" / "dev-1" / "summaries" / "2023-09-14.md");
        CHECK(summary.rfind("Mock summary ", 0) == 0);
    }

    SUBCASE("summarize without a range is a usage error") {
        CHECK(app::cmd_summarize(make_config(base), {}, out, err) == app::kExitFatal);
    }

    SUBCASE("predict dass writes key-value results plus the raw sidecar") {
        const int rc = app::cmd_predict(make_config(base), "dass", day, out, err);
        CHECK(rc == app::kExitOk);
        const auto dir = tmp.path() / "out" / "dev-1" / "predictions";
        const std::string result = slurp(dir / "dass.txt");
        CHECK(result.find("depression = ") != std::string::npos);
        CHECK(result.find("anxiety = ") != std::string::npos);
        CHECK(result.find("stress = ") != std::string::npos);
        CHECK(std::filesystem::exists(dir / "dass.raw"));
        CHECK_NOTHROW(parse_dass_response(slurp(dir / "dass.raw")));
    }

    SUBCASE("predict panas writes all ten affects") {
        const int rc = app::cmd_predict(make_config(base), "panas", day, out, err);
        CHECK(rc == app::kExitOk);
        const std::string result =
            slurp(tmp.path() / "out" / "dev-1" / "predictions" / "panas.txt");
        for (const char* affect : kPanasAffects) {
            std::string lower = affect;
            for (auto& c : lower) c = static_cast<char>(std::tolower(c));
            CHECK(result.find("panas." + lower + " = ") != std::string::npos);
        }
    }

    SUBCASE("missing days inside the week warn and proceed") {
        app::DateRange week;
        week.from = LocalDate{2023, 9, 11};
        week.to = LocalDate{2023, 9, 17};
        const int rc = app::cmd_predict(make_config(base), "dass", week, out, err);
        CHECK(rc == app::kExitOk);
        CHECK(err.str().find("WARN no narrative for 2023-09-11") != std::string::npos);
        CHECK(err.str().find("built from only 1 daily summaries") != std::string::npos);
    }

    SUBCASE("raw_week feeds narratives straight into the weekly prompt") {
        KeyValues cfg = base;
        cfg["prompts.raw_week"] = "true";
        const int rc = app::cmd_predict(make_config(cfg), "dass", day, out, err);
        CHECK(rc == app::kExitOk);
        // No summary calls were made, so no summaries directory appears.
        CHECK_FALSE(std::filesystem::exists(tmp.path() / "out" / "dev-1" / "summaries"));
        CHECK(std::filesystem::exists(tmp.path() / "out" / "dev-1" / "predictions" / "dass.txt"));
    }

    SUBCASE("oversized prompts trigger the token warning") {
        KeyValues cfg = base;
        cfg["prompts.max_tokens_warn"] = "1";
        std::ostringstream warn_err;
        CHECK(app::cmd_summarize(make_config(cfg), day, out, warn_err) == app::kExitOk);
        CHECK(warn_err.str().find("WARN prompt estimates") != std::string::npos);
    }

    SUBCASE("bad scale and oversized ranges are usage errors") {
        CHECK(app::cmd_predict(make_config(base), "bogus", day, out, err) == app::kExitFatal);
        app::DateRange long_range;
        long_range.from = LocalDate{2023, 9, 1};
        long_range.to = LocalDate{2023, 9, 30};
        CHECK(app::cmd_predict(make_config(base), "dass", long_range, out, err) ==
              app::kExitFatal);
    }
}

TEST_CASE("predict: canned fixtures drive the reply, unparseable replies exit 4") {
    TempDir tmp("cli-fixture");
    write_screen_csv(tmp);
    KeyValues base{{"run.input_dir", (tmp.path() / "in").string()},
                   {"run.output_dir", (tmp.path() / "out").string()},
                   {"llm.provider", "mock"}};
    std::ostringstream out, err;
    REQUIRE(app::cmd_narrate(make_config(base), {}, out, err) == app::kExitOk);

    // Reconstruct the exact weekly prompt the command will send: the mock
    // summary is itself a function of the daily-summary prompt hash.
    std::string narrative = slurp(tmp.path() / "out" / "dev-1" / "2023-09-14.txt");
    while (!narrative.empty() && narrative.back() == '\n') narrative.pop_back();
    const PromptBundle summary_prompt = build_daily_summary_prompt(narrative);
    const std::string summary = "Mock summary " + sha256_hex(summary_prompt.text).substr(0, 12) + ".";
    const PromptBundle dass_prompt = build_dass_prompt({summary}, nullptr);

    app::DateRange day;
    day.from = day.to = LocalDate{2023, 9, 14};

    SUBCASE("Fig-6-format canned reply lands in the result file") {
        tmp.write("replies/dass.txt", "Depression: Moderate\nAnxiety: Mild\nStress: Normal");
        tmp.write("fixtures.tsv", sha256_hex(dass_prompt.text) + "\treplies/dass.txt");
        KeyValues cfg = base;
        cfg["llm.mock_fixtures"] = (tmp.path() / "fixtures.tsv").string();
        const int rc = app::cmd_predict(make_config(cfg), "dass", day, out, err);
        CHECK(rc == app::kExitOk);
        CHECK(slurp(tmp.path() / "out" / "dev-1" / "predictions" / "dass.txt") ==
              "depression = Moderate\nanxiety = Mild\nstress = Normal\n");
    }

    SUBCASE("unparseable reply preserves the raw bytes and exits 4") {
        tmp.write("replies/garbage.txt", "I would rather talk about the weather.");
        tmp.write("fixtures.tsv", sha256_hex(dass_prompt.text) + "\treplies/garbage.txt");
        KeyValues cfg = base;
        cfg["llm.mock_fixtures"] = (tmp.path() / "fixtures.tsv").string();
        const int rc = app::cmd_predict(make_config(cfg), "dass", day, out, err);
        CHECK(rc == app::kExitParse);
        const auto dir = tmp.path() / "out" / "dev-1" / "predictions";
        CHECK(slurp(dir / "dass.raw") == "I would rather talk about the weather.");
        CHECK(std::filesystem::exists(dir / "dass.error"));
        CHECK_FALSE(std::filesystem::exists(dir / "dass.txt"));
    }
}

TEST_CASE("provider failure surfaces as exit 3") {
    TempDir tmp("cli-prov");
    write_screen_csv(tmp);
    KeyValues base{{"run.input_dir", (tmp.path() / "in").string()},
                   {"run.output_dir", (tmp.path() / "out").string()},
                   {"llm.provider", "openai"},
                   {"llm.endpoint", "http://127.0.0.1:1"},
                   {"llm.model", "m"},
                   {"llm.api_key", "k"},
                   {"llm.timeout_s", "0.2"},
                   {"llm.max_retries", "0"},
                   {"llm.backoff_s", "0.01"}};
    std::ostringstream out, err;
    REQUIRE(app::cmd_narrate(make_config(base), {}, out, err) == app::kExitOk);
    app::DateRange day;
    day.from = day.to = LocalDate{2023, 9, 14};
    CHECK(app::cmd_summarize(make_config(base), day, out, err) == app::kExitProvider);
    CHECK(app::cmd_predict(make_config(base), "dass", day, out, err) == app::kExitProvider);
}

TEST_CASE("ask: categories fan out, unknown categories list the options") {
    TempDir tmp("cli-ask");
    write_screen_csv(tmp);
    KeyValues base{{"run.input_dir", (tmp.path() / "in").string()},
                   {"run.output_dir", (tmp.path() / "out").string()},
                   {"llm.provider", "mock"}};
    std::ostringstream narrate_out, err;
    REQUIRE(app::cmd_narrate(make_config(base), {}, narrate_out, err) == app::kExitOk);

    const LocalDate day{2023, 9, 14};

    std::ostringstream sleep_out;
    CHECK(app::cmd_ask(make_config(base), day, "sleep", sleep_out, err) == app::kExitOk);
    std::size_t replies = 0;
    std::istringstream lines(sleep_out.str());
    std::string line;
    while (std::getline(lines, line))
        if (line.rfind("Q: ", 0) == 0) ++replies;
    CHECK(replies == 2);  // the two sleep questions

    std::ostringstream literal_out;
    CHECK(app::cmd_ask(make_config(base), day, "How long did the person sleep?", literal_out,
                       err) == app::kExitOk);
    CHECK(literal_out.str().find("Q: How long did the person sleep?") == 0);

    std::ostringstream unknown_err;
    CHECK(app::cmd_ask(make_config(base), day, "sloop", std::cout, unknown_err) ==
          app::kExitFatal);
    CHECK(unknown_err.str().find("smartphone_usage") != std::string::npos);
    CHECK(unknown_err.str().find("analysis") != std::string::npos);

    std::ostringstream missing_err;
    CHECK(app::cmd_ask(make_config(base), LocalDate{2023, 9, 15}, "sleep", std::cout,
                       missing_err) == app::kExitFatal);
}

TEST_CASE("home: reports the night cluster, labels, and failure modes") {
    TempDir tmp("cli-home");
    // Night fixes at one spot, day fixes 1 km away.
    std::string csv = "_id,timestamp,device_id,double_latitude,double_longitude,double_speed\n";
    int id = 1;
    for (int i = 0; i < 8; ++i)  // 21:00 UTC on 2023-09-13
        csv += std::to_string(id++) + "," + std::to_string(1694638800000LL + i * 60000) +
               ",dev-1,-37.77218,144.96310,0\n";
    for (int i = 0; i < 3; ++i)  // noon fixes away from home
        csv += std::to_string(id++) + "," + std::to_string(1694606400000LL + i * 60000) +
               ",dev-1,-37.76319,144.96310,0\n";
    tmp.write("in/locations.csv", csv);
    tmp.write("places.csv", "lat,lon,label\n-37.77218,144.96310,22 Example St\n");

    KeyValues base{{"run.input_dir", (tmp.path() / "in").string()},
                   {"run.output_dir", (tmp.path() / "out").string()},
                   {"run.place_map", (tmp.path() / "places.csv").string()}};
    std::ostringstream out, err;
    CHECK(app::cmd_home(make_config(base), out, err) == app::kExitOk);
    CHECK(out.str().find("home centroid: -37.77218,144.96310") != std::string::npos);
    CHECK(out.str().find("nighttime fixes: 8") != std::string::npos);
    CHECK(out.str().find("22 Example St") != std::string::npos);

    // Daytime-only data cannot resolve a home.
    TempDir day_only("cli-home-day");
    std::string daytime = "_id,timestamp,device_id,double_latitude,double_longitude,double_speed\n";
    for (int i = 0; i < 4; ++i)
        daytime += std::to_string(i + 1) + "," + std::to_string(1694606400000LL + i * 60000) +
                   ",dev-1,-37.7,144.9,0\n";
    day_only.write("in/locations.csv", daytime);
    std::ostringstream out2, err2;
    CHECK(app::cmd_home(make_config({{"run.input_dir", (day_only.path() / "in").string()}}), out2,
                        err2) == app::kExitFatal);
    CHECK(err2.str().find("nighttime") != std::string::npos);
}

TEST_CASE("questions command prints the bank") {
    std::ostringstream out;
    CHECK(app::cmd_questions(out) == app::kExitOk);
    const std::string tsv = out.str();
    CHECK(tsv.find("sleep\tProvide an estimation") != std::string::npos);
    CHECK(std::count(tsv.begin(), tsv.end(), '\n') == 17);
}

TEST_CASE("commands never mutate input files") {
    TempDir tmp("cli-immutable");
    write_screen_csv(tmp);
    const std::string before = slurp(tmp.path() / "in" / "screen.csv");
    std::ostringstream out, err;
    REQUIRE(app::cmd_narrate(make_config({{"run.input_dir", (tmp.path() / "in").string()},
                                          {"run.output_dir", (tmp.path() / "out").string()}}),
                             {}, out, err) == app::kExitOk);
    CHECK(slurp(tmp.path() / "in" / "screen.csv") == before);
}
