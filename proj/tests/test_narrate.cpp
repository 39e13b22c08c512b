#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <regex>
#include <sstream>

#include "narrator/app.hpp"
#include "narrator/config.hpp"
#include "narrator/errors.hpp"
#include "narrator/narrate.hpp"
#include "oracles.hpp"
#include "temp_dir.hpp"

using namespace narrator;
using testsupport::TempDir;

namespace {

const Timezone utc("UTC");
const PersonRegistry no_persons;
const PrivacyConfig all_on;

std::string render(const Renderable& event, const PrivacyConfig& privacy = all_on) {
    return render_line(Timestamp{utc_epoch_ms(2023, 9, 14, 9, 29, 10)}, event, no_persons, privacy)
        .serialize(utc);
}

std::filesystem::path golden_dir() {
    return std::filesystem::path(NARRATOR_FIXTURES_DIR) / "golden";
}

}  // namespace

TEST_CASE("templates render the documented sentences") {
    CHECK(render(ApplicationForeground{"One UI Home", "pkg", true}) ==
          "Thu Sep 14 09:29:10 | applications | Opened the app One UI Home");

    CHECK(render(Notification{"Call", std::nullopt}) ==
          "Thu Sep 14 09:29:10 | notifications | Received a notification from the Call");
    CHECK(render(Notification{"Mail", "see you at 5"}) ==
          "Thu Sep 14 09:29:10 | notifications | Received a notification from the Mail. The "
          "content of the notification was see you at 5");

    BatteryEmission charging;
    charging.ts = Timestamp{utc_epoch_ms(2023, 9, 14, 9, 29, 10)};
    charging.kind = BatteryEmission::Kind::StatusChange;
    charging.status = BatteryStatus::StartedCharging;
    charging.level = 55;
    CHECK(render(charging) ==
          "Thu Sep 14 09:29:10 | battery | The phone started charging, the battery level was 55");

    CHECK(render(Bluetooth{"JBL Flip", BluetoothMode::Detected}) ==
          "Thu Sep 14 09:29:10 | bluetooth | Detected the nearby bluetooth device JBL Flip");
    CHECK(render(Bluetooth{std::nullopt, BluetoothMode::Detected}) ==
          "Thu Sep 14 09:29:10 | bluetooth | Detected a nearby bluetooth device");
    CHECK(render(Bluetooth{"Buds", BluetoothMode::Connected}) ==
          "Thu Sep 14 09:29:10 | bluetooth | Connected to the bluetooth device Buds");
    CHECK(render(Bluetooth{std::nullopt, BluetoothMode::Connected}) ==
          "Thu Sep 14 09:29:10 | bluetooth | Connected to a bluetooth device");

    CHECK(render(Call{CallDirection::Outgoing, "t", 610, 6}) ==
          "Thu Sep 14 09:29:10 | calls | Made a phone call to person 6. The call lasted 610 "
          "seconds");
    CHECK(render(Call{CallDirection::Incoming, "t", 12, 2}) ==
          "Thu Sep 14 09:29:10 | calls | Received a phone call from person 2. The call lasted 12 "
          "seconds");
    CHECK(render(Call{CallDirection::Missed, "t", 0, 3}) ==
          "Thu Sep 14 09:29:10 | calls | Missed a call from person 3. The call lasted 0 seconds");

    CHECK(render(Installation{"Spotify", InstallAction::Updated}) ==
          "Thu Sep 14 09:29:10 | installations | Spotify was updated");

    KeyboardSession session;
    session.final_text = "see you soon";
    CHECK(render(session) ==
          "Thu Sep 14 09:29:10 | keyboard | Entered the following text into the phone keyboard: "
          "see you soon");

    CHECK(render(Message{MessageDirection::Received, "t", 4}) ==
          "Thu Sep 14 09:29:10 | messages | Received a message from person 4");
    CHECK(render(Message{MessageDirection::Sent, "t", 4}) ==
          "Thu Sep 14 09:29:10 | messages | Sent a message to person 4");

    CHECK(render(Screen{ScreenStatus::Unlocked}) ==
          "Thu Sep 14 09:29:10 | screen status | Phone screen unlocked");
    CHECK(render(Screen{ScreenStatus::Off}) ==
          "Thu Sep 14 09:29:10 | screen status | Phone screen turned off");

    CHECK(render(Touch{TouchAction::ScrolledDown, "feed", "Instagram"}) ==
          "Thu Sep 14 09:29:10 | touch | Scrolled down within a view feed in the app Instagram");
    CHECK(render(Touch{TouchAction::Clicked, std::nullopt, "Maps"}) ==
          "Thu Sep 14 09:29:10 | touch | Clicked in the app Maps");

    CHECK(render(Wifi{"WiFi-A3E2", WifiMode::Detected}) ==
          "Thu Sep 14 09:29:10 | wifi | Detected the nearby wifi network \"WiFi-A3E2\"");
    CHECK(render(Wifi{std::nullopt, WifiMode::Detected}) ==
          "Thu Sep 14 09:29:10 | wifi | Detected a nearby wifi network");
    CHECK(render(Wifi{"<unknown ssid>", WifiMode::Connected}) ==
          "Thu Sep 14 09:29:10 | wifi | Connected to the wifi network <unknown ssid>");
    CHECK(render(Wifi{std::nullopt, WifiMode::Connected}) ==
          "Thu Sep 14 09:29:10 | wifi | Connected to a wifi network");
}

TEST_CASE("location rendering variants") {
    LocationNarration at_home;
    at_home.is_home = true;
    at_home.status = MovementStatus::Stopping;
    CHECK(render(LocatedFix{at_home}) ==
          "Thu Sep 14 09:29:10 | locations | home, stopping");

    LocationNarration away;
    away.place_label = "X Sydney Rd, Coburg VIC 3058";
    away.coordinates = "-37.74430,144.96310";
    away.distance_from_home_m = 3099.9;
    away.status = MovementStatus::Stopping;
    CHECK(render(LocatedFix{away}) ==
          "Thu Sep 14 09:29:10 | locations | X Sydney Rd, Coburg VIC 3058, 3099.9m from home, "
          "stopping");

    away.status = MovementStatus::RidingVehicle;
    CHECK(render(LocatedFix{away}).find("riding vehicle") != std::string::npos);

    // Home unknown: no distance clause.
    LocationNarration no_home;
    no_home.place_label = "Main Campus";
    no_home.coordinates = "-37.80000,144.96000";
    no_home.status = MovementStatus::Walking;
    CHECK(render(LocatedFix{no_home}) ==
          "Thu Sep 14 09:29:10 | locations | Main Campus, walking");

    // No label resolves: coordinates with 5 decimals.
    LocationNarration bare;
    bare.coordinates = "-37.80000,144.96000";
    bare.distance_from_home_m = 11.0;
    CHECK(render(LocatedFix{bare}) ==
          "Thu Sep 14 09:29:10 | locations | -37.80000,144.96000, 11.0m from home, stopping");
}

TEST_CASE("privacy flags strip the matching content") {
    PrivacyConfig masked;
    masked.include_notification_text = false;
    masked.include_keyboard_text = false;
    masked.include_place_labels = false;
    masked.include_network_names = false;

    CHECK(render(Notification{"Mail", "the secret content"}, masked) ==
          "Thu Sep 14 09:29:10 | notifications | Received a notification from the Mail");

    KeyboardSession session;
    session.final_text = "my private text";
    const std::string keyboard_line = render(session, masked);
    CHECK(keyboard_line.find("private") == std::string::npos);
    CHECK(keyboard_line ==
          "Thu Sep 14 09:29:10 | keyboard | Entered text into the phone keyboard");

    LocationNarration away;
    away.place_label = "Secret Cafe";
    away.coordinates = "-37.80000,144.96000";
    away.distance_from_home_m = 500.0;
    CHECK(render(LocatedFix{away}, masked).find("Secret Cafe") == std::string::npos);

    CHECK(render(Wifi{"SecretNet", WifiMode::Connected}, masked) ==
          "Thu Sep 14 09:29:10 | wifi | Connected to a wifi network");
    CHECK(render(Bluetooth{"SecretBuds", BluetoothMode::Detected}, masked) ==
          "Thu Sep 14 09:29:10 | bluetooth | Detected a nearby bluetooth device");
}

TEST_CASE("plain level samples get the neutral battery sentence") {
    BatteryEmission sample;
    sample.ts = Timestamp{utc_epoch_ms(2023, 9, 14, 9, 29, 10)};
    sample.kind = BatteryEmission::Kind::LocalExtremum;
    sample.status = BatteryStatus::LevelSample;
    sample.level = 48;
    CHECK(render(sample) ==
          "Thu Sep 14 09:29:10 | battery | The battery level changed, the battery level was 48");
}

TEST_CASE("call or message without a person ordinal is unsupported") {
    CHECK_THROWS_AS(render(Call{CallDirection::Incoming, "unseen-trace", 3, std::nullopt}),
                    UnsupportedEvent);
    PersonRegistry registry;
    registry.assign("known");
    const auto line = render_line(Timestamp{0}, Message{MessageDirection::Sent, "known", std::nullopt},
                                  registry, all_on);
    CHECK(line.description == "Sent a message to person 1");
}

TEST_CASE("write_document byte count and round trip") {
    NarrativeDocument doc;
    doc.date = {2023, 9, 14};
    CHECK(to_text(doc, utc).empty());
    std::ostringstream empty_sink;
    CHECK(write_document(doc, empty_sink, utc) == 0);

    doc.lines.push_back({Timestamp{utc_epoch_ms(2023, 9, 14, 1, 2, 3)}, "screen status",
                         "Phone screen locked"});
    doc.lines.push_back({Timestamp{utc_epoch_ms(2023, 9, 14, 1, 2, 4)}, "wifi",
                         "Detected a nearby wifi network"});
    std::ostringstream sink;
    const std::size_t bytes = write_document(doc, sink, utc);
    CHECK(bytes == sink.str().size());
    // Line lengths plus one terminator each.
    CHECK(bytes == doc.lines[0].serialize(utc).size() + doc.lines[1].serialize(utc).size() + 2);

    std::istringstream back(sink.str());
    std::string line;
    std::size_t i = 0;
    while (std::getline(back, line)) {
        const auto parsed = oracles::parse_narrative_line(line);
        REQUIRE(parsed.has_value());
        CHECK(parsed->label == doc.lines[i].sensor_label);
        CHECK(parsed->description == doc.lines[i].description);
        ++i;
    }
    CHECK(i == doc.lines.size());
}

TEST_CASE("every line matches the statement pattern") {
    const std::regex pattern(
        R"(^[A-Z][a-z]{2} [A-Z][a-z]{2} +\d{1,2} \d{2}:\d{2}:\d{2} \| [a-z ]+ \| .+$)");
    const std::vector<Renderable> events = {
        ApplicationForeground{"App", "pkg", false},
        Notification{"App", "content"},
        Bluetooth{"name", BluetoothMode::Connected},
        Call{CallDirection::Missed, "t", 0, 1},
        Installation{"App", InstallAction::Added},
        Message{MessageDirection::Sent, "t", 2},
        Screen{ScreenStatus::On},
        Touch{TouchAction::ClickedLonger, "button", "App"},
        Wifi{"net", WifiMode::Detected},
    };
    for (const auto& ev : events)
        CHECK(std::regex_match(render(ev), pattern));
}

namespace {

RunConfig golden_config(const std::filesystem::path& out_dir) {
    KeyValues flags;
    flags["run.input_dir"] = golden_dir().string();
    flags["run.output_dir"] = out_dir.string();
    flags["run.place_map"] = (golden_dir() / "place_map.csv").string();
    return RunConfig::from_sources({}, flags, {});
}

}  // namespace

TEST_CASE("golden: the fifteen-line day re-narrates byte for byte") {
    TempDir tmp("golden");
    std::ostringstream out, err;
    const int rc = app::cmd_narrate(golden_config(tmp.path()), {}, out, err);
    CHECK(rc == app::kExitOk);
    CHECK(err.str().empty());

    const std::string got = testsupport::slurp(tmp.path() / "d-0001" / "2023-09-14.txt");
    const std::string want = testsupport::slurp(golden_dir() / "expected_2023-09-14.txt");
    CHECK(got == want);

    // The System UI row in the fixture leaves no trace.
    CHECK(got.find("System UI") == std::string::npos);
}

TEST_CASE("narrate_day of one date is a subsequence of the full range output") {
    TempDir tmp("range");
    std::ostringstream out, err;

    // Full range (both fixture days).
    REQUIRE(app::cmd_narrate(golden_config(tmp.path()), {}, out, err) == app::kExitOk);
    std::string all;
    all += testsupport::slurp(tmp.path() / "d-0001" / "2023-09-13.txt");
    all += testsupport::slurp(tmp.path() / "d-0001" / "2023-09-14.txt");

    TempDir tmp_single("single");
    app::DateRange single;
    single.from = single.to = LocalDate{2023, 9, 14};
    REQUIRE(app::cmd_narrate(golden_config(tmp_single.path()), single, out, err) == app::kExitOk);
    const std::string day = testsupport::slurp(tmp_single.path() / "d-0001" / "2023-09-14.txt");

    CHECK(all.find(day) != std::string::npos);

    // A day with no events yields an empty document.
    TempDir tmp_empty("empty");
    app::DateRange empty_range;
    empty_range.from = empty_range.to = LocalDate{2023, 9, 20};
    REQUIRE(app::cmd_narrate(golden_config(tmp_empty.path()), empty_range, out, err) ==
            app::kExitOk);
    CHECK(testsupport::slurp(tmp_empty.path() / "d-0001" / "2023-09-20.txt").empty());
}

TEST_CASE("rendering is deterministic") {
    TempDir a("det-a"), b("det-b");
    std::ostringstream out, err;
    REQUIRE(app::cmd_narrate(golden_config(a.path()), {}, out, err) == app::kExitOk);
    REQUIRE(app::cmd_narrate(golden_config(b.path()), {}, out, err) == app::kExitOk);
    CHECK(testsupport::slurp(a.path() / "d-0001" / "2023-09-14.txt") ==
          testsupport::slurp(b.path() / "d-0001" / "2023-09-14.txt"));
    CHECK(testsupport::slurp(a.path() / "d-0001" / "2023-09-13.txt") ==
          testsupport::slurp(b.path() / "d-0001" / "2023-09-13.txt"));
}
