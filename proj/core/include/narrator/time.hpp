#pragma once

#include <cstdint>
#include <compare>
#include <string>

namespace narrator {

// Milliseconds since the Unix epoch, UTC. All sensor tables store this.
struct Timestamp {
    std::int64_t epoch_ms = 0;

    constexpr auto operator<=>(const Timestamp&) const = default;

    constexpr std::int64_t epoch_s() const { return epoch_ms / 1000; }
};

// A calendar date in the run timezone.
struct LocalDate {
    int year = 1970;
    int month = 1;  // 1..12
    int day = 1;    // 1..31

    constexpr auto operator<=>(const LocalDate&) const = default;
};

std::string to_iso(const LocalDate& d);          // YYYY-MM-DD
LocalDate parse_iso_date(const std::string& s);  // throws ConfigError

// Proleptic Gregorian civil-date conversions (Howard Hinnant's algorithms).
std::int64_t days_from_civil(int y, int m, int d);
LocalDate civil_from_days(std::int64_t z);
LocalDate next_day(const LocalDate& d);

// Epoch milliseconds for a civil UTC datetime. Handy for fixtures and tests.
std::int64_t utc_epoch_ms(int y, int mo, int d, int h, int mi, int s, int ms = 0);

// Broken-down local wall-clock time.
struct LocalParts {
    int year;
    int month;    // 1..12
    int day;      // 1..31
    int hour;     // 0..23
    int minute;   // 0..59
    int second;   // 0..59
    int weekday;  // 0 = Sunday .. 6 = Saturday

    LocalDate date() const { return {year, month, day}; }
    int second_of_day() const { return hour * 3600 + minute * 60 + second; }
};

// One IANA timezone per run converts epoch timestamps to wall-clock time.
// Conversions go through the process tz database state behind a lock, so a
// run may only ever use the single configured zone but tests may construct
// several Timezone objects sequentially.
class Timezone {
public:
    // Validates the IANA name against the system zoneinfo database.
    // "UTC" is always accepted. Throws ConfigError for unknown names.
    explicit Timezone(std::string iana_name = "UTC");

    const std::string& name() const { return name_; }

    LocalParts parts(Timestamp ts) const;
    LocalDate local_date(Timestamp ts) const { return parts(ts).date(); }

    // Renders `ts` through a compact pattern language:
    //   EEE weekday abbrev   MMM month abbrev   yyyy year
    //   d / dd   day of month (unpadded / padded)
    //   M / MM   month number (unpadded / padded)
    //   HH mm ss hour / minute / second, zero padded
    // Any other character is copied through verbatim.
    std::string format(Timestamp ts, const std::string& pattern) const;

private:
    std::string name_;
};

}  // namespace narrator
