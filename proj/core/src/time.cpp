#include "narrator/time.hpp"

#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <mutex>

#include "narrator/errors.hpp"

namespace narrator {

namespace {

constexpr const char* kWeekdays[7] = {"Sun", "Mon", "Tue", "Wed", "Thu", "Fri", "Sat"};
constexpr const char* kMonths[12] = {"Jan", "Feb", "Mar", "Apr", "May", "Jun",
                                     "Jul", "Aug", "Sep", "Oct", "Nov", "Dec"};

std::mutex g_tz_mutex;
std::string g_active_tz;  // guarded by g_tz_mutex

// localtime_r does not re-read TZ on its own; switch + tzset under the lock.
void activate_zone_locked(const std::string& name) {
    if (g_active_tz == name) return;
    setenv("TZ", name.c_str(), 1);
    tzset();
    g_active_tz = name;
}

bool zone_exists(const std::string& name) {
    if (name == "UTC") return true;
    if (name.empty() || name.front() == '/' || name.find("..") != std::string::npos) return false;
    std::error_code ec;
    return std::filesystem::exists(std::filesystem::path("/usr/share/zoneinfo") / name, ec);
}

void append_padded(std::string& out, int v, int width) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%0*d", width, v);
    out += buf;
}

}  // namespace

std::string to_iso(const LocalDate& d) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%04d-%02d-%02d", d.year, d.month, d.day);
    return buf;
}

LocalDate parse_iso_date(const std::string& s) {
    int y = 0, m = 0, d = 0;
    char trailing = 0;
    if (std::sscanf(s.c_str(), "%d-%d-%d%c", &y, &m, &d, &trailing) != 3 || m < 1 || m > 12 ||
        d < 1 || d > 31)
        throw ConfigError("invalid date '" + s + "', expected YYYY-MM-DD");
    return {y, m, d};
}

std::int64_t days_from_civil(int y, int m, int d) {
    y -= m <= 2;
    const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = (153u * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

LocalDate civil_from_days(std::int64_t z) {
    z += 719468;
    const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
    const unsigned doe = static_cast<unsigned>(z - era * 146097);
    const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    const std::int64_t y = static_cast<std::int64_t>(yoe) + era * 400;
    const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    const unsigned mp = (5 * doy + 2) / 153;
    const unsigned d = doy - (153 * mp + 2) / 5 + 1;
    const unsigned m = mp + (mp < 10 ? 3 : -9);
    return {static_cast<int>(y + (m <= 2)), static_cast<int>(m), static_cast<int>(d)};
}

LocalDate next_day(const LocalDate& d) {
    return civil_from_days(days_from_civil(d.year, d.month, d.day) + 1);
}

std::int64_t utc_epoch_ms(int y, int mo, int d, int h, int mi, int s, int ms) {
    const std::int64_t days = days_from_civil(y, mo, d);
    return ((days * 24 + h) * 60 + mi) * 60000 + s * 1000 + ms;
}

Timezone::Timezone(std::string iana_name) : name_(std::move(iana_name)) {
    if (!zone_exists(name_)) throw ConfigError("unknown timezone '" + name_ + "'");
}

LocalParts Timezone::parts(Timestamp ts) const {
    std::lock_guard lock(g_tz_mutex);
    activate_zone_locked(name_);
    const time_t secs = static_cast<time_t>(ts.epoch_ms / 1000);
    std::tm tm{};
    localtime_r(&secs, &tm);
    return LocalParts{tm.tm_year + 1900, tm.tm_mon + 1, tm.tm_mday, tm.tm_hour,
                      tm.tm_min,         tm.tm_sec,     tm.tm_wday};
}

std::string Timezone::format(Timestamp ts, const std::string& pattern) const {
    const LocalParts p = parts(ts);
    std::string out;
    out.reserve(pattern.size() + 8);
    for (std::size_t i = 0; i < pattern.size();) {
        auto run = [&](char c) {
            std::size_t n = 0;
            while (i + n < pattern.size() && pattern[i + n] == c) ++n;
            return n;
        };
        switch (pattern[i]) {
            case 'E': {
                const std::size_t n = run('E');
                out += kWeekdays[p.weekday];
                i += n;
                break;
            }
            case 'M': {
                const std::size_t n = run('M');
                if (n >= 3)
                    out += kMonths[p.month - 1];
                else
                    append_padded(out, p.month, static_cast<int>(n));
                i += n;
                break;
            }
            case 'y': {
                const std::size_t n = run('y');
                if (n <= 2)
                    append_padded(out, p.year % 100, 2);
                else
                    append_padded(out, p.year, 4);
                i += n;
                break;
            }
            case 'd': {
                const std::size_t n = run('d');
                append_padded(out, p.day, static_cast<int>(n));
                i += n;
                break;
            }
            case 'H': {
                const std::size_t n = run('H');
                append_padded(out, p.hour, static_cast<int>(n));
                i += n;
                break;
            }
            case 'm': {
                const std::size_t n = run('m');
                append_padded(out, p.minute, static_cast<int>(n));
                i += n;
                break;
            }
            case 's': {
                const std::size_t n = run('s');
                append_padded(out, p.second, static_cast<int>(n));
                i += n;
                break;
            }
            default:
                out += pattern[i];
                ++i;
        }
    }
    return out;
}

}  // namespace narrator
