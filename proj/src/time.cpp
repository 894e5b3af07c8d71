#include "svq/time.hpp"

#include <array>
#include <cctype>
#include <charconv>
#include <cstdio>

namespace svq {

namespace {

constexpr std::int64_t kSecondsPerDay = 86400;

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
    std::int64_t q = a / b;
    if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
    return q;
}

bool is_leap(std::int64_t y) {
    return (y % 4 == 0 && y % 100 != 0) || y % 400 == 0;
}

unsigned days_in_month(std::int64_t y, unsigned m) {
    static constexpr std::array<unsigned, 12> lengths = {31, 28, 31, 30, 31, 30,
                                                         31, 31, 30, 31, 30, 31};
    if (m == 2 && is_leap(y)) return 29;
    return lengths[m - 1];
}

} // namespace

Day day_of(Timestamp t) {
    return floor_div(t.seconds, kSecondsPerDay);
}

Timestamp start_of_day(Day d) {
    return Timestamp{d * kSecondsPerDay};
}

// Civil-date conversions follow Howard Hinnant's public-domain algorithms.
std::int64_t days_from_civil(std::int64_t y, unsigned m, unsigned d) {
    y -= m <= 2;
    const std::int64_t era = floor_div(y, 400);
    const unsigned yoe = static_cast<unsigned>(y - era * 400);                  // [0, 399]
    const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;        // [0, 365]
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;                 // [0, 146096]
    return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

void civil_from_days(std::int64_t z, std::int64_t& year, unsigned& month, unsigned& day) {
    z += 719468;
    const std::int64_t era = floor_div(z, 146097);
    const unsigned doe = static_cast<unsigned>(z - era * 146097);               // [0, 146096]
    const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365; // [0, 399]
    const std::int64_t y = static_cast<std::int64_t>(yoe) + era * 400;
    const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);               // [0, 365]
    const unsigned mp = (5 * doy + 2) / 153;                                    // [0, 11]
    day = doy - (153 * mp + 2) / 5 + 1;
    month = mp + (mp < 10 ? 3 : -9);
    year = y + (month <= 2);
}

namespace {

bool parse_fixed_uint(std::string_view s, std::size_t pos, std::size_t len, unsigned& out) {
    if (pos + len > s.size()) return false;
    unsigned value = 0;
    for (std::size_t i = 0; i < len; ++i) {
        const char c = s[pos + i];
        if (c < '0' || c > '9') return false;
        value = value * 10 + static_cast<unsigned>(c - '0');
    }
    out = value;
    return true;
}

} // namespace

std::optional<Timestamp> parse_rfc3339(std::string_view s) {
    // date-time = YYYY-MM-DD ("T"/"t"/" ") hh:mm:ss [frac] ("Z"/"z" | ±hh:mm)
    unsigned year4 = 0, month = 0, day = 0, hour = 0, minute = 0, second = 0;
    if (!parse_fixed_uint(s, 0, 4, year4)) return std::nullopt;
    if (s.size() < 20 || s[4] != '-' || s[7] != '-') return std::nullopt;
    if (!parse_fixed_uint(s, 5, 2, month) || !parse_fixed_uint(s, 8, 2, day)) return std::nullopt;
    if (s[10] != 'T' && s[10] != 't' && s[10] != ' ') return std::nullopt;
    if (!parse_fixed_uint(s, 11, 2, hour)) return std::nullopt;
    if (s[13] != ':' || s[16] != ':') return std::nullopt;
    if (!parse_fixed_uint(s, 14, 2, minute) || !parse_fixed_uint(s, 17, 2, second)) return std::nullopt;

    std::size_t pos = 19;
    if (pos < s.size() && s[pos] == '.') {
        ++pos;
        std::size_t digits = 0;
        while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) {
            ++pos;
            ++digits;
        }
        if (digits == 0) return std::nullopt;
    }

    std::int64_t offset_seconds = 0;
    if (pos >= s.size()) return std::nullopt;
    const char tz = s[pos];
    if (tz == 'Z' || tz == 'z') {
        ++pos;
    } else if (tz == '+' || tz == '-') {
        unsigned oh = 0, om = 0;
        if (pos + 6 > s.size() || s[pos + 3] != ':') return std::nullopt;
        if (!parse_fixed_uint(s, pos + 1, 2, oh) || !parse_fixed_uint(s, pos + 4, 2, om)) return std::nullopt;
        if (oh > 23 || om > 59) return std::nullopt;
        offset_seconds = static_cast<std::int64_t>(oh) * 3600 + om * 60;
        if (tz == '-') offset_seconds = -offset_seconds;
        pos += 6;
    } else {
        return std::nullopt;
    }
    if (pos != s.size()) return std::nullopt;

    if (month < 1 || month > 12) return std::nullopt;
    if (day < 1 || day > days_in_month(year4, month)) return std::nullopt;
    if (hour > 23 || minute > 59 || second > 60) return std::nullopt;
    if (second == 60) second = 59; // leap second: clamp into the minute

    const std::int64_t days = days_from_civil(year4, month, day);
    const std::int64_t local = days * kSecondsPerDay + hour * 3600 + minute * 60 + second;
    return Timestamp{local - offset_seconds};
}

std::string format_rfc3339(Timestamp t) {
    const std::int64_t days = floor_div(t.seconds, kSecondsPerDay);
    std::int64_t sod = t.seconds - days * kSecondsPerDay;
    std::int64_t year = 0;
    unsigned month = 0, day = 0;
    civil_from_days(days, year, month, day);
    const unsigned hour = static_cast<unsigned>(sod / 3600);
    const unsigned minute = static_cast<unsigned>((sod / 60) % 60);
    const unsigned second = static_cast<unsigned>(sod % 60);
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%04lld-%02u-%02uT%02u:%02u:%02uZ",
                  static_cast<long long>(year), month, day, hour, minute, second);
    return buf;
}

} // namespace svq
