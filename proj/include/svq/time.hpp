#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace svq {

/// Day index relative to 1970-01-01 (UTC calendar day).
using Day = std::int64_t;

/// A UTC instant at second resolution. All on-time/late decisions compare
/// at day resolution; see day_of().
struct Timestamp {
    std::int64_t seconds = 0; // seconds since the Unix epoch, UTC

    friend auto operator<=>(const Timestamp&, const Timestamp&) = default;
};

/// UTC calendar day containing the instant (floor, so pre-epoch instants
/// land on the correct day).
Day day_of(Timestamp t);

/// Midnight UTC of the given day.
Timestamp start_of_day(Day d);

/// Day index for a proleptic-Gregorian civil date.
std::int64_t days_from_civil(std::int64_t year, unsigned month, unsigned day);

/// Inverse of days_from_civil.
void civil_from_days(std::int64_t days, std::int64_t& year, unsigned& month, unsigned& day);

/// Parses an RFC 3339 timestamp ("2025-03-07T09:30:00Z", fractional seconds
/// truncated, numeric offsets normalized to UTC). Returns nullopt on any
/// syntactic or calendar violation.
std::optional<Timestamp> parse_rfc3339(std::string_view text);

/// Canonical UTC form "YYYY-MM-DDThh:mm:ssZ".
std::string format_rfc3339(Timestamp t);

} // namespace svq
