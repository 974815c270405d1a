#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

// Civil (proleptic Gregorian) calendar arithmetic and UTC / mean-solar instants.
// Leap seconds are deliberately ignored; every day is 86400 s.

namespace fadbio {

struct Date {
    int year = 0;
    int month = 0;  // 1..12
    int day = 0;    // 1..31

    friend bool operator==(const Date&, const Date&) = default;
    friend auto operator<=>(const Date&, const Date&) = default;
};

bool is_valid_date(const Date& d);

// Days since 1970-01-01 (negative before). Howard-Hinnant style closed form.
std::int64_t days_from_civil(const Date& d);
Date civil_from_days(std::int64_t z);

// Shift a calendar date by whole days.
Date date_plus_days(const Date& d, std::int64_t days);

// An instant on the UTC timeline, in seconds since 1970-01-01T00:00:00Z.
struct UtcTime {
    std::int64_t sec = 0;
    friend bool operator==(const UtcTime&, const UtcTime&) = default;
    friend auto operator<=>(const UtcTime&, const UtcTime&) = default;
};

// The same physical instant expressed on a mean-solar timeline: UTC shifted by
// longitude / 15 hours, so that 12:00 is mean solar noon at that longitude.
struct SolarTime {
    std::int64_t sec = 0;
    friend bool operator==(const SolarTime&, const SolarTime&) = default;
    friend auto operator<=>(const SolarTime&, const SolarTime&) = default;
};

UtcTime utc_from(const Date& d, int hour = 0, int minute = 0, int second = 0);

Date date_of(UtcTime t);
Date date_of(SolarTime t);

// Seconds into the day, [0, 86400).
int seconds_of_day(UtcTime t);
int seconds_of_day(SolarTime t);

// Fractional hour of day, [0, 24).
double hour_of_day(SolarTime t);

// Accepts "YYYY-MM-DD".
std::optional<Date> parse_date(std::string_view s);

// Accepts "YYYY-MM-DD HH:MM[:SS]" and "YYYY-MM-DDTHH:MM[:SS][Z]".
std::optional<UtcTime> parse_timestamp(std::string_view s);

std::string format_date(const Date& d);
std::string format_timestamp(UtcTime t);  // "YYYY-MM-DDTHH:MM:SSZ"

}  // namespace fadbio
