#include "fadbio/time.hpp"

#include <charconv>
#include <cstdio>

namespace fadbio {

namespace {

constexpr std::int64_t kSecPerDay = 86400;

int days_in_month(int year, int month) {
    static constexpr int kDays[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
    if (month == 2) {
        const bool leap = (year % 4 == 0 && year % 100 != 0) || year % 400 == 0;
        return leap ? 29 : 28;
    }
    return kDays[month - 1];
}

// Floor division of seconds into days.
std::int64_t floor_div_day(std::int64_t sec) {
    return sec >= 0 ? sec / kSecPerDay : -((-sec + kSecPerDay - 1) / kSecPerDay);
}

bool parse_int_field(std::string_view s, size_t pos, size_t len, int& out) {
    if (pos + len > s.size()) return false;
    const char* first = s.data() + pos;
    auto [ptr, ec] = std::from_chars(first, first + len, out);
    return ec == std::errc{} && ptr == first + len;
}

}  // namespace

bool is_valid_date(const Date& d) {
    if (d.month < 1 || d.month > 12) return false;
    if (d.day < 1 || d.day > days_in_month(d.year, d.month)) return false;
    return true;
}

std::int64_t days_from_civil(const Date& d) {
    std::int64_t y = d.year;
    const int m = d.month;
    const int dy = d.day;
    y -= m <= 2;
    const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = (153u * static_cast<unsigned>(m + (m > 2 ? -3 : 9)) + 2u) / 5u +
                         static_cast<unsigned>(dy) - 1u;
    const unsigned doe = yoe * 365u + yoe / 4u - yoe / 100u + doy;
    return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

Date civil_from_days(std::int64_t z) {
    z += 719468;
    const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
    const unsigned doe = static_cast<unsigned>(z - era * 146097);
    const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    const std::int64_t y = static_cast<std::int64_t>(yoe) + era * 400;
    const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    const unsigned mp = (5 * doy + 2) / 153;
    const unsigned dy = doy - (153 * mp + 2) / 5 + 1;
    const unsigned m = mp < 10 ? mp + 3 : mp - 9;
    return Date{static_cast<int>(y + (m <= 2)), static_cast<int>(m), static_cast<int>(dy)};
}

Date date_plus_days(const Date& d, std::int64_t days) {
    return civil_from_days(days_from_civil(d) + days);
}

UtcTime utc_from(const Date& d, int hour, int minute, int second) {
    return UtcTime{days_from_civil(d) * kSecPerDay + hour * 3600 + minute * 60 + second};
}

Date date_of(UtcTime t) { return civil_from_days(floor_div_day(t.sec)); }
Date date_of(SolarTime t) { return civil_from_days(floor_div_day(t.sec)); }

int seconds_of_day(UtcTime t) {
    return static_cast<int>(t.sec - floor_div_day(t.sec) * kSecPerDay);
}
int seconds_of_day(SolarTime t) {
    return static_cast<int>(t.sec - floor_div_day(t.sec) * kSecPerDay);
}

double hour_of_day(SolarTime t) { return seconds_of_day(t) / 3600.0; }

std::optional<Date> parse_date(std::string_view s) {
    Date d;
    if (s.size() != 10 || s[4] != '-' || s[7] != '-') return std::nullopt;
    if (!parse_int_field(s, 0, 4, d.year) || !parse_int_field(s, 5, 2, d.month) ||
        !parse_int_field(s, 8, 2, d.day)) {
        return std::nullopt;
    }
    if (!is_valid_date(d)) return std::nullopt;
    return d;
}

std::optional<UtcTime> parse_timestamp(std::string_view s) {
    if (s.size() >= 1 && s.back() == 'Z') s.remove_suffix(1);
    if (s.size() < 16) return std::nullopt;
    if (s[10] != ' ' && s[10] != 'T') return std::nullopt;
    auto d = parse_date(s.substr(0, 10));
    if (!d) return std::nullopt;
    int hour = 0, minute = 0, second = 0;
    if (s[13] != ':') return std::nullopt;
    if (!parse_int_field(s, 11, 2, hour) || !parse_int_field(s, 14, 2, minute)) {
        return std::nullopt;
    }
    if (s.size() > 16) {
        if (s.size() != 19 || s[16] != ':') return std::nullopt;
        if (!parse_int_field(s, 17, 2, second)) return std::nullopt;
    }
    if (hour > 23 || minute > 59 || second > 59) return std::nullopt;
    return utc_from(*d, hour, minute, second);
}

std::string format_date(const Date& d) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02d-%02d", d.year, d.month, d.day);
    return buf;
}

std::string format_timestamp(UtcTime t) {
    const Date d = date_of(t);
    const int sod = seconds_of_day(t);
    char buf[32];
    std::snprintf(buf, sizeof buf, "%04d-%02d-%02dT%02d:%02d:%02dZ", d.year, d.month, d.day,
                  sod / 3600, (sod / 60) % 60, sod % 60);
    return buf;
}

}  // namespace fadbio
