#include <doctest.h>

#include "fadbio/time.hpp"

using namespace fadbio;

TEST_CASE("civil day numbers round-trip and match known anchors") {
    CHECK(days_from_civil({1970, 1, 1}) == 0);
    CHECK(days_from_civil({1970, 1, 2}) == 1);
    CHECK(days_from_civil({1969, 12, 31}) == -1);
    CHECK(days_from_civil({2000, 3, 1}) == 11017);
    CHECK(days_from_civil({2019, 1, 10}) == 17906);

    for (std::int64_t z = -200000; z <= 200000; z += 97) {
        const Date d = civil_from_days(z);
        CHECK(days_from_civil(d) == z);
        CHECK(is_valid_date(d));
    }
}

TEST_CASE("date arithmetic crosses month, year and leap boundaries") {
    CHECK(date_plus_days({2020, 2, 28}, 1) == Date{2020, 2, 29});
    CHECK(date_plus_days({2019, 2, 28}, 1) == Date{2019, 3, 1});
    CHECK(date_plus_days({2019, 12, 31}, 1) == Date{2020, 1, 1});
    CHECK(date_plus_days({2019, 1, 10}, -10) == Date{2018, 12, 31});
    CHECK(date_plus_days({2100, 2, 28}, 1) == Date{2100, 3, 1});  // not a leap year
}

TEST_CASE("date validity") {
    CHECK(is_valid_date({2020, 2, 29}));
    CHECK_FALSE(is_valid_date({2019, 2, 29}));
    CHECK_FALSE(is_valid_date({2019, 4, 31}));
    CHECK_FALSE(is_valid_date({2019, 13, 1}));
    CHECK_FALSE(is_valid_date({2019, 0, 10}));
    CHECK_FALSE(is_valid_date({2019, 1, 0}));
}

TEST_CASE("utc construction and decomposition") {
    const UtcTime t = utc_from({2019, 1, 10}, 8, 30, 15);
    CHECK(t.sec == 17906 * 86400 + 8 * 3600 + 30 * 60 + 15);
    CHECK(date_of(t) == Date{2019, 1, 10});
    CHECK(seconds_of_day(t) == 8 * 3600 + 30 * 60 + 15);
    CHECK(date_of(UtcTime{-1}) == Date{1969, 12, 31});
    CHECK(seconds_of_day(UtcTime{-1}) == 86399);
}

TEST_CASE("solar time decomposition") {
    const SolarTime s{17906 * 86400 + 45000};
    CHECK(date_of(s) == Date{2019, 1, 10});
    CHECK(seconds_of_day(s) == 45000);
    CHECK(hour_of_day(s) == doctest::Approx(45000.0 / 3600.0));
}

TEST_CASE("date parsing accepts ISO form and rejects junk") {
    CHECK(parse_date("2019-01-10") == Date{2019, 1, 10});
    CHECK(parse_date("1970-12-31") == Date{1970, 12, 31});
    CHECK_FALSE(parse_date("2019-02-29"));
    CHECK_FALSE(parse_date("2019-1-10"));
    CHECK_FALSE(parse_date("2019/01/10"));
    CHECK_FALSE(parse_date("2019-01-10x"));
    CHECK_FALSE(parse_date(""));
}

TEST_CASE("timestamp parsing accepts both separators and optional seconds") {
    const std::int64_t want = 17906 * 86400 + 14 * 3600 + 5 * 60 + 9;
    CHECK(parse_timestamp("2019-01-10T14:05:09Z") == UtcTime{want});
    CHECK(parse_timestamp("2019-01-10T14:05:09") == UtcTime{want});
    CHECK(parse_timestamp("2019-01-10 14:05:09") == UtcTime{want});
    CHECK(parse_timestamp("2019-01-10 14:05") == UtcTime{want - 9});
    CHECK_FALSE(parse_timestamp("2019-01-10T25:05:09Z"));
    CHECK_FALSE(parse_timestamp("2019-01-10T14:65:09Z"));
    CHECK_FALSE(parse_timestamp("2019-01-10T14:05:09ZZ"));
    CHECK_FALSE(parse_timestamp("not a time"));
}

TEST_CASE("formatting round-trips through parsing") {
    CHECK(format_date({2019, 1, 10}) == "2019-01-10");
    CHECK(format_date({1987, 11, 3}) == "1987-11-03");
    const UtcTime t = utc_from({2024, 6, 1}, 23, 59, 59);
    CHECK(format_timestamp(t) == "2024-06-01T23:59:59Z");
    CHECK(parse_timestamp(format_timestamp(t)) == t);
}
