#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "fadbio/geo.hpp"
#include "fadbio/rng.hpp"
#include "oracles.hpp"

using namespace fadbio;

TEST_CASE("geo points normalize longitude and validate latitude") {
    CHECK(GeoPoint::make(10.0, 190.0).lon == doctest::Approx(-170.0));
    CHECK(GeoPoint::make(10.0, -190.0).lon == doctest::Approx(170.0));
    CHECK(GeoPoint::make(10.0, 180.0).lon == doctest::Approx(-180.0));
    CHECK(GeoPoint::make(10.0, 540.0).lon == doctest::Approx(-180.0));
    CHECK(GeoPoint::make(10.0, -180.0).lon == doctest::Approx(-180.0));
    CHECK(GeoPoint::make(-90.0, 0.0).lat == -90.0);
    CHECK_THROWS_AS(GeoPoint::make(90.5, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(GeoPoint::make(std::nan(""), 0.0), std::invalid_argument);
}

TEST_CASE("haversine agrees with the law-of-cosines formula") {
    Rng rng(2024);
    for (int i = 0; i < 300; ++i) {
        const double lat1 = rng.uniform(-85.0, 85.0);
        const double lon1 = rng.uniform(-180.0, 180.0);
        const double lat2 = rng.uniform(-85.0, 85.0);
        const double lon2 = rng.uniform(-180.0, 180.0);
        const double got = haversine_nm(GeoPoint::make(lat1, lon1), GeoPoint::make(lat2, lon2));
        const double want = oracle::law_of_cosines_nm(lat1, lon1, lat2, lon2);
        CHECK(std::abs(got - want) <= 1e-6 * std::max(1.0, want));
    }
}

TEST_CASE("haversine known values") {
    // One degree of latitude on the reference sphere.
    const double one_deg_nm = 2.0 * 3.14159265358979323846 * 6371.0088 / 360.0 * 1000.0 / 1852.0;
    CHECK(haversine_nm(GeoPoint::make(0, 0), GeoPoint::make(1, 0)) ==
          doctest::Approx(one_deg_nm).epsilon(1e-9));
    CHECK(haversine_nm(GeoPoint::make(12.3, 45.6), GeoPoint::make(12.3, 45.6)) == 0.0);
    // Symmetry.
    const GeoPoint a = GeoPoint::make(43.0, -31.0), b = GeoPoint::make(-12.0, 117.0);
    CHECK(haversine_nm(a, b) == haversine_nm(b, a));
}

TEST_CASE("drift speed divides distance by hours") {
    const GeoPoint a = GeoPoint::make(0, 0), b = GeoPoint::make(1, 0);
    const double d = haversine_nm(a, b);
    CHECK(speed_knots(a, b, 3600) == doctest::Approx(d));
    CHECK(speed_knots(a, b, 7200) == doctest::Approx(d / 2.0));
    CHECK_THROWS_AS(speed_knots(a, b, 0), std::invalid_argument);
    CHECK_THROWS_AS(speed_knots(a, b, -5), std::invalid_argument);
}

TEST_CASE("solar offset is longitude over fifteen degrees per hour") {
    CHECK(solar_offset_sec(0.0) == 0);
    CHECK(solar_offset_sec(15.0) == 3600);
    CHECK(solar_offset_sec(-150.0) == -36000);
    CHECK(solar_offset_sec(7.5) == 1800);
    const UtcTime t = utc_from({2019, 6, 1}, 12, 0, 0);
    CHECK(to_solar_time(-150.0, t).sec == t.sec - 36000);
}

TEST_CASE("sunrise and sunset match an independent almanac computation") {
    const double kTolSec = 180.0;
    const struct {
        double lat, lon;
        Date date;
    } cases[] = {
        {0.0, 0.0, {2019, 1, 10}},    {-6.0, -30.0, {2019, 1, 20}},
        {-12.0, 60.0, {2019, 2, 5}},  {-6.0, -150.0, {2019, 1, 25}},
        {43.6, 1.4, {2021, 6, 21}},   {43.6, 1.4, {2021, 12, 21}},
        {60.0, 25.0, {2020, 6, 21}},  {60.0, 25.0, {2020, 12, 21}},
        {-34.9, 138.6, {2023, 9, 1}}, {35.7, 139.7, {1999, 3, 21}},
        {-1.3, 36.8, {1965, 7, 2}},   {14.6, -17.4, {2088, 10, 15}},
    };
    for (const auto& c : cases) {
        const SolarDay got = solar_day(GeoPoint::make(c.lat, c.lon), c.date);
        const oracle::SunTimes want = oracle::sun_times(c.lat, c.lon, c.date);
        REQUIRE(want.has_events);
        REQUIRE(got.has_sun_events());
        CHECK(std::abs(static_cast<double>(got.sunrise.sec - want.sunrise_sec)) <= kTolSec);
        CHECK(std::abs(static_cast<double>(got.sunset.sec - want.sunset_sec)) <= kTolSec);
        CHECK(got.sunrise < got.noon);
        CHECK(got.noon < got.sunset);
        // Solar noon falls on the requested date at the local mean-solar clock.
        CHECK(date_of(to_solar_time(c.lon, got.noon)) == c.date);
    }
}

TEST_CASE("polar latitudes lose their horizon crossings") {
    CHECK(solar_day(GeoPoint::make(80.0, 10.0), {2020, 6, 21}).polar ==
          SolarDay::Polar::MidnightSun);
    CHECK(solar_day(GeoPoint::make(80.0, 10.0), {2020, 12, 21}).polar ==
          SolarDay::Polar::PolarNight);
    CHECK(solar_day(GeoPoint::make(-84.0, 0.0), {2019, 1, 20}).polar ==
          SolarDay::Polar::MidnightSun);
    CHECK(solar_day(GeoPoint::make(-84.0, 0.0), {2019, 7, 20}).polar ==
          SolarDay::Polar::PolarNight);
    CHECK(solar_day(GeoPoint::make(60.0, 10.0), {2020, 6, 21}).has_sun_events());
}

TEST_CASE("solar day rejects dates outside the validity range") {
    CHECK_THROWS_AS(solar_day(GeoPoint::make(0, 0), {1949, 12, 31}), std::domain_error);
    CHECK_THROWS_AS(solar_day(GeoPoint::make(0, 0), {2101, 1, 1}), std::domain_error);
    CHECK_NOTHROW(solar_day(GeoPoint::make(0, 0), {1950, 1, 1}));
    CHECK_NOTHROW(solar_day(GeoPoint::make(0, 0), {2100, 12, 31}));
    CHECK_THROWS_AS(sun_inclination(GeoPoint::make(0, 0), utc_from({1949, 6, 1})),
                    std::domain_error);
}

TEST_CASE("sun elevation is coherent with the day's horizon crossings") {
    const GeoPoint p = GeoPoint::make(20.0, -40.0);
    const SolarDay day = solar_day(p, {2019, 4, 15});
    REQUIRE(day.has_sun_events());
    // The standard depression at the crossings, well below at midnight, high at noon.
    CHECK(sun_inclination(p, day.sunrise) == doctest::Approx(-0.833).epsilon(0.02));
    CHECK(sun_inclination(p, day.sunset) == doctest::Approx(-0.833).epsilon(0.02));
    CHECK(sun_inclination(p, day.noon) > 50.0);
    CHECK(sun_inclination(p, UtcTime{day.noon.sec + 43200}) < -30.0);
}
