#pragma once

#include "fadbio/time.hpp"

// Solar geometry and spherical navigation. The solar position model is the
// NOAA low-accuracy algorithm (Julian-century polynomials for declination and
// the equation of time), good to well under a minute for sunrise/sunset at
// non-polar latitudes, which is far tighter than the hour-level bucketing that
// consumes it.

namespace fadbio {

// Validated geographic position: latitude in [-90, 90], longitude normalized
// into [-180, 180).
struct GeoPoint {
    double lat = 0.0;
    double lon = 0.0;

    // Throws std::invalid_argument for non-finite or out-of-range latitude.
    static GeoPoint make(double lat_deg, double lon_deg);

    friend bool operator==(const GeoPoint&, const GeoPoint&) = default;
};

// Sunrise/sunset/solar-noon UTC instants for one location and calendar date.
// The date is the local solar date: solar noon falls on `date` at the
// location's mean-solar clock. At polar latitudes the horizon crossings can
// vanish; `polar` then records which degenerate case applies and the sunrise
// and sunset fields are not meaningful.
struct SolarDay {
    enum class Polar { None, MidnightSun, PolarNight };

    Date date{};
    Polar polar = Polar::None;
    UtcTime sunrise{};
    UtcTime sunset{};
    UtcTime noon{};

    bool has_sun_events() const { return polar == Polar::None; }
};

// Solar elevation above the geometric horizon, degrees. Throws
// std::domain_error for timestamps outside years 1950..2100.
double sun_inclination(const GeoPoint& p, UtcTime t);

// Sunrise/sunset where the sun center crosses -0.833 degrees (standard
// refraction plus solar radius). Throws std::domain_error outside 1950..2100.
SolarDay solar_day(const GeoPoint& p, const Date& date);

// Mean solar time: UTC shifted by longitude/15 hours (rounded to a second).
std::int64_t solar_offset_sec(double lon_deg);
SolarTime to_solar_time(double lon_deg, UtcTime t);

// Great-circle distance in nautical miles on a sphere of radius 6371.0088 km.
double haversine_nm(const GeoPoint& a, const GeoPoint& b);

// Speed in knots between two positions. elapsed_sec must be > 0, else throws
// std::invalid_argument.
double speed_knots(const GeoPoint& from, const GeoPoint& to, std::int64_t elapsed_sec);

}  // namespace fadbio
