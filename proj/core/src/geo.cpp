#include "fadbio/geo.hpp"

#include <cmath>
#include <stdexcept>

namespace fadbio {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kD2R = kPi / 180.0;
constexpr double kR2D = 180.0 / kPi;
constexpr double kEarthRadiusM = 6371008.8;
constexpr double kMetersPerNm = 1852.0;

// Elevation of the sun center at which sunrise/sunset is declared: standard
// atmospheric refraction (34') plus the solar semidiameter (16').
constexpr double kRiseSetElevDeg = -0.833;

constexpr std::int64_t kMinYearSec = -631152000;   // 1950-01-01
constexpr std::int64_t kMaxYearSec = 4133980800;   // 2101-01-01

double julian_centuries(UtcTime t) {
    const double jd = static_cast<double>(t.sec) / 86400.0 + 2440587.5;
    return (jd - 2451545.0) / 36525.0;
}

struct SolarCoeffs {
    double decl_deg;     // apparent declination
    double eqtime_min;   // equation of time, minutes (apparent - mean)
};

// NOAA low-accuracy solar position for a given Julian-century epoch.
SolarCoeffs solar_coeffs(double t) {
    // Geometric mean longitude and anomaly of the sun, degrees.
    double l0 = 280.46646 + t * (36000.76983 + t * 0.0003032);
    l0 = std::fmod(l0, 360.0);
    if (l0 < 0.0) l0 += 360.0;
    const double m = 357.52911 + t * (35999.05029 - 0.0001537 * t);

    const double e = 0.016708634 - t * (0.000042037 + 0.0000001267 * t);

    const double mrad = m * kD2R;
    const double eq_center = std::sin(mrad) * (1.914602 - t * (0.004817 + 0.000014 * t)) +
                             std::sin(2.0 * mrad) * (0.019993 - 0.000101 * t) +
                             std::sin(3.0 * mrad) * 0.000289;

    const double true_long = l0 + eq_center;
    const double omega = (125.04 - 1934.136 * t) * kD2R;
    const double app_long = true_long - 0.00569 - 0.00478 * std::sin(omega);

    const double mean_obliq =
        23.0 + (26.0 + (21.448 - t * (46.815 + t * (0.00059 - t * 0.001813))) / 60.0) / 60.0;
    const double obliq = mean_obliq + 0.00256 * std::cos(omega);

    const double obliq_rad = obliq * kD2R;
    const double app_rad = app_long * kD2R;
    const double decl = std::asin(std::sin(obliq_rad) * std::sin(app_rad)) * kR2D;

    double y = std::tan(obliq_rad / 2.0);
    y *= y;
    const double l0rad = l0 * kD2R;
    const double etime = y * std::sin(2.0 * l0rad) - 2.0 * e * std::sin(mrad) +
                         4.0 * e * y * std::sin(mrad) * std::cos(2.0 * l0rad) -
                         0.5 * y * y * std::sin(4.0 * l0rad) -
                         1.25 * e * e * std::sin(2.0 * mrad);

    return SolarCoeffs{decl, 4.0 * etime * kR2D};
}

void check_epoch(std::int64_t sec) {
    if (sec < kMinYearSec || sec >= kMaxYearSec) {
        throw std::domain_error("timestamp outside supported years 1950..2100");
    }
}

// Hour angle (degrees, positive) of the rise/set elevation; the cosine
// argument exceeding [-1, 1] signals a polar degenerate day.
double cos_hour_angle(double lat_deg, double decl_deg) {
    const double lat = lat_deg * kD2R;
    const double decl = decl_deg * kD2R;
    return (std::sin(kRiseSetElevDeg * kD2R) - std::sin(lat) * std::sin(decl)) /
           (std::cos(lat) * std::cos(decl));
}

}  // namespace

GeoPoint GeoPoint::make(double lat_deg, double lon_deg) {
    if (!std::isfinite(lat_deg) || !std::isfinite(lon_deg) || lat_deg < -90.0 ||
        lat_deg > 90.0) {
        throw std::invalid_argument("invalid geographic coordinates");
    }
    double lon = std::fmod(lon_deg, 360.0);
    if (lon >= 180.0) lon -= 360.0;
    if (lon < -180.0) lon += 360.0;
    return GeoPoint{lat_deg, lon};
}

double sun_inclination(const GeoPoint& p, UtcTime t) {
    check_epoch(t.sec);
    const SolarCoeffs sc = solar_coeffs(julian_centuries(t));

    const double utc_minutes = static_cast<double>(seconds_of_day(t)) / 60.0;
    double tst = utc_minutes + sc.eqtime_min + 4.0 * p.lon;  // true solar time, minutes
    tst = std::fmod(tst, 1440.0);
    if (tst < 0.0) tst += 1440.0;
    const double hour_angle = (tst / 4.0) - 180.0;

    const double lat = p.lat * kD2R;
    const double decl = sc.decl_deg * kD2R;
    const double cos_zenith = std::sin(lat) * std::sin(decl) +
                              std::cos(lat) * std::cos(decl) * std::cos(hour_angle * kD2R);
    const double clamped = std::fmax(-1.0, std::fmin(1.0, cos_zenith));
    return 90.0 - std::acos(clamped) * kR2D;
}

SolarDay solar_day(const GeoPoint& p, const Date& date) {
    if (!is_valid_date(date)) throw std::invalid_argument("invalid calendar date");
    const UtcTime day_start = utc_from(date);
    check_epoch(day_start.sec);

    // First pass: evaluate the polynomials at the estimated local solar noon.
    const auto minutes_to_utc = [&](double minutes) {
        return UtcTime{day_start.sec + static_cast<std::int64_t>(std::llround(minutes * 60.0))};
    };
    const double noon_guess_min = 720.0 - 4.0 * p.lon;
    SolarCoeffs sc = solar_coeffs(julian_centuries(minutes_to_utc(noon_guess_min)));
    double noon_min = 720.0 - 4.0 * p.lon - sc.eqtime_min;
    // Second pass pins noon to the sub-second level.
    sc = solar_coeffs(julian_centuries(minutes_to_utc(noon_min)));
    noon_min = 720.0 - 4.0 * p.lon - sc.eqtime_min;

    SolarDay out;
    out.date = date;
    out.noon = minutes_to_utc(noon_min);

    const double cos_ha_noon = cos_hour_angle(p.lat, sc.decl_deg);
    if (cos_ha_noon < -1.0) {
        out.polar = SolarDay::Polar::MidnightSun;
        return out;
    }
    if (cos_ha_noon > 1.0) {
        out.polar = SolarDay::Polar::PolarNight;
        return out;
    }

    double ha_deg = std::acos(cos_ha_noon) * kR2D;
    double sunrise_min = noon_min - 4.0 * ha_deg;
    double sunset_min = noon_min + 4.0 * ha_deg;

    // Refine each crossing with coefficients evaluated at its own estimate;
    // declination drift across the day shifts the tropics by a few seconds
    // and high latitudes by a couple of minutes.
    const auto refine = [&](double est_min, bool rising) {
        const SolarCoeffs sc2 = solar_coeffs(julian_centuries(minutes_to_utc(est_min)));
        const double c = cos_hour_angle(p.lat, sc2.decl_deg);
        if (c < -1.0 || c > 1.0) return est_min;  // keep the first-pass estimate
        const double noon2 = 720.0 - 4.0 * p.lon - sc2.eqtime_min;
        const double ha2 = std::acos(c) * kR2D;
        return rising ? noon2 - 4.0 * ha2 : noon2 + 4.0 * ha2;
    };
    sunrise_min = refine(sunrise_min, true);
    sunset_min = refine(sunset_min, false);

    out.sunrise = minutes_to_utc(sunrise_min);
    out.sunset = minutes_to_utc(sunset_min);
    return out;
}

std::int64_t solar_offset_sec(double lon_deg) {
    // longitude / 15 h = longitude * 240 s per degree.
    return std::llround(lon_deg * 240.0);
}

SolarTime to_solar_time(double lon_deg, UtcTime t) {
    return SolarTime{t.sec + solar_offset_sec(lon_deg)};
}

double haversine_nm(const GeoPoint& a, const GeoPoint& b) {
    const double lat1 = a.lat * kD2R;
    const double lat2 = b.lat * kD2R;
    const double dlat = (b.lat - a.lat) * kD2R;
    const double dlon = (b.lon - a.lon) * kD2R;

    const double sin_dlat = std::sin(dlat / 2.0);
    const double sin_dlon = std::sin(dlon / 2.0);
    double h = sin_dlat * sin_dlat + std::cos(lat1) * std::cos(lat2) * sin_dlon * sin_dlon;
    h = std::fmax(0.0, std::fmin(1.0, h));
    const double dist_m = 2.0 * kEarthRadiusM * std::asin(std::sqrt(h));
    return dist_m / kMetersPerNm;
}

double speed_knots(const GeoPoint& from, const GeoPoint& to, std::int64_t elapsed_sec) {
    if (elapsed_sec <= 0) throw std::invalid_argument("elapsed time must be positive");
    const double hours = static_cast<double>(elapsed_sec) / 3600.0;
    return haversine_nm(from, to) / hours;
}

}  // namespace fadbio
