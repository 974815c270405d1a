#include "fadbio/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <limits>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "fadbio/csv.hpp"
#include "fadbio/features.hpp"
#include "fadbio/rng.hpp"

namespace fadbio {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kCensorT = 1.0;        // readings below this are not transmitted
constexpr double kForcedReadingT = 1.6; // floor for records that must be emitted
constexpr double kKFloorT = 5.0;        // carrying-capacity clamp
constexpr double kKCapT = 300.0;

constexpr double kBoxSpanDeg = 12.0;
constexpr double kInnerMarginDeg = 2.5;  // buoy corridor inset from box edges
constexpr double kCornerSpanDeg = 1.5;   // shoal band height / island patch size
constexpr double kShoalDepthM = 140.0;
constexpr double kIslandDepthM = -25.0;
constexpr double kBathyStepDeg = 0.5;
constexpr double kOceanStepDeg = 0.25;

struct Box {
    double lat_lo, lon_lo;
    double lat_hi() const { return lat_lo + kBoxSpanDeg; }
    double lon_hi() const { return lon_lo + kBoxSpanDeg; }
};
// One box per basin: Atlantic, Indian, Pacific.
constexpr Box kBoxes[3] = {{-6.0, -30.0}, {-12.0, 60.0}, {-6.0, -150.0}};

struct FieldSpec {
    double base, amp, wl_lat, wl_lon, wl_day;
};
// Aligned with kOceanVarNames: temp, chl, o2, sal, thermo, cur, ssha.
constexpr FieldSpec kFieldSpec[kOceanVars] = {
    {27.0, 2.2, 5.0, 7.0, 9.0},    {0.22, 0.13, 6.0, 8.0, 10.0},
    {205.0, 18.0, 7.0, 9.0, 11.0}, {35.1, 0.5, 8.0, 10.0, 12.0},
    {42.0, 14.0, 9.0, 11.0, 13.0}, {0.32, 0.2, 10.0, 12.0, 14.0},
    {0.0, 0.06, 11.0, 13.0, 15.0},
};

// Couplings of the latent biomass and of the acoustic visibility to the
// standardized fields (both scaled by config.ocean_coupling).
constexpr double kBioWeight[kOceanVars] = {0.30, 0.0, 0.20, 0.0, 0.0, -0.15, 0.0};
constexpr double kVisWeight[kOceanVars] = {0.0, -0.30, 0.0, 0.0, 0.20, 0.0, 0.0};

double phi(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

// Smooth standardized fields in [-1, 1]: seeded phases, fixed wavelengths.
struct Fields {
    std::array<std::array<double, 3>, kOceanVars> phase{};

    explicit Fields(std::uint64_t seed) {
        Rng rng(derive_seed(seed, "fields"));
        for (auto& p : phase)
            for (double& v : p) v = rng.next_double();
    }
    double z(int var, double lat, double lon, double day) const {
        const FieldSpec& s = kFieldSpec[var];
        const auto& p = phase[static_cast<std::size_t>(var)];
        return 0.5 * std::sin(2.0 * kPi * (lat / s.wl_lat + p[0])) +
               0.3 * std::sin(2.0 * kPi * (lon / s.wl_lon + p[1])) +
               0.2 * std::sin(2.0 * kPi * (day / s.wl_day + p[2]));
    }
    double value(int var, double lat, double lon, double day) const {
        const FieldSpec& s = kFieldSpec[var];
        return s.base + s.amp * z(var, lat, lon, day);
    }
    double weighted(const double* w, double coupling, double lat, double lon,
                    double day) const {
        double acc = 0.0;
        for (int v = 0; v < kOceanVars; ++v)
            if (w[v] != 0.0) acc += w[v] * z(v, lat, lon, day);
        return std::exp(coupling * acc);
    }
};

struct Buoy {
    int index = 0;
    std::string id;
    BuoyModel model = BuoyModel::Isl;
    int box = 0;
    double lon = 0.0;
    int dep_day = 0;              // offset from start_date
    std::int64_t dep_sec = 0;     // first live instant (08:00 UTC)
    double k = 0.0;               // carrying capacity, tonnes
    std::vector<double> lat;      // hourly track from dep_sec
    int soak = 0;                 // set day = dep_day + soak
    Date set_date{};
    GeoPoint set_pos{};
    GeoPoint dep_pos{};
    double catch_t = 0.0;
    int rule = -1;                          // DropRule index or -1
    std::int64_t silent_from = std::numeric_limits<std::int64_t>::max();
    std::int64_t poison_sec = -1;           // poisoned record hour (shallow/speeding)
    GeoPoint poison_pos{};                  // falsified record position
    std::string logged_set_buoy_id;         // ghost id for id-mismatch victims
    GeoPoint logged_set_pos{};              // falsified event position
};

struct Gen {
    const SynthConfig& cfg;
    Fields fields;
    std::int64_t start_day_num;
    std::int64_t end_sec;  // exclusive world end
    std::vector<Buoy> buoys;

    explicit Gen(const SynthConfig& c)
        : cfg(c),
          fields(c.seed),
          start_day_num(days_from_civil(c.start_date)),
          end_sec((start_day_num + c.days) * 86400) {}

    GeoPoint pos_at(const Buoy& b, std::int64_t sec) const {
        const std::int64_t rel = sec - b.dep_sec;
        std::int64_t idx = (rel + 1800) / 3600;
        idx = std::clamp<std::int64_t>(idx, 0, static_cast<std::int64_t>(b.lat.size()) - 1);
        return GeoPoint::make(b.lat[static_cast<std::size_t>(idx)], b.lon);
    }

    double surge(const Buoy& b, std::int64_t sec) const {
        const std::int64_t solar_day_num =
            days_from_civil(date_of(to_solar_time(b.lon, UtcTime{sec})));
        Rng rng(derive_seed(cfg.seed, "surge", static_cast<std::uint64_t>(b.index),
                            static_cast<std::uint64_t>(solar_day_num)));
        return rng.lognormal(0.0, cfg.day_sigma);
    }

    // Day-scale latent biomass (no diurnal gate, visibility or hourly noise).
    double latent_day(const Buoy& b, std::int64_t sec) const {
        const double soak_d = static_cast<double>(sec - b.dep_sec) / 86400.0;
        const double colon =
            1.0 / (1.0 + std::exp(-(soak_d - cfg.colonize_midpoint_d) / cfg.colonize_scale_d));
        const GeoPoint p = pos_at(b, sec);
        const auto day = static_cast<double>(days_from_civil(date_of(UtcTime{sec})));
        const double mult =
            fields.weighted(kBioWeight, cfg.ocean_coupling, p.lat, p.lon, day);
        return b.k * colon * mult * surge(b, sec);
    }

    double gate(const Buoy& b, std::int64_t sec) const {
        const double h = hour_of_day(to_solar_time(b.lon, UtcTime{sec}));
        const double u = std::cos((h - 12.5) * kPi / 12.5);
        return cfg.night_floor + (1.0 - cfg.night_floor) * std::max(0.0, u);
    }

    double visibility(const Buoy& b, std::int64_t sec) const {
        const GeoPoint p = pos_at(b, sec);
        const auto day = static_cast<double>(days_from_civil(date_of(UtcTime{sec})));
        return fields.weighted(kVisWeight, cfg.ocean_coupling, p.lat, p.lon, day);
    }

    // 09:00 mean-solar instant of a calendar date at the buoy's longitude.
    std::int64_t morning_sec(const Buoy& b, const Date& d) const {
        return days_from_civil(d) * 86400 + 9 * 3600 - solar_offset_sec(b.lon);
    }
};

void check_config(const SynthConfig& c) {
    if (c.n_buoys < 1) throw std::invalid_argument("n_buoys must be positive");
    if (c.min_soak_d < 5 || c.max_soak_d < c.min_soak_d)
        throw std::invalid_argument("soak range must satisfy 5 <= min <= max");
    if (c.days < c.min_soak_d + 4)
        throw std::invalid_argument("world too short for the soak range");
    if (c.start_date.year < 1951 || c.start_date.year > 2099)
        throw std::invalid_argument("start_date outside the supported era");
    const double rates[] = {c.rate_id_mismatch, c.rate_no_sunset, c.rate_coverage,
                            c.rate_on_land,     c.rate_shallow,   c.rate_speeding,
                            c.ocean_missing_rate};
    for (double r : rates)
        if (!(r >= 0.0 && r <= 1.0)) throw std::invalid_argument("rates must be in [0, 1]");
    if (c.rate_coverage > 0.0 && (c.max_soak_d < 16 || c.days < 18))
        throw std::invalid_argument(
            "coverage injection needs max_soak_d >= 16 and days >= 18");
    for (double v : {c.k_median_t, c.k_sigma, c.colonize_scale_d, c.day_sigma,
                     c.reading_sigma, c.catch_sigma})
        if (!(v > 0.0)) throw std::invalid_argument("scale parameters must be positive");
    if (!(c.night_floor > 0.0 && c.night_floor < 1.0))
        throw std::invalid_argument("night_floor must be in (0, 1)");
    if (c.set_bias < 0.0) throw std::invalid_argument("set_bias must be >= 0");
}

// Victim buoys per rule, disjoint, realized counts = llround(rate * n).
std::vector<int> assign_rules(const SynthConfig& c) {
    std::vector<int> rule(static_cast<std::size_t>(c.n_buoys), -1);
    std::vector<std::size_t> order(rule.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    Rng rng(derive_seed(c.seed, "victims"));
    rng.shuffle(order);

    const std::pair<DropRule, double> plan[] = {
        {DropRule::IdMismatch, c.rate_id_mismatch},
        {DropRule::NoSunset, c.rate_no_sunset},
        {DropRule::InsufficientCoverage, c.rate_coverage},
        {DropRule::OnLand, c.rate_on_land},
        {DropRule::Shallow, c.rate_shallow},
        {DropRule::Speeding, c.rate_speeding},
    };
    std::size_t next = 0;
    for (const auto& [r, rate] : plan) {
        const auto want = static_cast<std::size_t>(
            std::llround(rate * static_cast<double>(c.n_buoys)));
        if (next + want > order.size())
            throw std::invalid_argument("violation rates exceed the fleet size");
        for (std::size_t i = 0; i < want; ++i)
            rule[order[next++]] = static_cast<int>(r);
    }
    return rule;
}

// A polar event position with no sunset on the anchor date, or nullopt.
std::optional<GeoPoint> polar_position(double lon, const Date& anchor_date) {
    for (double lat : {-84.0, 84.0, -87.0, 87.0, -89.5, 89.5}) {
        const GeoPoint p = GeoPoint::make(lat, lon);
        if (!solar_day(p, anchor_date).has_sun_events()) return p;
    }
    return std::nullopt;
}

std::string pad_int(std::int64_t v, int width) {
    std::string s = std::to_string(v);
    while (static_cast<int>(s.size()) < width) s.insert(s.begin(), '0');
    return s;
}

void append_fields(std::string& out, std::initializer_list<std::string_view> fs) {
    bool first = true;
    for (std::string_view f : fs) {
        if (!first) out += ',';
        out += f;
        first = false;
    }
    out += '\n';
}

}  // namespace

SynthWorld generate(const SynthConfig& cfg) {
    check_config(cfg);
    Gen g(cfg);
    const std::vector<int> victim_rule = assign_rules(cfg);

    SynthWorld world;
    world.config = cfg;

    // ---- buoys: identity, carrying capacity, drift track ------------------
    g.buoys.resize(static_cast<std::size_t>(cfg.n_buoys));
    for (int bi = 0; bi < cfg.n_buoys; ++bi) {
        Buoy& b = g.buoys[static_cast<std::size_t>(bi)];
        b.index = bi;
        b.id = "B" + pad_int(bi, 4);
        b.box = bi % 3;
        b.model = static_cast<BuoyModel>(bi % 3);
        b.rule = victim_rule[static_cast<std::size_t>(bi)];
        const bool coverage = b.rule == static_cast<int>(DropRule::InsufficientCoverage);
        b.dep_day = coverage ? 0 : bi % 3;
        b.dep_sec = (g.start_day_num + b.dep_day) * 86400 + 8 * 3600;

        Rng krng(derive_seed(cfg.seed, "k", static_cast<std::uint64_t>(bi)));
        b.k = std::clamp(krng.lognormal(std::log(cfg.k_median_t), cfg.k_sigma), kKFloorT,
                         kKCapT);

        const Box& box = kBoxes[b.box];
        Rng drift(derive_seed(cfg.seed, "drift", static_cast<std::uint64_t>(bi)));
        b.lon = drift.uniform(box.lon_lo + kInnerMarginDeg, box.lon_hi() - kInnerMarginDeg);
        const double lat_lo = box.lat_lo + kInnerMarginDeg;
        const double lat_hi = box.lat_hi() - kInnerMarginDeg;
        double lat = drift.uniform(lat_lo, lat_hi);
        double dir = drift.next_double() < 0.5 ? 1.0 : -1.0;
        const auto n_hours = static_cast<std::size_t>((g.end_sec - b.dep_sec) / 3600);
        b.lat.reserve(n_hours);
        for (std::size_t h = 0; h < n_hours; ++h) {
            b.lat.push_back(lat);
            if (drift.next_double() < 0.04) dir = -dir;
            // One knot due north is one arcminute of latitude per hour.
            lat += dir * drift.uniform(0.2, 2.0) / 60.0;
            if (lat < lat_lo) {
                lat = 2.0 * lat_lo - lat;
                dir = 1.0;
            } else if (lat > lat_hi) {
                lat = 2.0 * lat_hi - lat;
                dir = -1.0;
            }
        }
    }

    // ---- events: one deployment + one set per buoy -------------------------
    for (Buoy& b : g.buoys) {
        const bool coverage = b.rule == static_cast<int>(DropRule::InsufficientCoverage);
        const int s_max = std::min(cfg.max_soak_d, cfg.days - 1 - b.dep_day);
        if (coverage) {
            b.soak = 16;
        } else {
            std::vector<double> weights;
            for (int s = cfg.min_soak_d; s <= s_max; ++s) {
                const Date d = date_plus_days(cfg.start_date, b.dep_day + s);
                const double latent =
                    std::max(g.latent_day(b, g.morning_sec(b, d)), 1e-9);
                weights.push_back(cfg.set_bias == 0.0 ? 1.0
                                                      : std::pow(latent, cfg.set_bias));
            }
            Rng rng(derive_seed(cfg.seed, "setday", static_cast<std::uint64_t>(b.index)));
            double total = 0.0;
            for (double w : weights) total += w;
            double r = rng.next_double() * total;
            std::size_t pick = 0;
            while (pick + 1 < weights.size() && r >= weights[pick]) r -= weights[pick++];
            b.soak = cfg.min_soak_d + static_cast<int>(pick);
        }
        b.set_date = date_plus_days(cfg.start_date, b.dep_day + b.soak);
        const std::int64_t t_m = g.morning_sec(b, b.set_date);
        b.set_pos = g.pos_at(b, t_m);
        b.dep_pos = g.pos_at(b, b.dep_sec);
        if (coverage) {
            // Go dark one hour after the deployment window ends: the deployment
            // stays fully covered while the set window (soak 16, any width up
            // to 72 h) is empty with a silent +/- 7 day margin.
            const Date dep_date = date_plus_days(cfg.start_date, b.dep_day);
            b.silent_from = solar_day(b.dep_pos, dep_date).sunset.sec + 73 * 3600;
        }
        Rng crng(derive_seed(cfg.seed, "catch", static_cast<std::uint64_t>(b.index)));
        b.catch_t = g.latent_day(b, t_m) * crng.lognormal(0.0, cfg.catch_sigma);

        // Injection details that touch the logged set event or one record.
        b.logged_set_buoy_id = b.id;
        b.logged_set_pos = b.set_pos;
        const Box& box = kBoxes[b.box];
        if (b.rule == static_cast<int>(DropRule::IdMismatch)) {
            b.logged_set_buoy_id = "GHOST" + pad_int(b.index, 4);
        } else if (b.rule == static_cast<int>(DropRule::NoSunset)) {
            const Date anchor_date = date_plus_days(b.set_date, -1);
            const std::optional<GeoPoint> p = polar_position(b.lon, anchor_date);
            if (p)
                b.logged_set_pos = *p;
            else
                b.rule = -1;  // not realizable on this date; leave the buoy clean
        } else if (b.rule == static_cast<int>(DropRule::OnLand)) {
            b.logged_set_pos =
                GeoPoint::make(box.lat_hi() - 0.75, box.lon_lo + 0.75);  // island
        } else if (b.rule == static_cast<int>(DropRule::Shallow) ||
                   b.rule == static_cast<int>(DropRule::Speeding)) {
            const SolarDay anchor = solar_day(b.set_pos, date_plus_days(b.set_date, -1));
            b.poison_sec = ((anchor.sunset.sec - 6 * 3600) / 3600) * 3600;
            // Both poisons keep the buoy's longitude so the falsified record
            // stays in its own window column (solar time shifts with
            // longitude, and a shifted record could collide with a normal
            // neighbour and lose the stronger-reading tiebreak).
            if (b.rule == static_cast<int>(DropRule::Shallow))
                b.poison_pos = GeoPoint::make(box.lat_hi() - 0.75, b.lon);  // shoal band
            else
                b.poison_pos = GeoPoint::make(g.pos_at(b, b.poison_sec).lat - 0.8, b.lon);
        }
        if (b.rule >= 0) ++world.injected[static_cast<std::size_t>(b.rule)];
    }

    // ---- logbook + ground-truth event files --------------------------------
    std::string& logbook = world.logbook_csv;
    std::string& tev = world.truth_events_csv;
    logbook = "event_id,buoy_id,buoy_model,kind,date,lat,lon,catch_t\n";
    tev = "event_id,rule_violation\n";
    {
        std::int64_t eid = 0;
        for (const Buoy& b : g.buoys) {
            const std::string dep_id = "E" + pad_int(eid++, 5);
            const std::string set_id = "E" + pad_int(eid++, 5);
            append_fields(logbook,
                          {dep_id, b.id, buoy_model_name(b.model), "DEPLOY",
                           format_date(date_plus_days(cfg.start_date, b.dep_day)),
                           format_double(b.dep_pos.lat), format_double(b.dep_pos.lon), ""});
            append_fields(logbook,
                          {set_id, b.logged_set_buoy_id, buoy_model_name(b.model), "SET",
                           format_date(b.set_date), format_double(b.logged_set_pos.lat),
                           format_double(b.logged_set_pos.lon), format_double(b.catch_t)});
            append_fields(tev, {dep_id, "none"});
            append_fields(tev,
                          {set_id, b.rule < 0 ? "none"
                                              : drop_rule_name(static_cast<DropRule>(b.rule))});
        }
    }

    // ---- echo stream + per-hour ground truth --------------------------------
    std::string& echo = world.echo_csv;
    std::string& truth = world.truth_hours_csv;
    echo = "buoy_id,ts_utc,lat,lon,l1,l2,l3,l4,l5,l6,l7,l8,l9,l10\n";
    truth = "buoy_id,ts_utc,latent_b\n";
    echo.reserve(static_cast<std::size_t>(cfg.n_buoys) * cfg.days * 24 * 110);
    truth.reserve(static_cast<std::size_t>(cfg.n_buoys) * cfg.days * 24 * 48);
    double phi_sum = 0.0;
    std::int64_t truth_rows = 0;
    std::int64_t echo_rows = 0;
    std::array<double, kEchoLayers> layers{};
    for (const Buoy& b : g.buoys) {
        Rng noise(derive_seed(cfg.seed, "noise", static_cast<std::uint64_t>(b.index)));
        for (std::size_t h = 0; h < b.lat.size(); ++h) {
            const std::int64_t sec = b.dep_sec + static_cast<std::int64_t>(h) * 3600;
            const UtcTime t{sec};
            const double hour = hour_of_day(to_solar_time(b.lon, t));
            const double u = std::cos((hour - 12.5) * kPi / 12.5);
            const double gate = cfg.night_floor + (1.0 - cfg.night_floor) * std::max(0.0, u);
            const double base = g.latent_day(b, sec) * gate * g.visibility(b, sec);
            const double eps = noise.lognormal(0.0, cfg.reading_sigma);
            double reading = base * eps;
            const bool poisoned = sec == b.poison_sec;
            if (poisoned && reading < kForcedReadingT) reading = kForcedReadingT;

            // Shallow by day, deep by night: a gaussian bump over layer index.
            const double center = u > 0.0 ? 2.5 : 7.5;
            double wsum = 0.0;
            for (int l = 0; l < kEchoLayers; ++l) {
                const double d = (static_cast<double>(l) + 0.5 - center) / 1.8;
                layers[static_cast<std::size_t>(l)] = std::exp(-0.5 * d * d);
                wsum += layers[static_cast<std::size_t>(l)];
            }
            double sum = 0.0;
            for (double& l : layers) {
                l = reading * (l / wsum);
                sum += l;
            }

            const std::string ts = format_timestamp(t);
            append_fields(truth, {b.id, ts, format_double(sum)});
            ++truth_rows;
            phi_sum += phi(-std::log(std::max(base, 1e-300)) / cfg.reading_sigma);

            if (sum < kCensorT || sec >= b.silent_from) continue;
            const GeoPoint pos = poisoned ? b.poison_pos : g.pos_at(b, sec);
            echo += b.id;
            echo += ',';
            echo += ts;
            echo += ',';
            echo += format_double(pos.lat);
            echo += ',';
            echo += format_double(pos.lon);
            for (double l : layers) {
                echo += ',';
                echo += format_double(l);
            }
            echo += '\n';
            ++echo_rows;
        }
    }
    (void)echo_rows;
    world.stats.censored_expected =
        truth_rows > 0 ? phi_sum / static_cast<double>(truth_rows) : 0.0;

    // ---- oceanography -------------------------------------------------------
    std::string& ocean = world.ocean_csv;
    ocean = "date,lat,lon,temp,chl,o2,sal,thermo,cur,ssha\n";
    {
        Rng miss(derive_seed(cfg.seed, "ocean_missing"));
        constexpr int kNodes = static_cast<int>(kBoxSpanDeg / kOceanStepDeg) + 1;
        ocean.reserve(static_cast<std::size_t>(cfg.days) * 3 * kNodes * kNodes * 70);
        for (int d = 0; d < cfg.days; ++d) {
            const Date date = date_plus_days(cfg.start_date, d);
            const auto day = static_cast<double>(g.start_day_num + d);
            const std::string ds = format_date(date);
            for (const Box& box : kBoxes) {
                for (int i = 0; i < kNodes; ++i) {
                    const double lat = box.lat_lo + kOceanStepDeg * i;
                    for (int j = 0; j < kNodes; ++j) {
                        const double lon = box.lon_lo + kOceanStepDeg * j;
                        ocean += ds;
                        ocean += ',';
                        ocean += format_double(lat);
                        ocean += ',';
                        ocean += format_double(lon);
                        for (int v = 0; v < kOceanVars; ++v) {
                            ocean += ',';
                            if (miss.next_double() < cfg.ocean_missing_rate) continue;
                            ocean += format_double(g.fields.value(v, lat, lon, day));
                        }
                        ocean += '\n';
                    }
                }
            }
        }
    }

    // ---- bathymetry ---------------------------------------------------------
    std::string& bathy = world.bathy_csv;
    bathy = "lat,lon,depth_m\n";
    {
        constexpr int kNodes = static_cast<int>(kBoxSpanDeg / kBathyStepDeg) + 1;
        for (const Box& box : kBoxes) {
            for (int i = 0; i < kNodes; ++i) {
                const double lat = box.lat_lo + kBathyStepDeg * i;
                for (int j = 0; j < kNodes; ++j) {
                    const double lon = box.lon_lo + kBathyStepDeg * j;
                    const bool top = lat >= box.lat_hi() - kCornerSpanDeg;
                    double depth = 3400.0 + 300.0 * std::sin(lat * 0.7 + lon * 0.3);
                    if (top && lon <= box.lon_lo + kCornerSpanDeg)
                        depth = kIslandDepthM;
                    else if (top)
                        depth = kShoalDepthM;
                    append_fields(bathy, {format_double(lat), format_double(lon),
                                          format_double(depth)});
                }
            }
        }
    }

    world.stats = validate(world);
    return world;
}

SynthStats validate(const SynthWorld& world) {
    SynthStats st;
    st.censored_expected = world.stats.censored_expected;

    // Catches and event counts from the logbook.
    std::vector<double> catches;
    {
        CsvTable t = parse_csv(world.logbook_csv);
        st.n_events = static_cast<std::int64_t>(t.rows.size());
        for (const auto& row : t.rows) {
            if (row.size() != 8 || row[3] != "SET") continue;
            if (const std::optional<double> c = parse_double(row[7]))
                catches.push_back(*c);
        }
    }
    if (!catches.empty()) {
        std::vector<double> sorted = catches;
        const std::size_t mid = sorted.size() / 2;
        std::nth_element(sorted.begin(), sorted.begin() + mid, sorted.end());
        st.median_catch_t = sorted[mid];
        std::int64_t pos = 0, high = 0;
        for (double c : catches) {
            pos += c >= kPresenceThresholdT;
            high += c >= kHighCatchThresholdT;
        }
        st.positive_fraction = static_cast<double>(pos) / static_cast<double>(catches.size());
        st.high_fraction = static_cast<double>(high) / static_cast<double>(catches.size());
    }

    // Fixed longitude per buoy, read back from the echo stream.
    std::map<std::string, double, std::less<>> buoy_lon;
    {
        CsvTable t = parse_csv(world.echo_csv);
        st.n_echo_rows = static_cast<std::int64_t>(t.rows.size());
        for (const auto& row : t.rows) {
            if (row.size() < 4) continue;
            if (const std::optional<double> lon = parse_double(row[3]))
                buoy_lon.emplace(std::string(row[0]), *lon);
        }
    }

    // Censoring and the diurnal cycle from the per-hour truth.
    {
        CsvTable t = parse_csv(world.truth_hours_csv);
        std::int64_t censored = 0, total = 0;
        double day_sum = 0.0, night_sum = 0.0;
        std::int64_t day_n = 0, night_n = 0;
        for (const auto& row : t.rows) {
            if (row.size() != 3) continue;
            const std::optional<double> v = parse_double(row[2]);
            const std::optional<UtcTime> ts = parse_timestamp(row[1]);
            if (!v || !ts) continue;
            ++total;
            censored += *v < kCensorT;
            const auto it = buoy_lon.find(row[0]);
            if (it == buoy_lon.end()) continue;
            const double h = hour_of_day(to_solar_time(it->second, *ts));
            if (h >= 7.0 && h < 18.0) {
                day_sum += *v;
                ++day_n;
            } else if (h >= 20.0 || h < 5.0) {
                night_sum += *v;
                ++night_n;
            }
        }
        if (total > 0) st.censored_fraction = static_cast<double>(censored) / total;
        if (day_n > 0) st.day_mean_latent = day_sum / static_cast<double>(day_n);
        if (night_n > 0) st.night_mean_latent = night_sum / static_cast<double>(night_n);
    }

    const double k_med = world.config.k_median_t;
    if (!(st.median_catch_t >= 0.55 * k_med && st.median_catch_t <= 1.6 * k_med))
        st.failures.push_back("median catch " + format_double(st.median_catch_t) +
                              " t is outside [0.55, 1.6] x " + format_double(k_med));
    if (std::abs(st.censored_fraction - st.censored_expected) > 0.02)
        st.failures.push_back("censored fraction " + format_double(st.censored_fraction) +
                              " deviates from expected " +
                              format_double(st.censored_expected) + " by more than 0.02");
    if (!(st.day_mean_latent > 1.5 * st.night_mean_latent))
        st.failures.push_back("daytime latent mean does not dominate night");
    if (!(st.positive_fraction >= 0.45 && st.positive_fraction <= 0.99))
        st.failures.push_back("positive class fraction " +
                              format_double(st.positive_fraction) +
                              " is outside [0.45, 0.99]");
    return st;
}

void write_world(const SynthWorld& world, const std::string& dir) {
    namespace fs = std::filesystem;
    fs::create_directories(dir);
    const fs::path base(dir);
    atomic_write_file((base / "logbook.csv").string(), world.logbook_csv);
    atomic_write_file((base / "echo.csv").string(), world.echo_csv);
    atomic_write_file((base / "ocean.csv").string(), world.ocean_csv);
    atomic_write_file((base / "bathy.csv").string(), world.bathy_csv);
    atomic_write_file((base / "ground_truth.csv").string(), world.truth_hours_csv);
    atomic_write_file((base / "ground_truth_events.csv").string(), world.truth_events_csv);
}

}  // namespace fadbio
