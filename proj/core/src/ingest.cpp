#include "fadbio/ingest.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <unordered_map>

#include "fadbio/csv.hpp"

namespace fadbio {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void require_header(const CsvTable& t, std::span<const char* const> expected,
                    const std::string& path) {
    bool ok = t.header.size() == expected.size();
    for (std::size_t i = 0; ok && i < expected.size(); ++i) {
        ok = t.header[i] == expected[i];
    }
    if (!ok) {
        std::string want;
        for (std::size_t i = 0; i < expected.size(); ++i) {
            if (i) want += ',';
            want += expected[i];
        }
        throw std::runtime_error(path + ": unexpected header, want '" + want + "'");
    }
}

std::optional<GeoPoint> parse_position(std::string_view lat_s, std::string_view lon_s) {
    const auto lat = parse_double(lat_s);
    const auto lon = parse_double(lon_s);
    if (!lat || !lon) return std::nullopt;
    try {
        return GeoPoint::make(*lat, *lon);
    } catch (const std::invalid_argument&) {
        return std::nullopt;
    }
}

// Sorted unique copy of an axis.
std::vector<double> unique_sorted(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
    return v;
}

}  // namespace

const char* buoy_model_name(BuoyModel m) {
    switch (m) {
        case BuoyModel::Isl: return "ISL+";
        case BuoyModel::Slx: return "SLX+";
        case BuoyModel::Isd: return "ISD+";
    }
    return "?";
}

std::optional<BuoyModel> parse_buoy_model(std::string_view s) {
    if (s == "ISL+") return BuoyModel::Isl;
    if (s == "SLX+") return BuoyModel::Slx;
    if (s == "ISD+") return BuoyModel::Isd;
    return std::nullopt;
}

double EchoRecord::layer_sum() const {
    double s = 0.0;
    for (double v : layers) s += v;
    return s;
}

LogbookResult read_logbook(const std::string& path) {
    static constexpr const char* kHeader[] = {"event_id", "buoy_id", "buoy_model", "kind",
                                              "date",     "lat",     "lon",        "catch_t"};
    const CsvTable t = read_csv(path);
    require_header(t, kHeader, path);

    LogbookResult out;
    std::unordered_map<std::string_view, std::size_t> seen_ids;
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        const auto& f = t.rows[r];
        const std::size_t line = t.line_numbers[r];
        const auto reject = [&](std::string reason) {
            out.rejects.push_back({line, std::move(reason)});
        };
        if (f.size() != 8) {
            reject("wrong field count");
            continue;
        }
        Event e;
        e.event_id = std::string(f[0]);
        e.buoy_id = std::string(f[1]);
        if (e.event_id.empty() || e.buoy_id.empty()) {
            reject("empty event_id or buoy_id");
            continue;
        }
        const auto model = parse_buoy_model(f[2]);
        if (!model) {
            reject("unknown buoy_model '" + std::string(f[2]) + "'");
            continue;
        }
        e.model = *model;
        if (f[3] == "SET") {
            e.kind = EventKind::Set;
        } else if (f[3] == "DEPLOY") {
            e.kind = EventKind::Deployment;
        } else {
            reject("unknown kind '" + std::string(f[3]) + "'");
            continue;
        }
        const auto date = parse_date(f[4]);
        if (!date) {
            reject("bad date");
            continue;
        }
        e.date = *date;
        const auto pos = parse_position(f[5], f[6]);
        if (!pos) {
            reject("bad position");
            continue;
        }
        e.pos = *pos;
        if (e.kind == EventKind::Set) {
            const auto c = parse_double(f[7]);
            if (!c || !std::isfinite(*c) || *c < 0.0) {
                reject("set requires a finite catch_t >= 0");
                continue;
            }
            e.catch_t = *c;
        } else {
            if (!f[7].empty()) {
                reject("deployment must have empty catch_t");
                continue;
            }
            e.catch_t = 0.0;
        }
        auto [it, inserted] = seen_ids.emplace(f[0], line);
        if (!inserted) {
            reject("duplicate event_id '" + e.event_id + "'");
            continue;
        }
        out.events.push_back(std::move(e));
    }
    return out;
}

EchoResult read_echograms(const std::string& path) {
    static constexpr const char* kHeader[] = {"buoy_id", "ts_utc", "lat", "lon", "l1", "l2",
                                              "l3",      "l4",     "l5",  "l6",  "l7", "l8",
                                              "l9",      "l10"};
    const CsvTable t = read_csv(path);
    require_header(t, kHeader, path);

    EchoResult out;
    // (buoy_id, hour) -> index into out.records, for duplicate resolution.
    std::unordered_map<std::string, std::size_t> by_key;
    by_key.reserve(t.rows.size());

    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        const auto& f = t.rows[r];
        const std::size_t line = t.line_numbers[r];
        const auto reject = [&](std::string reason) {
            out.rejects.push_back({line, std::move(reason)});
        };
        if (f.size() != 14) {
            reject("wrong field count");
            continue;
        }
        EchoRecord rec;
        rec.buoy_id = std::string(f[0]);
        if (rec.buoy_id.empty()) {
            reject("empty buoy_id");
            continue;
        }
        const auto ts = parse_timestamp(f[1]);
        if (!ts) {
            reject("bad timestamp");
            continue;
        }
        rec.t = UtcTime{ts->sec - (ts->sec % 3600 + 3600) % 3600};  // floor to hour
        const auto pos = parse_position(f[2], f[3]);
        if (!pos) {
            reject("bad position");
            continue;
        }
        rec.pos = *pos;
        bool layers_ok = true;
        for (int l = 0; l < kEchoLayers; ++l) {
            const auto v = parse_double(f[4 + static_cast<std::size_t>(l)]);
            if (!v || !std::isfinite(*v) || *v < 0.0) {
                layers_ok = false;
                break;
            }
            rec.layers[static_cast<std::size_t>(l)] = *v;
        }
        if (!layers_ok) {
            reject("bad layer value");
            continue;
        }

        std::string key = rec.buoy_id + '\x1f' + std::to_string(rec.t.sec);
        auto [it, inserted] = by_key.emplace(std::move(key), out.records.size());
        if (inserted) {
            out.records.push_back(std::move(rec));
        } else {
            // Keep the stronger reading for this (buoy, hour).
            EchoRecord& kept = out.records[it->second];
            if (rec.layer_sum() > kept.layer_sum()) std::swap(kept, rec);
            reject("duplicate (buoy_id, hour) key");
        }
    }
    return out;
}

OceanGrid read_ocean_grid(const std::string& path) {
    static constexpr const char* kHeader[] = {"date", "lat", "lon", "temp", "chl",
                                              "o2",   "sal", "thermo", "cur", "ssha"};
    const CsvTable t = read_csv(path);
    require_header(t, kHeader, path);

    struct ParsedRow {
        std::int64_t day;
        double lat, lon;
        std::array<double, kOceanVars> v;
    };
    std::vector<ParsedRow> parsed;
    parsed.reserve(t.rows.size());
    std::vector<double> lat_axis, lon_axis;
    std::vector<std::int64_t> day_axis;

    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        const auto& f = t.rows[r];
        const std::size_t line = t.line_numbers[r];
        if (f.size() != 10) {
            throw std::runtime_error(path + ':' + std::to_string(line) +
                                     ": wrong field count");
        }
        const auto date = parse_date(f[0]);
        const auto lat = parse_double(f[1]);
        const auto lon = parse_double(f[2]);
        if (!date || !lat || !lon) {
            throw std::runtime_error(path + ':' + std::to_string(line) +
                                     ": bad grid key (date/lat/lon)");
        }
        ParsedRow row;
        row.day = days_from_civil(*date);
        row.lat = *lat;
        row.lon = *lon;
        for (int v = 0; v < kOceanVars; ++v) {
            const std::string_view field = f[3 + static_cast<std::size_t>(v)];
            if (field.empty()) {
                row.v[static_cast<std::size_t>(v)] = kNaN;
            } else {
                const auto val = parse_double(field);
                if (!val) {
                    throw std::runtime_error(path + ':' + std::to_string(line) +
                                             ": bad numeric field");
                }
                row.v[static_cast<std::size_t>(v)] = *val;
            }
        }
        lat_axis.push_back(row.lat);
        lon_axis.push_back(row.lon);
        day_axis.push_back(row.day);
        parsed.push_back(row);
    }

    OceanGrid g;
    g.lats = unique_sorted(std::move(lat_axis));
    g.lons = unique_sorted(std::move(lon_axis));
    std::sort(day_axis.begin(), day_axis.end());
    day_axis.erase(std::unique(day_axis.begin(), day_axis.end()), day_axis.end());
    g.days = std::move(day_axis);

    const std::size_t n_cells = g.lats.size() * g.lons.size() * g.days.size();
    for (auto& vec : g.values) vec.assign(n_cells, kNaN);
    std::vector<bool> filled(n_cells, false);

    for (const ParsedRow& row : parsed) {
        const auto lat_it = std::lower_bound(g.lats.begin(), g.lats.end(), row.lat);
        const auto lon_it = std::lower_bound(g.lons.begin(), g.lons.end(), row.lon);
        const auto day_it = std::lower_bound(g.days.begin(), g.days.end(), row.day);
        const std::size_t idx = g.cell_index(
            static_cast<std::size_t>(day_it - g.days.begin()),
            static_cast<std::size_t>(lat_it - g.lats.begin()),
            static_cast<std::size_t>(lon_it - g.lons.begin()));
        if (filled[idx]) {
            throw std::runtime_error(path + ": duplicate grid key (" +
                                     format_date(civil_from_days(row.day)) + ", " +
                                     format_double(row.lat) + ", " + format_double(row.lon) +
                                     ")");
        }
        filled[idx] = true;
        for (int v = 0; v < kOceanVars; ++v) {
            g.values[static_cast<std::size_t>(v)][idx] = row.v[static_cast<std::size_t>(v)];
        }
    }
    return g;
}

BathyGrid read_bathy_grid(const std::string& path) {
    static constexpr const char* kHeader[] = {"lat", "lon", "depth_m"};
    const CsvTable t = read_csv(path);
    require_header(t, kHeader, path);

    struct ParsedRow {
        double lat, lon, depth;
    };
    std::vector<ParsedRow> parsed;
    parsed.reserve(t.rows.size());
    std::vector<double> lat_axis, lon_axis;

    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        const auto& f = t.rows[r];
        const std::size_t line = t.line_numbers[r];
        if (f.size() != 3) {
            throw std::runtime_error(path + ':' + std::to_string(line) +
                                     ": wrong field count");
        }
        const auto lat = parse_double(f[0]);
        const auto lon = parse_double(f[1]);
        if (!lat || !lon) {
            throw std::runtime_error(path + ':' + std::to_string(line) + ": bad grid key");
        }
        double depth = kNaN;
        if (!f[2].empty()) {
            const auto d = parse_double(f[2]);
            if (!d) {
                throw std::runtime_error(path + ':' + std::to_string(line) + ": bad depth");
            }
            depth = *d;
        }
        parsed.push_back({*lat, *lon, depth});
        lat_axis.push_back(*lat);
        lon_axis.push_back(*lon);
    }

    BathyGrid g;
    g.lats = unique_sorted(std::move(lat_axis));
    g.lons = unique_sorted(std::move(lon_axis));
    g.depth_m.assign(g.lats.size() * g.lons.size(), kNaN);
    std::vector<bool> filled(g.depth_m.size(), false);

    for (const ParsedRow& row : parsed) {
        const auto lat_it = std::lower_bound(g.lats.begin(), g.lats.end(), row.lat);
        const auto lon_it = std::lower_bound(g.lons.begin(), g.lons.end(), row.lon);
        const std::size_t idx =
            g.cell_index(static_cast<std::size_t>(lat_it - g.lats.begin()),
                         static_cast<std::size_t>(lon_it - g.lons.begin()));
        if (filled[idx]) {
            throw std::runtime_error(path + ": duplicate grid key (" +
                                     format_double(row.lat) + ", " + format_double(row.lon) +
                                     ")");
        }
        filled[idx] = true;
        g.depth_m[idx] = row.depth;
    }
    return g;
}

std::size_t nearest_axis_index(std::span<const double> axis, double value) {
    if (axis.empty()) throw std::out_of_range("empty grid axis");
    const auto it = std::lower_bound(axis.begin(), axis.end(), value);
    if (it == axis.begin()) return 0;
    if (it == axis.end()) return axis.size() - 1;
    const std::size_t hi = static_cast<std::size_t>(it - axis.begin());
    const std::size_t lo = hi - 1;
    const double d_lo = value - axis[lo];
    const double d_hi = axis[hi] - value;
    // Ties go to the smaller coordinate (the lower index).
    return d_hi < d_lo ? hi : lo;
}

OceanSample nearest_cell(const OceanGrid& grid, const GeoPoint& p, const Date& date) {
    const std::int64_t day = days_from_civil(date);
    const auto day_it = std::lower_bound(grid.days.begin(), grid.days.end(), day);
    if (day_it == grid.days.end() || *day_it != day) {
        throw std::out_of_range("date not on oceanography time axis: " + format_date(date));
    }
    const std::size_t day_idx = static_cast<std::size_t>(day_it - grid.days.begin());
    const std::size_t lat_idx = nearest_axis_index(grid.lats, p.lat);
    const std::size_t lon_idx = nearest_axis_index(grid.lons, p.lon);
    const std::size_t idx = grid.cell_index(day_idx, lat_idx, lon_idx);
    OceanSample s;
    for (int v = 0; v < kOceanVars; ++v) {
        s.v[static_cast<std::size_t>(v)] = grid.values[static_cast<std::size_t>(v)][idx];
    }
    return s;
}

double nearest_depth_m(const BathyGrid& grid, const GeoPoint& p) {
    if (grid.lats.empty() || grid.lons.empty()) return kNaN;
    const std::size_t lat_idx = nearest_axis_index(grid.lats, p.lat);
    const std::size_t lon_idx = nearest_axis_index(grid.lons, p.lon);
    return grid.depth_m[grid.cell_index(lat_idx, lon_idx)];
}

std::optional<double> thermocline_depth(std::span<const ProfileSample> profile) {
    if (profile.size() < 2) return std::nullopt;
    const double target = profile[0].temp_c - 2.0;
    for (std::size_t i = 1; i < profile.size(); ++i) {
        if (profile[i].temp_c <= target) {
            const ProfileSample& a = profile[i - 1];
            const ProfileSample& b = profile[i];
            if (a.temp_c == b.temp_c) return b.depth_m;
            const double frac = (a.temp_c - target) / (a.temp_c - b.temp_c);
            return a.depth_m + frac * (b.depth_m - a.depth_m);
        }
    }
    return std::nullopt;
}

}  // namespace fadbio
