#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fadbio/geo.hpp"
#include "fadbio/time.hpp"

// Parsing and indexing of the four raw inputs: the event logbook, the
// echo-sounder stream, the gridded oceanography and the bathymetry grid.
// Row-level problems never abort a parse; each bad row is collected as a
// reject with its line number and reason. Structural problems (missing file,
// wrong header, duplicate grid keys) throw.

namespace fadbio {

inline constexpr int kEchoLayers = 10;         // vertical cells per record
inline constexpr double kLayerThicknessM = 11.2;
inline constexpr double kFirstLayerTopM = 3.0;  // sounder blanking zone

enum class BuoyModel { Isl, Slx, Isd };
enum class EventKind { Set, Deployment };

const char* buoy_model_name(BuoyModel m);      // "ISL+", "SLX+", "ISD+"
std::optional<BuoyModel> parse_buoy_model(std::string_view s);

// One logbook row: a set (with catch tonnage) or a deployment.
struct Event {
    std::string event_id;
    std::string buoy_id;
    BuoyModel model = BuoyModel::Isl;
    EventKind kind = EventKind::Set;
    Date date{};
    GeoPoint pos{};
    double catch_t = 0.0;  // 0 for deployments
};

// One echo-sounder transmission: hourly maxima for ten 11.2 m layers,
// 3..115 m, tonnes, stamped with the buoy's last known position.
struct EchoRecord {
    std::string buoy_id;
    UtcTime t{};           // floored to the hour on ingest
    GeoPoint pos{};
    std::array<double, kEchoLayers> layers{};

    double layer_sum() const;
};

struct RowReject {
    std::size_t line_no = 0;
    std::string reason;
};

struct LogbookResult {
    std::vector<Event> events;
    std::vector<RowReject> rejects;
};

struct EchoResult {
    std::vector<EchoRecord> records;
    std::vector<RowReject> rejects;
};

// logbook.csv: event_id,buoy_id,buoy_model,kind,date,lat,lon,catch_t
// kind SET requires a catch value; kind DEPLOY requires the field empty.
LogbookResult read_logbook(const std::string& path);

// echo.csv: buoy_id,ts_utc,lat,lon,l1..l10. Duplicate (buoy, hour) keys keep
// the record with the larger layer sum and reject the other.
EchoResult read_echograms(const std::string& path);

// Daily gridded oceanography on a regular lat/lon lattice. Cells may be
// missing (absent row or empty field) and are stored as NaN.
inline constexpr int kOceanVars = 7;
inline constexpr std::array<const char*, kOceanVars> kOceanVarNames = {
    "temp", "chl", "o2", "sal", "thermo", "cur", "ssha"};

struct OceanGrid {
    std::vector<double> lats;        // sorted ascending, unique
    std::vector<double> lons;
    std::vector<std::int64_t> days;  // civil day numbers, sorted unique
    // values[v][(day_idx * nlat + lat_idx) * nlon + lon_idx]; NaN = missing.
    std::array<std::vector<double>, kOceanVars> values;

    std::size_t cell_index(std::size_t day_idx, std::size_t lat_idx,
                           std::size_t lon_idx) const {
        return (day_idx * lats.size() + lat_idx) * lons.size() + lon_idx;
    }
};

// Static bathymetry: water depth in meters, positive down; <= 0 is land.
struct BathyGrid {
    std::vector<double> lats;
    std::vector<double> lons;
    std::vector<double> depth_m;  // [lat_idx * nlon + lon_idx]; NaN = missing

    std::size_t cell_index(std::size_t lat_idx, std::size_t lon_idx) const {
        return lat_idx * lons.size() + lon_idx;
    }
};

// ocean.csv: date,lat,lon,temp,chl,o2,sal,thermo,cur,ssha (fields may be
// empty). Duplicate (date,lat,lon) keys are a structural error and throw.
OceanGrid read_ocean_grid(const std::string& path);

// bathy.csv: lat,lon,depth_m. Duplicate (lat,lon) keys throw.
BathyGrid read_bathy_grid(const std::string& path);

// All seven variables at one grid node.
struct OceanSample {
    std::array<double, kOceanVars> v{};  // NaN = missing
};

// Nearest lattice node by squared degree distance; ties resolve toward the
// smaller latitude, then the smaller longitude. The date must be on the grid's
// time axis, else throws std::out_of_range.
OceanSample nearest_cell(const OceanGrid& grid, const GeoPoint& p, const Date& date);

// Nearest-node water depth; NaN when the grid is empty or the cell missing.
double nearest_depth_m(const BathyGrid& grid, const GeoPoint& p);

// Index of the nearest value in a sorted ascending axis, smaller index on ties.
std::size_t nearest_axis_index(std::span<const double> axis, double value);

// Depth (m) where temperature first drops 2 degC below the shallowest reading,
// linearly interpolated between profile samples; nullopt when never crossed.
// The profile must be sorted by increasing depth with >= 2 samples.
struct ProfileSample {
    double depth_m;
    double temp_c;
};
std::optional<double> thermocline_depth(std::span<const ProfileSample> profile);

}  // namespace fadbio
