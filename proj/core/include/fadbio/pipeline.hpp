#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "fadbio/geo.hpp"
#include "fadbio/ingest.hpp"

// Dataset construction: match logbook events to echo-sounder streams, cut
// sunset-anchored windows, apply the cleaning rules, and attach oceanography.
//
// Window geometry. Every window is anchored at a sunset and bucketed on the
// mean-solar timeline (each record converted with its own longitude, the
// anchor with the event's longitude):
//   - Set on date D: anchor = sunset(D - 1) at the event position; the window
//     covers the W solar hours ending at the anchor. Column x holds the
//     record x..x+1 hours BEFORE the anchor, so column 0 is closest to the
//     event and the anchor instant itself lands in column 0.
//   - Deployment on date D: anchor = sunset(D) and the window covers the W
//     solar hours after it; column x holds the record x..x+1 hours AFTER the
//     anchor (the anchor instant itself is excluded). Again column 0 is
//     closest to the event. The window sits entirely after the deployment, so
//     it cannot contain the intervention.
// Two records falling in one bucket keep the larger layer sum.

namespace fadbio {

// One populated hour column of a window.
struct WindowCell {
    UtcTime t{};
    SolarTime t_solar{};
    GeoPoint pos{};
    std::array<double, kEchoLayers> layers{};

    double layer_sum() const;
};

struct EchoWindow {
    std::string event_id;
    int w_hours = 0;
    bool forward = false;        // false: set (backward), true: deployment
    UtcTime anchor{};            // the anchoring sunset instant
    SolarTime anchor_solar{};
    SolarDay anchor_day{};       // solar day the anchor belongs to
    std::vector<std::optional<WindowCell>> cols;  // size w_hours, index = hour distance

    int n_zero_readings() const;  // missing hour count, 0..W
    // Matrix accessor: tonnes at (layer 0..9, hour 0..W-1); nullopt = missing.
    std::optional<double> at(int layer, int hour) const;
};

enum class SkipReason { NoSunset, NoRecords };

struct ExtractOutcome {
    std::optional<EchoWindow> window;    // engaged on success
    std::optional<SkipReason> skip;      // engaged when skipped
};

// Per-buoy record stream, sorted by time.
struct BuoyTrack {
    std::vector<const EchoRecord*> records;  // ascending t
};

struct LinkResult {
    std::map<std::string, BuoyTrack> tracks;    // buoy_id -> stream
    std::vector<std::string> unmatched_events;  // event_ids with no stream
};

// Groups records per buoy and flags events whose buoy never transmitted.
LinkResult link_events(const std::vector<Event>& events,
                       const std::vector<EchoRecord>& records);

// Cuts the window for one event from its buoy's stream. Skips (rather than
// fails) when the anchor day lacks a sunset, or when no record falls in the
// span and the buoy was silent for the span +/- 7 days.
ExtractOutcome extract_window(const Event& event, const BuoyTrack& track, int w_hours);

// Why an event was dropped, in decision order.
enum class DropRule {
    IdMismatch,            // buoy id matches no echo stream
    NoSunset,              // anchor day has no sunset (polar)
    InsufficientCoverage,  // empty window and silent buoy within +/- 7 days
    Overlap,               // window reaches into the event's own solar day
    OnLand,                // event position on land (depth <= 0)
    Shallow,               // a window record over < 200 m of water
    Speeding,              // consecutive window records drifted > 3 knots
};
inline constexpr int kDropRules = 7;
const char* drop_rule_name(DropRule r);

struct CleanReport {
    std::array<std::int64_t, kDropRules> dropped_by_rule{};
    std::int64_t survivors = 0;
    std::map<std::string, DropRule> dropped;  // event_id -> first rule hit

    std::int64_t total_dropped() const;
};

// Applies the cleaning rules in declared order; the first rule that fires
// claims the event. Survivors keep their windows; the report accounts for
// every input event exactly once.
struct CleanResult {
    std::vector<std::size_t> surviving_events;  // indices into the event vector
    CleanReport report;
};
CleanResult clean(const std::vector<Event>& events,
                  const std::vector<ExtractOutcome>& outcomes,
                  const LinkResult& link, const BathyGrid& bathy);

// Daily oceanography sampled at up to four window hours (0, 23, 47, 71 hours
// from the anchor; hours beyond the window stay missing). Each sample uses
// the position of the nearest populated hour (ties toward the anchor) and
// that record's UTC calendar day; an all-missing window falls back to the
// event position and the nominal hour instant.
inline constexpr int kOceanSampleHours[4] = {0, 23, 47, 71};

struct OceanBlock {
    // [variable][sample] per kOceanVarNames x kOceanSampleHours; NaN missing.
    std::array<std::array<double, 4>, kOceanVars> v{};
    bool all_missing = true;
};

OceanBlock attach_ocean(const EchoWindow& window, const Event& event,
                        const OceanGrid& grid);

enum class OceanBasin { Atlantic, Indian, Pacific };
OceanBasin ocean_basin(const GeoPoint& p);
const char* ocean_basin_name(OceanBasin b);

// One dataset row: the window, its oceanography, event context and the label.
struct LabeledExample {
    std::string event_id;
    EventKind kind = EventKind::Set;
    BuoyModel model = BuoyModel::Isl;
    Date date{};
    GeoPoint pos{};
    OceanBasin basin = OceanBasin::Atlantic;
    double sunrise_hour = 0.0;  // solar hours of the anchor day
    double sunset_hour = 0.0;
    EchoWindow window;
    OceanBlock ocean;
    double y = 0.0;  // observed catch (sets) or 0 (deployments)
};

struct BuildOutput {
    std::vector<LabeledExample> examples;  // sorted by event_id
    CleanReport report;
};

// Full construction pass for one window length.
BuildOutput build_dataset(const std::vector<Event>& events,
                          const std::vector<EchoRecord>& records,
                          const OceanGrid& ocean, const BathyGrid& bathy, int w_hours);

}  // namespace fadbio
