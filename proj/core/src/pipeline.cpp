#include "fadbio/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace fadbio {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr std::int64_t kHourSec = 3600;
constexpr std::int64_t kCoverageMarginSec = 7 * 86400;
constexpr double kMinDepthM = 200.0;
constexpr double kMaxDriftKnots = 3.0;

}  // namespace

double WindowCell::layer_sum() const {
    double s = 0.0;
    for (double v : layers) s += v;
    return s;
}

int EchoWindow::n_zero_readings() const {
    int n = 0;
    for (const auto& c : cols) n += c.has_value() ? 0 : 1;
    return n;
}

std::optional<double> EchoWindow::at(int layer, int hour) const {
    const auto& c = cols[static_cast<std::size_t>(hour)];
    if (!c) return std::nullopt;
    return c->layers[static_cast<std::size_t>(layer)];
}

const char* drop_rule_name(DropRule r) {
    switch (r) {
        case DropRule::IdMismatch: return "id_mismatch";
        case DropRule::NoSunset: return "no_sunset";
        case DropRule::InsufficientCoverage: return "insufficient_coverage";
        case DropRule::Overlap: return "overlap";
        case DropRule::OnLand: return "on_land";
        case DropRule::Shallow: return "shallow";
        case DropRule::Speeding: return "speeding";
    }
    return "?";
}

std::int64_t CleanReport::total_dropped() const {
    std::int64_t n = 0;
    for (std::int64_t c : dropped_by_rule) n += c;
    return n;
}

LinkResult link_events(const std::vector<Event>& events,
                       const std::vector<EchoRecord>& records) {
    LinkResult out;
    for (const EchoRecord& r : records) {
        out.tracks[r.buoy_id].records.push_back(&r);
    }
    for (auto& [id, track] : out.tracks) {
        std::sort(track.records.begin(), track.records.end(),
                  [](const EchoRecord* a, const EchoRecord* b) { return a->t < b->t; });
    }
    for (const Event& e : events) {
        if (!out.tracks.contains(e.buoy_id)) out.unmatched_events.push_back(e.event_id);
    }
    return out;
}

ExtractOutcome extract_window(const Event& event, const BuoyTrack& track, int w_hours) {
    ExtractOutcome out;

    const Date anchor_date =
        event.kind == EventKind::Set ? date_plus_days(event.date, -1) : event.date;
    const SolarDay day = solar_day(event.pos, anchor_date);
    if (!day.has_sun_events()) {
        out.skip = SkipReason::NoSunset;
        return out;
    }

    EchoWindow w;
    w.event_id = event.event_id;
    w.w_hours = w_hours;
    w.forward = event.kind == EventKind::Deployment;
    w.anchor = day.sunset;
    w.anchor_solar = to_solar_time(event.pos.lon, day.sunset);
    w.anchor_day = day;
    w.cols.assign(static_cast<std::size_t>(w_hours), std::nullopt);

    const std::int64_t span_sec = static_cast<std::int64_t>(w_hours) * kHourSec;
    bool any = false;
    for (const EchoRecord* r : track.records) {
        const SolarTime rs = to_solar_time(r->pos.lon, r->t);
        std::int64_t col;
        if (!w.forward) {
            // Covers (anchor - W h, anchor]; column x is x..x+1 hours before.
            const std::int64_t diff = w.anchor_solar.sec - rs.sec;
            if (diff < 0 || diff >= span_sec) continue;
            col = diff / kHourSec;
        } else {
            // Covers (anchor, anchor + W h]; column x is x..x+1 hours after.
            const std::int64_t diff = rs.sec - w.anchor_solar.sec;
            if (diff <= 0 || diff > span_sec) continue;
            col = (diff - 1) / kHourSec;
        }
        auto& cell = w.cols[static_cast<std::size_t>(col)];
        const double sum = r->layer_sum();
        if (cell && cell->layer_sum() >= sum) continue;  // keep the stronger reading
        cell = WindowCell{r->t, rs, r->pos, r->layers};
        any = true;
    }

    if (!any) {
        // All-missing windows stay in the dataset only when the buoy was
        // demonstrably alive near the span.
        const std::int64_t span_lo =
            w.forward ? w.anchor.sec : w.anchor.sec - span_sec;
        const std::int64_t span_hi =
            w.forward ? w.anchor.sec + span_sec : w.anchor.sec;
        bool transmitted_nearby = false;
        for (const EchoRecord* r : track.records) {
            if (r->t.sec >= span_lo - kCoverageMarginSec &&
                r->t.sec <= span_hi + kCoverageMarginSec) {
                transmitted_nearby = true;
                break;
            }
        }
        if (!transmitted_nearby) {
            out.skip = SkipReason::NoRecords;
            return out;
        }
    }

    out.window = std::move(w);
    return out;
}

namespace {

// Rule 2: the window must not reach into the period when the event's human
// intervention could have happened. For sets that period is the whole event
// day (in solar time); for deployments, which anchor at the event day's own
// sunset, it is everything at or before the anchor.
bool window_overlaps_event(const Event& event, const EchoWindow& w) {
    if (!w.forward) {
        const std::int64_t event_day_start =
            days_from_civil(event.date) * 86400;
        for (const auto& c : w.cols) {
            if (c && c->t_solar.sec >= event_day_start) return true;
        }
        return false;
    }
    for (const auto& c : w.cols) {
        if (c && c->t_solar.sec <= w.anchor_solar.sec) return true;
    }
    return false;
}

bool window_has_shallow_record(const EchoWindow& w, const BathyGrid& bathy) {
    for (const auto& c : w.cols) {
        if (!c) continue;
        const double depth = nearest_depth_m(bathy, c->pos);
        if (!std::isnan(depth) && depth < kMinDepthM) return true;
    }
    return false;
}

bool window_has_speeding_pair(const EchoWindow& w) {
    // Consecutive populated cells in time order. Backward windows store the
    // latest hour first, so iterate columns accordingly.
    const WindowCell* prev = nullptr;
    const auto scan = [&](const std::optional<WindowCell>& c) {
        if (!c) return false;
        bool hit = false;
        if (prev) {
            const std::int64_t elapsed = c->t.sec - prev->t.sec;
            if (elapsed > 0 && speed_knots(prev->pos, c->pos, elapsed) > kMaxDriftKnots) {
                hit = true;
            }
        }
        prev = &*c;
        return hit;
    };
    if (w.forward) {
        for (const auto& c : w.cols) {
            if (scan(c)) return true;
        }
    } else {
        for (auto it = w.cols.rbegin(); it != w.cols.rend(); ++it) {
            if (scan(*it)) return true;
        }
    }
    return false;
}

}  // namespace

CleanResult clean(const std::vector<Event>& events,
                  const std::vector<ExtractOutcome>& outcomes,
                  const LinkResult& link, const BathyGrid& bathy) {
    CleanResult out;
    const auto drop = [&](const Event& e, DropRule r) {
        out.report.dropped_by_rule[static_cast<std::size_t>(r)] += 1;
        out.report.dropped.emplace(e.event_id, r);
    };

    for (std::size_t i = 0; i < events.size(); ++i) {
        const Event& e = events[i];
        if (!link.tracks.contains(e.buoy_id)) {
            drop(e, DropRule::IdMismatch);
            continue;
        }
        const ExtractOutcome& oc = outcomes[i];
        if (oc.skip) {
            drop(e, *oc.skip == SkipReason::NoSunset ? DropRule::NoSunset
                                                     : DropRule::InsufficientCoverage);
            continue;
        }
        const EchoWindow& w = *oc.window;
        if (window_overlaps_event(e, w)) {
            drop(e, DropRule::Overlap);
            continue;
        }
        const double event_depth = nearest_depth_m(bathy, e.pos);
        if (!std::isnan(event_depth) && event_depth <= 0.0) {
            drop(e, DropRule::OnLand);
            continue;
        }
        if (window_has_shallow_record(w, bathy)) {
            drop(e, DropRule::Shallow);
            continue;
        }
        if (window_has_speeding_pair(w)) {
            drop(e, DropRule::Speeding);
            continue;
        }
        out.surviving_events.push_back(i);
        out.report.survivors += 1;
    }
    return out;
}

OceanBlock attach_ocean(const EchoWindow& window, const Event& event,
                        const OceanGrid& grid) {
    OceanBlock out;
    for (auto& row : out.v) row.fill(kNaN);

    // Populated column indices, for nearest-hour search.
    std::vector<int> populated;
    for (int c = 0; c < window.w_hours; ++c) {
        if (window.cols[static_cast<std::size_t>(c)]) populated.push_back(c);
    }

    for (int s = 0; s < 4; ++s) {
        const int hour = kOceanSampleHours[s];
        if (hour >= window.w_hours) continue;  // beyond this window: stays missing

        GeoPoint pos{};
        Date day{};
        if (!populated.empty()) {
            int best = populated.front();
            for (int c : populated) {
                const int d_new = std::abs(c - hour);
                const int d_best = std::abs(best - hour);
                if (d_new < d_best || (d_new == d_best && c < best)) best = c;
            }
            const WindowCell& cell = *window.cols[static_cast<std::size_t>(best)];
            pos = cell.pos;
            day = date_of(cell.t);
        } else {
            const std::int64_t nominal =
                window.anchor.sec +
                (window.forward ? 1 : -1) * static_cast<std::int64_t>(hour) * kHourSec;
            pos = event.pos;
            day = date_of(UtcTime{nominal});
        }

        try {
            const OceanSample sample = nearest_cell(grid, pos, day);
            for (int v = 0; v < kOceanVars; ++v) {
                const double val = sample.v[static_cast<std::size_t>(v)];
                out.v[static_cast<std::size_t>(v)][static_cast<std::size_t>(s)] = val;
                if (!std::isnan(val)) out.all_missing = false;
            }
        } catch (const std::out_of_range&) {
            // Date off the grid axis: all variables stay missing for this sample.
        }
    }
    return out;
}

OceanBasin ocean_basin(const GeoPoint& p) {
    if (p.lon >= -70.0 && p.lon < 20.0) return OceanBasin::Atlantic;
    if (p.lon >= 20.0 && p.lon < 130.0 && p.lat < 30.0) return OceanBasin::Indian;
    return OceanBasin::Pacific;
}

const char* ocean_basin_name(OceanBasin b) {
    switch (b) {
        case OceanBasin::Atlantic: return "ATL";
        case OceanBasin::Indian: return "IND";
        case OceanBasin::Pacific: return "PAC";
    }
    return "?";
}

BuildOutput build_dataset(const std::vector<Event>& events,
                          const std::vector<EchoRecord>& records,
                          const OceanGrid& ocean, const BathyGrid& bathy, int w_hours) {
    const LinkResult link = link_events(events, records);

    static const BuoyTrack kEmptyTrack;
    std::vector<ExtractOutcome> outcomes(events.size());
    for (std::size_t i = 0; i < events.size(); ++i) {
        const auto it = link.tracks.find(events[i].buoy_id);
        if (it == link.tracks.end()) continue;  // clean() drops it as IdMismatch
        outcomes[i] = extract_window(events[i], it->second, w_hours);
    }

    const CleanResult cleaned = clean(events, outcomes, link, bathy);

    BuildOutput out;
    out.report = cleaned.report;
    out.examples.reserve(cleaned.surviving_events.size());
    for (std::size_t idx : cleaned.surviving_events) {
        const Event& e = events[idx];
        LabeledExample ex;
        ex.event_id = e.event_id;
        ex.kind = e.kind;
        ex.model = e.model;
        ex.date = e.date;
        ex.pos = e.pos;
        ex.basin = ocean_basin(e.pos);
        ex.window = std::move(*outcomes[idx].window);
        const SolarDay& day = ex.window.anchor_day;
        ex.sunrise_hour = hour_of_day(to_solar_time(e.pos.lon, day.sunrise));
        ex.sunset_hour = hour_of_day(to_solar_time(e.pos.lon, day.sunset));
        ex.ocean = attach_ocean(ex.window, e, ocean);
        ex.y = e.kind == EventKind::Set ? e.catch_t : 0.0;
        out.examples.push_back(std::move(ex));
    }
    std::sort(out.examples.begin(), out.examples.end(),
              [](const LabeledExample& a, const LabeledExample& b) {
                  return a.event_id < b.event_id;
              });
    return out;
}

}  // namespace fadbio
