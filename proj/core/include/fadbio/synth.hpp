#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "fadbio/pipeline.hpp"

// Deterministic synthetic fleet generator. One call produces a complete,
// mutually consistent set of input CSVs (logbook, echo stream, oceanography,
// bathymetry) plus ground-truth files that record the latent biomass behind
// every emitted hour and the cleaning rule each poisoned event must trip.
//
// World model, in brief:
//   - Three 12 x 12 degree boxes, one per ocean basin. Each box gets a deep
//     bathymetry carpet, a shoal band along its northern edge and a dry
//     island in its northwest corner; buoys drift well clear of both.
//   - Buoys hold a fixed longitude and random-walk in latitude below 3 knots,
//     so each buoy lives on a single mean-solar clock and window bucketing
//     has no edge cases by construction.
//   - Latent biomass = carrying capacity (lognormal across buoys)
//     x logistic colonization in soak days x smooth ocean multiplier
//     x per-day surge. Echo readings gate this through a clipped-cosine
//     diurnal cycle (high between dawn and dusk), scale by an ocean-dependent
//     acoustic visibility, add hourly lognormal noise, and are censored below
//     one tonne (the buoy transmits nothing). ocean_coupling = 0 switches off
//     both the multiplier and the visibility term.
//   - Every buoy logs one deployment and one set; the set day is drawn with
//     probability proportional to latent biomass ^ set_bias, so a positive
//     bias reproduces the "sets are not placed at random" selection effect.
//   - Violations are injected into disjoint victim buoys, one per buoy, with
//     bookkeeping exact by construction: ghost buoy ids, polar event
//     positions, transmission blackouts, events parked on the island, one
//     window record over the shoal band, one record displaced a long jump
//     south. Falsified record positions keep the buoy's longitude so the
//     record stays in its own solar-hour window column.

namespace fadbio {

struct SynthConfig {
    std::uint64_t seed = 1;
    int n_buoys = 200;
    int days = 20;  // world length; must fit deployment + soak + margin
    Date start_date{2019, 1, 10};

    double k_median_t = 32.0;  // median carrying capacity, tonnes
    double k_sigma = 0.9;      // lognormal sigma of carrying capacity
    double colonize_midpoint_d = 4.5;
    double colonize_scale_d = 1.6;
    double night_floor = 0.15;    // diurnal gate floor at night
    double day_sigma = 0.3;       // per-(buoy, solar day) surge sigma
    double reading_sigma = 0.18;  // per-hour reading noise sigma
    double catch_sigma = 0.2;     // catch measurement noise sigma
    double ocean_coupling = 1.0;  // scales biomass and visibility couplings
    double set_bias = 0.0;        // set-day weight exponent (0 = uniform)
    int min_soak_d = 9;
    int max_soak_d = 16;
    double ocean_missing_rate = 0.015;  // blank-field rate in ocean.csv

    // Victim fractions of the fleet, one rule per victim buoy.
    double rate_id_mismatch = 0.0;
    double rate_no_sunset = 0.0;
    double rate_coverage = 0.0;
    double rate_on_land = 0.0;
    double rate_shallow = 0.0;
    double rate_speeding = 0.0;
};

// Artifact-side health report; computed from the emitted CSVs.
struct SynthStats {
    double median_catch_t = 0.0;
    double positive_fraction = 0.0;  // sets with catch >= 10 t
    double high_fraction = 0.0;      // sets with catch >= 30 t
    double censored_fraction = 0.0;  // truth hours below 1 t
    double censored_expected = 0.0;  // analytic expectation from the generator
    double day_mean_latent = 0.0;    // mean truth reading, solar 07-18 h
    double night_mean_latent = 0.0;  // mean truth reading, solar 20-05 h
    std::int64_t n_events = 0;
    std::int64_t n_echo_rows = 0;
    std::vector<std::string> failures;

    bool ok() const { return failures.empty(); }
};

struct SynthWorld {
    SynthConfig config;
    std::string logbook_csv;
    std::string echo_csv;
    std::string ocean_csv;
    std::string bathy_csv;
    std::string truth_hours_csv;   // buoy_id,ts_utc,latent_b (every live hour)
    std::string truth_events_csv;  // event_id,rule_violation
    std::array<std::int64_t, kDropRules> injected{};  // realized, per DropRule
    SynthStats stats;
};

// Generates one world. Byte-identical output for equal configs. Throws
// std::invalid_argument for inconsistent configuration.
SynthWorld generate(const SynthConfig& config);

// Recomputes the statistics from the world's CSV strings and applies the
// declared tolerance checks (median catch near the configured level, censoring
// fraction near the analytic expectation, day biomass above night biomass,
// workable class balance).
SynthStats validate(const SynthWorld& world);

// Writes the six CSVs into dir (created if needed) under fixed names:
// logbook.csv echo.csv ocean.csv bathy.csv ground_truth.csv
// ground_truth_events.csv.
void write_world(const SynthWorld& world, const std::string& dir);

}  // namespace fadbio
