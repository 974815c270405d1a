#pragma once

#include <map>
#include <string>
#include <vector>

#include "fadbio/pipeline.hpp"

// Turns a labeled example into a flat named feature vector. Three nested
// enrichment levels:
//   Echo:      Agg.T, Agg.L1..L10, Agg.H0..H{W-1}, N_NaN, Model.* one-hots
//   EchoOcean: + {Temp,Chl,O2,Sal,Thermo,Cur,Zos}.{0,23,47,71 intersect [0,W)}
//   All:       + Day, Month, Year, Latitude, Longitude, Ocean.* one-hots,
//                SunriseHour, SunsetHour
// Aggregations are maxima over the window matrix with missing cells imputed
// to zero first; hour index 0 is the column closest to the event. Missing
// oceanography is imputed with medians computed on the training split only.

namespace fadbio {

enum class FeatureLevel { Echo, EchoOcean, All };

const char* feature_level_name(FeatureLevel level);          // "echo", ...
std::optional<FeatureLevel> parse_feature_level(std::string_view s);

// Feature names for a level and window length; a pure function of (level, W).
std::vector<std::string> feature_names(FeatureLevel level, int w_hours);

// Display names for the ocean block, aligned with kOceanVarNames.
inline constexpr std::array<const char*, kOceanVars> kOceanFeatureNames = {
    "Temp", "Chl", "O2", "Sal", "Thermo", "Cur", "Zos"};

struct EchoAggregates {
    double total = 0.0;                         // max over all cells
    std::array<double, kEchoLayers> by_layer{}; // max over hours, per layer
    std::vector<double> by_hour;                // max over layers, per hour
    int n_missing_hours = 0;
};

EchoAggregates aggregate_matrix(const EchoWindow& window);

// Per-feature medians used to impute missing (NaN) values; only ocean
// features can be missing, but the container is keyed by name for generality.
using TrainMedians = std::map<std::string, double>;

// Medians of the finite values of each ocean feature across training rows.
TrainMedians compute_medians(const std::vector<LabeledExample>& examples,
                             const std::vector<std::size_t>& train_rows, int w_hours);

// Feature vector for one example, ordered exactly as feature_names(level, W).
// Missing ocean values take the training median (0 when the median itself is
// unavailable); every returned value is finite.
std::vector<double> assemble(const LabeledExample& ex, FeatureLevel level, int w_hours,
                             const TrainMedians& medians);

// Prediction targets.
enum class Task { Binary, Ternary, Regression, RegressionThreshold };

const char* task_name(Task t);  // "binary", "ternary", "regression", "regression100"
std::optional<Task> parse_task(std::string_view s);
bool is_classification(Task t);
int n_classes(Task t);  // 2, 3, or 1 for regression tasks

inline constexpr double kPresenceThresholdT = 10.0;   // absent/present cut
inline constexpr double kHighCatchThresholdT = 30.0;  // medium/high cut
inline constexpr double kRegressionCapT = 100.0;

// Class index (0-based) or regression target for an observed tonnage.
double label_value(double y, Task t);

}  // namespace fadbio
