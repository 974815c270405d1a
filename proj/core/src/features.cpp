#include "fadbio/features.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace fadbio {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Ocean feature display name for variable v and sample hour h.
std::string ocean_feature_name(int v, int hour) {
    return std::string(kOceanFeatureNames[static_cast<std::size_t>(v)]) + '.' +
           std::to_string(hour);
}

double median_of(std::vector<double>& v) {
    if (v.empty()) return kNaN;
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

const char* feature_level_name(FeatureLevel level) {
    switch (level) {
        case FeatureLevel::Echo: return "echo";
        case FeatureLevel::EchoOcean: return "echo_ocean";
        case FeatureLevel::All: return "all";
    }
    return "?";
}

std::optional<FeatureLevel> parse_feature_level(std::string_view s) {
    if (s == "echo") return FeatureLevel::Echo;
    if (s == "echo_ocean") return FeatureLevel::EchoOcean;
    if (s == "all") return FeatureLevel::All;
    return std::nullopt;
}

std::vector<std::string> feature_names(FeatureLevel level, int w_hours) {
    std::vector<std::string> names;
    names.reserve(static_cast<std::size_t>(w_hours) + 50);

    names.emplace_back("Agg.T");
    for (int l = 1; l <= kEchoLayers; ++l) names.push_back("Agg.L" + std::to_string(l));
    for (int h = 0; h < w_hours; ++h) names.push_back("Agg.H" + std::to_string(h));
    names.emplace_back("N_NaN");
    names.emplace_back("Model.ISL+");
    names.emplace_back("Model.SLX+");
    names.emplace_back("Model.ISD+");

    if (level == FeatureLevel::Echo) return names;

    for (int v = 0; v < kOceanVars; ++v) {
        for (int hour : kOceanSampleHours) {
            if (hour < w_hours) names.push_back(ocean_feature_name(v, hour));
        }
    }
    if (level == FeatureLevel::EchoOcean) return names;

    names.emplace_back("Day");
    names.emplace_back("Month");
    names.emplace_back("Year");
    names.emplace_back("Latitude");
    names.emplace_back("Longitude");
    names.emplace_back("Ocean.ATL");
    names.emplace_back("Ocean.IND");
    names.emplace_back("Ocean.PAC");
    names.emplace_back("SunriseHour");
    names.emplace_back("SunsetHour");
    return names;
}

EchoAggregates aggregate_matrix(const EchoWindow& window) {
    EchoAggregates agg;
    agg.by_layer.fill(0.0);
    agg.by_hour.assign(static_cast<std::size_t>(window.w_hours), 0.0);

    for (int h = 0; h < window.w_hours; ++h) {
        const auto& cell = window.cols[static_cast<std::size_t>(h)];
        if (!cell) {
            agg.n_missing_hours += 1;
            continue;  // a missing hour imputes to zero, which the maxima start at
        }
        for (int l = 0; l < kEchoLayers; ++l) {
            const double v = cell->layers[static_cast<std::size_t>(l)];
            auto& layer_max = agg.by_layer[static_cast<std::size_t>(l)];
            auto& hour_max = agg.by_hour[static_cast<std::size_t>(h)];
            layer_max = std::max(layer_max, v);
            hour_max = std::max(hour_max, v);
            agg.total = std::max(agg.total, v);
        }
    }
    return agg;
}

TrainMedians compute_medians(const std::vector<LabeledExample>& examples,
                             const std::vector<std::size_t>& train_rows, int w_hours) {
    TrainMedians medians;
    for (int v = 0; v < kOceanVars; ++v) {
        for (int s = 0; s < 4; ++s) {
            const int hour = kOceanSampleHours[s];
            if (hour >= w_hours) continue;
            std::vector<double> vals;
            vals.reserve(train_rows.size());
            for (std::size_t row : train_rows) {
                const double x =
                    examples[row].ocean.v[static_cast<std::size_t>(v)][static_cast<std::size_t>(s)];
                if (!std::isnan(x)) vals.push_back(x);
            }
            const double med = median_of(vals);
            if (!std::isnan(med)) medians[ocean_feature_name(v, hour)] = med;
        }
    }
    return medians;
}

std::vector<double> assemble(const LabeledExample& ex, FeatureLevel level, int w_hours,
                             const TrainMedians& medians) {
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(w_hours) + 50);

    const EchoAggregates agg = aggregate_matrix(ex.window);
    out.push_back(agg.total);
    for (double v : agg.by_layer) out.push_back(v);
    for (double v : agg.by_hour) out.push_back(v);
    out.push_back(static_cast<double>(agg.n_missing_hours));
    out.push_back(ex.model == BuoyModel::Isl ? 1.0 : 0.0);
    out.push_back(ex.model == BuoyModel::Slx ? 1.0 : 0.0);
    out.push_back(ex.model == BuoyModel::Isd ? 1.0 : 0.0);

    if (level == FeatureLevel::Echo) return out;

    for (int v = 0; v < kOceanVars; ++v) {
        for (int s = 0; s < 4; ++s) {
            const int hour = kOceanSampleHours[s];
            if (hour >= w_hours) continue;
            double val = ex.ocean.v[static_cast<std::size_t>(v)][static_cast<std::size_t>(s)];
            if (std::isnan(val)) {
                const auto it = medians.find(ocean_feature_name(v, hour));
                val = it == medians.end() ? 0.0 : it->second;
            }
            out.push_back(val);
        }
    }
    if (level == FeatureLevel::EchoOcean) return out;

    out.push_back(static_cast<double>(ex.date.day));
    out.push_back(static_cast<double>(ex.date.month));
    out.push_back(static_cast<double>(ex.date.year));
    out.push_back(ex.pos.lat);
    out.push_back(ex.pos.lon);
    out.push_back(ex.basin == OceanBasin::Atlantic ? 1.0 : 0.0);
    out.push_back(ex.basin == OceanBasin::Indian ? 1.0 : 0.0);
    out.push_back(ex.basin == OceanBasin::Pacific ? 1.0 : 0.0);
    out.push_back(ex.sunrise_hour);
    out.push_back(ex.sunset_hour);
    return out;
}

const char* task_name(Task t) {
    switch (t) {
        case Task::Binary: return "binary";
        case Task::Ternary: return "ternary";
        case Task::Regression: return "regression";
        case Task::RegressionThreshold: return "regression100";
    }
    return "?";
}

std::optional<Task> parse_task(std::string_view s) {
    if (s == "binary") return Task::Binary;
    if (s == "ternary") return Task::Ternary;
    if (s == "regression") return Task::Regression;
    if (s == "regression100") return Task::RegressionThreshold;
    return std::nullopt;
}

bool is_classification(Task t) { return t == Task::Binary || t == Task::Ternary; }

int n_classes(Task t) {
    switch (t) {
        case Task::Binary: return 2;
        case Task::Ternary: return 3;
        default: return 1;
    }
}

double label_value(double y, Task t) {
    switch (t) {
        case Task::Binary:
            return y >= kPresenceThresholdT ? 1.0 : 0.0;
        case Task::Ternary:
            if (y < kPresenceThresholdT) return 0.0;
            return y < kHighCatchThresholdT ? 1.0 : 2.0;
        case Task::Regression:
            return y;
        case Task::RegressionThreshold:
            return std::min(y, kRegressionCapT);
    }
    return y;
}

}  // namespace fadbio
