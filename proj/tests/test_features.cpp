#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <string>
#include <vector>

#include "fadbio/features.hpp"
#include "fadbio/rng.hpp"
#include "oracles.hpp"

using namespace fadbio;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

EchoWindow random_window(Rng& rng, int w_hours) {
    EchoWindow w;
    w.w_hours = w_hours;
    w.cols.assign(static_cast<std::size_t>(w_hours), std::nullopt);
    for (int h = 0; h < w_hours; ++h) {
        if (rng.next_double() < 0.3) continue;
        WindowCell c;
        c.t = UtcTime{h * 3600};
        c.t_solar = SolarTime{h * 3600};
        c.pos = GeoPoint::make(0, 0);
        for (double& l : c.layers) l = rng.uniform(0.0, 5.0);
        w.cols[static_cast<std::size_t>(h)] = c;
    }
    return w;
}

std::size_t index_of(const std::vector<std::string>& names, const std::string& name) {
    const auto it = std::find(names.begin(), names.end(), name);
    REQUIRE(it != names.end());
    return static_cast<std::size_t>(it - names.begin());
}

}  // namespace

TEST_CASE("window aggregation matches a brute-force scan") {
    Rng rng(20240517);
    for (int w_hours : {24, 48, 72}) {
        for (int trial = 0; trial < 20; ++trial) {
            const EchoWindow w = random_window(rng, w_hours);
            const EchoAggregates agg = aggregate_matrix(w);
            const oracle::BruteAggregates ref = oracle::brute_aggregates(w);
            CHECK(agg.total == ref.total);
            CHECK(agg.n_missing_hours == ref.missing);
            for (int l = 0; l < kEchoLayers; ++l) {
                CHECK(agg.by_layer[static_cast<std::size_t>(l)] ==
                      ref.by_layer[static_cast<std::size_t>(l)]);
            }
            REQUIRE(agg.by_hour.size() == static_cast<std::size_t>(w_hours));
            for (int h = 0; h < w_hours; ++h) {
                CHECK(agg.by_hour[static_cast<std::size_t>(h)] ==
                      ref.by_hour[static_cast<std::size_t>(h)]);
            }
        }
    }
}

TEST_CASE("feature name lists are complete, ordered and unique") {
    const std::vector<std::string> echo72 = feature_names(FeatureLevel::Echo, 72);
    CHECK(echo72.size() == 87);
    CHECK(echo72[0] == "Agg.T");
    CHECK(echo72[1] == "Agg.L1");
    CHECK(echo72[10] == "Agg.L10");
    CHECK(echo72[11] == "Agg.H0");
    CHECK(echo72[82] == "Agg.H71");
    CHECK(echo72[83] == "N_NaN");
    CHECK(echo72[84] == "Model.ISL+");
    CHECK(echo72[86] == "Model.ISD+");

    const std::vector<std::string> eo24 = feature_names(FeatureLevel::EchoOcean, 24);
    CHECK(eo24.size() == 53);  // 39 echo features + 7 variables x hours {0, 23}
    CHECK(eo24[39] == "Temp.0");
    CHECK(eo24[40] == "Temp.23");
    CHECK(eo24.back() == "Zos.23");

    const std::vector<std::string> all72 = feature_names(FeatureLevel::All, 72);
    CHECK(all72.size() == 125);  // 87 + 7 x 4 ocean samples + 10 context columns
    CHECK(all72[87] == "Temp.0");
    CHECK(all72[90] == "Temp.71");
    CHECK(all72[114] == "Zos.71");
    const std::vector<std::string> tail = {"Day",       "Month",     "Year",
                                           "Latitude",  "Longitude", "Ocean.ATL",
                                           "Ocean.IND", "Ocean.PAC", "SunriseHour",
                                           "SunsetHour"};
    CHECK(std::equal(tail.begin(), tail.end(), all72.end() - 10));

    CHECK(feature_names(FeatureLevel::All, 24).size() == 63);
    CHECK(feature_names(FeatureLevel::EchoOcean, 72).size() == 115);

    for (const auto& names : {echo72, eo24, all72}) {
        const std::set<std::string> unique(names.begin(), names.end());
        CHECK(unique.size() == names.size());
    }

    CHECK(std::string(feature_level_name(FeatureLevel::EchoOcean)) == "echo_ocean");
    CHECK(parse_feature_level("all") == FeatureLevel::All);
    CHECK_FALSE(parse_feature_level("ALL").has_value());
}

TEST_CASE("assembled vectors line up with the name list") {
    LabeledExample ex;
    ex.event_id = "E1";
    ex.kind = EventKind::Set;
    ex.model = BuoyModel::Slx;
    ex.date = {2019, 3, 5};
    ex.pos = GeoPoint::make(-5.25, 57.5);
    ex.basin = OceanBasin::Indian;
    ex.sunrise_hour = 6.25;
    ex.sunset_hour = 18.5;
    ex.window.w_hours = 24;
    ex.window.cols.assign(24, std::nullopt);
    WindowCell c0;
    c0.layers[0] = 4.0;
    c0.layers[5] = 7.0;
    WindowCell c3;
    c3.layers[2] = 9.0;
    ex.window.cols[0] = c0;
    ex.window.cols[3] = c3;
    for (auto& var : ex.ocean.v) var.fill(kNaN);
    ex.ocean.v[0][0] = 25.0;  // Temp at the anchor hour
    ex.y = 42.0;

    TrainMedians medians;
    medians["Chl.0"] = 0.5;

    const std::vector<std::string> names = feature_names(FeatureLevel::All, 24);
    const std::vector<double> x = assemble(ex, FeatureLevel::All, 24, medians);
    REQUIRE(x.size() == names.size());
    for (double v : x) CHECK(std::isfinite(v));

    const auto at = [&](const std::string& n) { return x[index_of(names, n)]; };
    CHECK(at("Agg.T") == 9.0);
    CHECK(at("Agg.L1") == 4.0);
    CHECK(at("Agg.L3") == 9.0);
    CHECK(at("Agg.L6") == 7.0);
    CHECK(at("Agg.L2") == 0.0);
    CHECK(at("Agg.H0") == 7.0);
    CHECK(at("Agg.H3") == 9.0);
    CHECK(at("Agg.H12") == 0.0);
    CHECK(at("N_NaN") == 22.0);
    CHECK(at("Model.ISL+") == 0.0);
    CHECK(at("Model.SLX+") == 1.0);
    CHECK(at("Model.ISD+") == 0.0);
    CHECK(at("Temp.0") == 25.0);
    CHECK(at("Temp.23") == 0.0);  // missing, no median learned
    CHECK(at("Chl.0") == 0.5);    // missing, imputed with the training median
    CHECK(at("Day") == 5.0);
    CHECK(at("Month") == 3.0);
    CHECK(at("Year") == 2019.0);
    CHECK(at("Latitude") == -5.25);
    CHECK(at("Longitude") == 57.5);
    CHECK(at("Ocean.ATL") == 0.0);
    CHECK(at("Ocean.IND") == 1.0);
    CHECK(at("Ocean.PAC") == 0.0);
    CHECK(at("SunriseHour") == 6.25);
    CHECK(at("SunsetHour") == 18.5);

    // Echo-level vectors are a strict prefix of the richer levels.
    const std::vector<double> echo = assemble(ex, FeatureLevel::Echo, 24, medians);
    REQUIRE(echo.size() == 39);
    CHECK(std::equal(echo.begin(), echo.end(), x.begin()));
}

TEST_CASE("training medians skip missing values and absent features") {
    std::vector<LabeledExample> examples(4);
    for (LabeledExample& ex : examples) {
        for (auto& var : ex.ocean.v) var.fill(kNaN);
    }
    examples[0].ocean.v[0][0] = 1.0;
    examples[1].ocean.v[0][0] = 5.0;
    examples[2].ocean.v[0][0] = 3.0;
    examples[3].ocean.v[0][0] = 100.0;  // excluded from training below
    examples[0].ocean.v[1][1] = 2.0;    // Chl at hour 23, single value
    examples[1].ocean.v[1][1] = kNaN;

    const TrainMedians odd = compute_medians(examples, {0, 1, 2}, 24);
    CHECK(odd.at("Temp.0") == 3.0);
    CHECK(odd.at("Chl.23") == 2.0);
    CHECK(odd.count("O2.0") == 0);     // all missing: no median recorded
    CHECK(odd.count("Temp.47") == 0);  // hour outside a 24 h window

    const TrainMedians even = compute_medians(examples, {0, 1}, 24);
    CHECK(even.at("Temp.0") == 3.0);  // mean of 1 and 5

    const TrainMedians wide = compute_medians(examples, {0, 1, 2, 3}, 72);
    CHECK(wide.at("Temp.0") == 4.0);  // mean of 3 and 5
    CHECK(wide.count("Temp.71") == 0);
}

TEST_CASE("labels cut at ten and thirty tonnes and the capped target at one hundred") {
    CHECK(label_value(0.0, Task::Binary) == 0.0);
    CHECK(label_value(9.999, Task::Binary) == 0.0);
    CHECK(label_value(10.0, Task::Binary) == 1.0);
    CHECK(label_value(250.0, Task::Binary) == 1.0);

    CHECK(label_value(0.0, Task::Ternary) == 0.0);
    CHECK(label_value(9.999, Task::Ternary) == 0.0);
    CHECK(label_value(10.0, Task::Ternary) == 1.0);
    CHECK(label_value(29.999, Task::Ternary) == 1.0);
    CHECK(label_value(30.0, Task::Ternary) == 2.0);
    CHECK(label_value(250.0, Task::Ternary) == 2.0);

    CHECK(label_value(42.5, Task::Regression) == 42.5);
    CHECK(label_value(250.0, Task::Regression) == 250.0);
    CHECK(label_value(42.5, Task::RegressionThreshold) == 42.5);
    CHECK(label_value(100.0, Task::RegressionThreshold) == 100.0);
    CHECK(label_value(250.0, Task::RegressionThreshold) == 100.0);

    CHECK(std::string(task_name(Task::RegressionThreshold)) == "regression100");
    CHECK(parse_task("ternary") == Task::Ternary);
    CHECK_FALSE(parse_task("multiclass").has_value());
    CHECK(is_classification(Task::Binary));
    CHECK_FALSE(is_classification(Task::Regression));
    CHECK(n_classes(Task::Ternary) == 3);
    CHECK(n_classes(Task::Regression) == 1);
}
