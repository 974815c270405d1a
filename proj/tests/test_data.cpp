#include <doctest.h>

#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "fadbio/data.hpp"
#include "fadbio/rng.hpp"
#include "util.hpp"

using namespace fadbio;

namespace {

LabeledExample random_example(Rng& rng, const std::string& id, EventKind kind) {
    LabeledExample ex;
    ex.event_id = id;
    ex.kind = kind;
    ex.model = static_cast<BuoyModel>(rng.below(3));
    ex.date = {2019, 1 + static_cast<int>(rng.below(12)), 1 + static_cast<int>(rng.below(28))};
    ex.pos = GeoPoint::make(rng.uniform(-30.0, 30.0), rng.uniform(-170.0, 170.0));
    ex.basin = ocean_basin(ex.pos);
    ex.sunrise_hour = rng.uniform(5.0, 7.0);
    ex.sunset_hour = rng.uniform(17.0, 19.0);
    ex.window.w_hours = 24;
    ex.window.cols.assign(24, std::nullopt);
    for (int h = 0; h < 24; ++h) {
        if (rng.next_double() < 0.4) continue;
        WindowCell c;
        for (double& l : c.layers) l = rng.uniform(0.0, 8.0);
        ex.window.cols[static_cast<std::size_t>(h)] = c;
    }
    for (auto& var : ex.ocean.v) {
        for (double& v : var) {
            v = rng.next_double() < 0.3 ? std::numeric_limits<double>::quiet_NaN()
                                        : rng.uniform(-2.0, 30.0);
        }
    }
    ex.y = kind == EventKind::Set ? rng.uniform(0.0, 120.0) : 0.0;
    return ex;
}

}  // namespace

TEST_CASE("dataset tables survive a csv round trip bit for bit") {
    Rng rng(773311);
    std::vector<LabeledExample> examples;
    examples.push_back(random_example(rng, "E001", EventKind::Deployment));
    examples.push_back(random_example(rng, "E002", EventKind::Set));
    examples.push_back(random_example(rng, "E003", EventKind::Set));
    const std::vector<Split> split = {Split::Train, Split::Test, Split::Train};
    const TrainMedians medians = compute_medians(examples, {0, 2}, 24);
    const DataTable t = to_table(examples, split, medians, 24);

    REQUIRE(t.n == 3);
    REQUIRE(t.p == feature_names(FeatureLevel::All, 24).size());
    CHECK(t.w_hours == 24);
    // The window sum column adds every populated cell of the whole matrix.
    double expect_sum = 0.0;
    for (const auto& col : examples[1].window.cols) {
        if (col) expect_sum += col->layer_sum();
    }
    CHECK(t.window_sum[1] == expect_sum);
    CHECK(t.y[0] == 0.0);

    TempDir tmp;
    const std::string path = tmp.file("dataset.csv", dataset_to_csv(t));
    const DataTable back = dataset_from_csv(path);
    CHECK(back.n == t.n);
    CHECK(back.p == t.p);
    CHECK(back.w_hours == 24);
    CHECK(back.feature_names == t.feature_names);
    CHECK(back.event_id == t.event_id);
    CHECK(back.x == t.x);
    CHECK(back.y == t.y);
    CHECK(back.window_sum == t.window_sum);
    CHECK(back.kind == t.kind);
    CHECK(back.split == t.split);

    // Medians take the same round trip.
    const std::string mpath = tmp.file("medians.csv", medians_to_csv(medians));
    CHECK(medians_from_csv(mpath) == medians);
}

TEST_CASE("dataset parsing rejects malformed files") {
    TempDir tmp;
    const std::string bad_header =
        tmp.file("h.csv", "event,y,kind,split,Win.Sum,Agg.T\nE1,0,set,train,0,0\n");
    CHECK_THROWS_AS(dataset_from_csv(bad_header), std::runtime_error);

    const std::string bad_kind =
        tmp.file("k.csv",
                 "event_id,y,kind,split,Win.Sum,Agg.T\nE1,0,haul,train,0,0\n");
    CHECK_THROWS_AS(dataset_from_csv(bad_kind), std::runtime_error);

    const std::string bad_value =
        tmp.file("v.csv", "event_id,y,kind,split,Win.Sum,Agg.T\nE1,0,set,train,0,nan\n");
    CHECK_THROWS_AS(dataset_from_csv(bad_value), std::runtime_error);

    const std::string bad_median = tmp.file("m.csv", "feature,median\nTemp.0,oops\n");
    CHECK_THROWS_AS(medians_from_csv(bad_median), std::runtime_error);
}

TEST_CASE("views select rows and level columns without copying") {
    Rng rng(42);
    std::vector<LabeledExample> examples;
    for (int i = 0; i < 4; ++i) {
        examples.push_back(random_example(rng, "E" + std::to_string(i),
                                          i % 2 == 0 ? EventKind::Set
                                                     : EventKind::Deployment));
    }
    const std::vector<Split> split = {Split::Train, Split::Train, Split::Test,
                                      Split::Train};
    const DataTable t = to_table(examples, split, {}, 24);

    CHECK(t.rows_with_split(Split::Test) == std::vector<std::size_t>{2});
    CHECK(t.all_rows().size() == 4);
    CHECK(t.column_index("Agg.T") == 0);
    CHECK(t.column_index("missing") == kNoColumn);

    const DataView echo = make_view(t, {1, 3}, FeatureLevel::Echo);
    CHECK(echo.n() == 2);
    CHECK(echo.p() == 39);
    CHECK(echo.column_names() == feature_names(FeatureLevel::Echo, 24));
    // View cells resolve through the row/column indirection.
    CHECK(echo.at(0, 0) == t.at(1, 0));
    CHECK(echo.at(1, 5) == t.at(3, 5));
    CHECK(echo.label(0, Task::Regression) == t.y[1]);

    const DataView all = make_view(t, t.all_rows(), FeatureLevel::All);
    CHECK(all.p() == t.p);

    CHECK_THROWS_WITH_AS(make_view(t, {0}, std::vector<std::string>{"Agg.T", "Nope", "Gone"}),
                         "dataset is missing feature columns: Nope, Gone",
                         std::runtime_error);
}
