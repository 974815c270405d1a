#include <doctest.h>

#include <cmath>
#include <memory>
#include <string>
#include <vector>

#include "fadbio/eval.hpp"
#include "fadbio/learn/baseline.hpp"
#include "fadbio/learn/ensemble.hpp"
#include "fadbio/rng.hpp"

using namespace fadbio;

namespace {

// A small table whose tonnage depends on two of three columns.
DataTable learning_table(std::uint64_t seed, std::size_t n) {
    Rng rng(seed);
    DataTable t;
    t.feature_names = {"F0", "F1", "F2"};
    t.n = n;
    t.p = 3;
    t.w_hours = 24;
    for (std::size_t i = 0; i < n; ++i) {
        const double x0 = rng.uniform(0.0, 1.0);
        const double x1 = rng.uniform(0.0, 1.0);
        const double x2 = static_cast<double>(rng.below(2));
        t.x.insert(t.x.end(), {x0, x1, x2});
        t.y.push_back(40.0 * x0 + 10.0 * x2 + rng.uniform(0.0, 2.0));
        t.kind.push_back(EventKind::Set);
        t.event_id.push_back("E" + std::to_string(i));
        t.split.push_back(Split::Train);
        t.window_sum.push_back(0.0);
    }
    return t;
}

DataView full_view(const DataTable& t) {
    return make_view(t, t.all_rows(), t.feature_names);
}

// Table with only the columns the threshold baseline consumes.
DataTable baseline_table(const std::vector<double>& agg_t, const std::vector<double>& win_sum,
                         const std::vector<double>& y) {
    DataTable t;
    t.feature_names = {"Agg.T"};
    t.n = y.size();
    t.p = 1;
    t.w_hours = 24;
    t.x = agg_t;
    t.y = y;
    t.window_sum = win_sum;
    for (std::size_t i = 0; i < t.n; ++i) {
        t.kind.push_back(EventKind::Set);
        t.event_id.push_back("E" + std::to_string(i));
        t.split.push_back(Split::Train);
    }
    return t;
}

}  // namespace

TEST_CASE("the baseline picks the statistic that scores best, ties prefer max") {
    const std::vector<double> agg_t = {5.0, 12.0, 35.0, 8.0};
    const std::vector<double> win_sum = {50.0, 120.0, 350.0, 80.0};

    // Tonnage equals the window max: the max rule is exact, the others are off.
    const auto exact_max = baseline_table(agg_t, win_sum, agg_t);
    CHECK(fit_baseline(Task::Regression, full_view(exact_max))->rule == BaselineRule::Max);

    // Tonnage equals the window sum.
    const auto exact_sum = baseline_table(agg_t, win_sum, win_sum);
    CHECK(fit_baseline(Task::Regression, full_view(exact_sum))->rule == BaselineRule::Sum);

    // Tonnage equals the cell mean (window sum over 10 x 24 cells).
    std::vector<double> mean_y;
    for (double s : win_sum) mean_y.push_back(s / 240.0);
    const auto exact_mean = baseline_table(agg_t, win_sum, mean_y);
    CHECK(fit_baseline(Task::Regression, full_view(exact_mean))->rule == BaselineRule::Mean);

    // With window_sum = 240 * Agg.T the mean rule equals the max rule exactly;
    // the tie goes to max.
    std::vector<double> tied_sum;
    for (double v : agg_t) tied_sum.push_back(240.0 * v);
    const auto tied = baseline_table(agg_t, tied_sum, agg_t);
    const auto model = fit_baseline(Task::Regression, full_view(tied));
    CHECK(model->rule == BaselineRule::Max);
    CHECK(model->predict_value(tied, tied.all_rows()) == agg_t);
}

TEST_CASE("baseline classes come from the tonnage thresholds") {
    const std::vector<double> agg_t = {5.0, 12.0, 35.0, 8.0};
    const std::vector<double> win_sum = {0.0, 0.0, 0.0, 0.0};
    const auto table = baseline_table(agg_t, win_sum, agg_t);

    BaselineModel m;
    m.kind = ModelKind::Baseline;
    m.rule = BaselineRule::Max;
    m.w_hours = 24;
    m.features = {"Agg.T"};

    m.task = Task::Binary;
    CHECK(m.predict_class(table, table.all_rows()) == std::vector<int>{0, 1, 1, 0});

    m.task = Task::Ternary;
    CHECK(m.predict_class(table, table.all_rows()) == std::vector<int>{0, 1, 2, 0});
    const std::vector<double> probs = m.predict_scores(table, table.all_rows());
    REQUIRE(probs.size() == 12);
    CHECK(probs[0 * 3 + 0] == 1.0);  // one-hot rows
    CHECK(probs[2 * 3 + 2] == 1.0);
    CHECK(probs[1 * 3 + 1] == 1.0);

    m.task = Task::RegressionThreshold;
    const auto capped = baseline_table({150.0, 40.0}, {0.0, 0.0}, {150.0, 40.0});
    CHECK(m.predict_scores(capped, capped.all_rows()) == std::vector<double>{100.0, 40.0});
}

TEST_CASE("forests refit identically regardless of thread count") {
    const DataTable t = learning_table(101, 60);
    const DataView train = full_view(t);
    ParamSet params;
    params["n_estimators"] = ParamValue::of(std::int64_t{15});
    params["max_samples"] = ParamValue::of(0.8);

    const auto a = fit_model(ModelKind::RandomForest, Task::Regression, params, train, 7, 1);
    const auto b = fit_model(ModelKind::RandomForest, Task::Regression, params, train, 7, 4);
    CHECK(save_model(*a) == save_model(*b));

    // A different seed or the unbootstrapped variant gives a different forest.
    const auto c = fit_model(ModelKind::RandomForest, Task::Regression, params, train, 8, 1);
    CHECK(save_model(*a) != save_model(*c));
    const auto plain =
        fit_model(ModelKind::RandomForest, Task::Regression, {}, train, 7, 1);
    CHECK(save_model(*a) != save_model(*plain));
}

TEST_CASE("ternary forests emit probability rows") {
    const DataTable t = learning_table(55, 80);
    const DataView train = full_view(t);
    ParamSet params;
    params["n_estimators"] = ParamValue::of(std::int64_t{10});
    params["max_depth"] = ParamValue::of(std::int64_t{4});
    const auto m = fit_model(ModelKind::RandomForest, Task::Ternary, params, train, 3);
    CHECK(m->score_width() == 3);

    const std::vector<double> p = m->predict_scores(t, t.all_rows());
    REQUIRE(p.size() == t.n * 3);
    const std::vector<int> cls = m->predict_class(t, t.all_rows());
    for (std::size_t i = 0; i < t.n; ++i) {
        const double* row = p.data() + i * 3;
        CHECK(row[0] + row[1] + row[2] == doctest::Approx(1.0).epsilon(1e-12));
        int arg = 0;
        for (int c = 1; c < 3; ++c)
            if (row[c] > row[arg]) arg = c;
        CHECK(cls[i] == arg);
    }
}

TEST_CASE("boosting training loss never increases stage over stage") {
    const DataTable t = learning_table(77, 60);
    const DataView train = full_view(t);
    ParamSet params;
    params["n_estimators"] = ParamValue::of(std::int64_t{15});
    params["max_depth"] = ParamValue::of(std::int64_t{2});
    params["learning_rate"] = ParamValue::of(0.3);

    for (ModelKind kind : {ModelKind::GradientBoosting, ModelKind::SecondOrderBoosting}) {
        for (Task task : {Task::Binary, Task::Ternary, Task::Regression,
                          Task::RegressionThreshold}) {
            const auto m = fit_model(kind, task, params, train, 11);
            const auto* boost = dynamic_cast<const BoostModel*>(m.get());
            REQUIRE(boost != nullptr);
            REQUIRE(boost->train_loss.size() == 15);
            CHECK(boost->k_outputs == (task == Task::Ternary ? 3 : 1));
            CHECK(boost->trees.size() == 15u * static_cast<std::size_t>(boost->k_outputs));
            for (std::size_t s = 1; s < boost->train_loss.size(); ++s) {
                CHECK(boost->train_loss[s] <= boost->train_loss[s - 1] + 1e-12);
            }
        }
    }
}

TEST_CASE("a single-stump booster predicts the target mean exactly") {
    Rng rng(31);
    DataTable t = learning_table(31, 32);
    // Dyadic tonnages over 32 rows keep every mean and residual sum exact.
    double total = 0.0;
    for (std::size_t i = 0; i < t.n; ++i) {
        t.y[i] = static_cast<double>(rng.below(256)) / 4.0;
        total += t.y[i];
    }
    const double mean = total / 32.0;

    ParamSet params;
    params["n_estimators"] = ParamValue::of(std::int64_t{1});
    params["max_depth"] = ParamValue::of(std::int64_t{0});
    const auto m =
        fit_model(ModelKind::GradientBoosting, Task::Regression, params, full_view(t), 5);
    for (double v : m->predict_value(t, t.all_rows())) CHECK(v == mean);
}

TEST_CASE("second-order leaves shrink to zero under heavy regularization") {
    const DataTable t = learning_table(13, 60);
    double mean = 0.0;
    for (double v : t.y) mean += v;
    mean /= static_cast<double>(t.n);

    ParamSet params;
    params["n_estimators"] = ParamValue::of(std::int64_t{3});
    params["max_depth"] = ParamValue::of(std::int64_t{2});
    params["lambda"] = ParamValue::of(1e15);
    const auto m = fit_model(ModelKind::SecondOrderBoosting, Task::Regression, params,
                             full_view(t), 5);
    for (double v : m->predict_value(t, t.all_rows())) {
        CHECK(v == doctest::Approx(mean).epsilon(1e-9));
    }
}

TEST_CASE("row and feature subsampling are seeded and change the fit") {
    const DataTable t = learning_table(99, 60);
    const DataView train = full_view(t);
    ParamSet base;
    base["n_estimators"] = ParamValue::of(std::int64_t{5});
    base["max_depth"] = ParamValue::of(std::int64_t{3});

    ParamSet sub = base;
    sub["subsample"] = ParamValue::of(0.7);
    ParamSet col = base;
    col["colsample_bytree"] = ParamValue::of(0.34);  // 1 of 3 features per tree

    const auto plain =
        fit_model(ModelKind::SecondOrderBoosting, Task::Regression, base, train, 21);
    const auto s1 = fit_model(ModelKind::SecondOrderBoosting, Task::Regression, sub, train, 21);
    const auto s2 = fit_model(ModelKind::SecondOrderBoosting, Task::Regression, sub, train, 21);
    const auto c1 = fit_model(ModelKind::SecondOrderBoosting, Task::Regression, col, train, 21);

    CHECK(save_model(*s1) == save_model(*s2));
    CHECK(save_model(*s1) != save_model(*plain));
    CHECK(save_model(*c1) != save_model(*plain));
}

TEST_CASE("every model kind survives a save/load round trip") {
    const DataTable t = learning_table(2024, 50);
    const DataView train = full_view(t);

    std::vector<std::unique_ptr<Model>> models;
    ParamSet small;
    small["n_estimators"] = ParamValue::of(std::int64_t{5});
    models.push_back(fit_model(ModelKind::Linear, Task::Regression, {}, train, 1));
    models.push_back(fit_model(ModelKind::RandomForest, Task::Binary, small, train, 1));
    models.push_back(fit_model(ModelKind::GradientBoosting, Task::Ternary, small, train, 1));
    models.push_back(fit_model(ModelKind::SecondOrderBoosting, Task::Regression, small, train, 1));
    {
        const auto bt = baseline_table({5.0, 12.0, 35.0}, {1.0, 2.0, 3.0}, {5.0, 12.0, 35.0});
        auto b = fit_baseline(Task::Binary, full_view(bt));
        b->medians["Temp.0"] = 18.25;  // medians ride along
        models.push_back(std::move(b));
    }

    for (const auto& m : models) {
        const std::string text = save_model(*m);
        const std::unique_ptr<Model> back = load_model(text);
        CHECK(save_model(*back) == text);
        CHECK(back->kind == m->kind);
        CHECK(back->task == m->task);
        CHECK(back->w_hours == m->w_hours);
        CHECK(back->features == m->features);
        CHECK(back->medians == m->medians);
        if (m->kind == ModelKind::Baseline) continue;  // needs Agg.T, not F*
        CHECK(back->predict_scores(t, t.all_rows()) == m->predict_scores(t, t.all_rows()));
    }
}

TEST_CASE("malformed model files are rejected") {
    CHECK_THROWS_AS(load_model("not a model"), std::runtime_error);
    CHECK_THROWS_AS(load_model("fadbio model 1\nkind = hal9000\n"), std::runtime_error);
    CHECK_THROWS_AS(load_model("fadbio model 1\nkind = baseline\ntask = binary\n"),
                    std::runtime_error);  // truncated
    const DataTable t = learning_table(3, 40);
    const auto m = fit_model(ModelKind::GradientBoosting, Task::Binary,
                             {{"n_estimators", ParamValue::of(std::int64_t{2})}},
                             full_view(t), 1);
    std::string text = save_model(*m);
    text.resize(text.size() / 2);
    CHECK_THROWS_AS(load_model(text), std::runtime_error);
}

TEST_CASE("models name every column they cannot find") {
    BaselineModel m;
    m.features = {"Agg.T", "Ghost.1", "Ghost.2"};
    const DataTable t = learning_table(1, 5);
    CHECK_THROWS_WITH_AS(m.resolve_columns(t),
                         "dataset is missing model columns: Agg.T, Ghost.1, Ghost.2",
                         std::runtime_error);
}

TEST_CASE("hyperparameter values parse and print round trip") {
    CHECK(ParamValue::parse("none").kind == ParamValue::Kind::None);
    CHECK(ParamValue::parse("None").kind == ParamValue::Kind::None);
    CHECK(ParamValue::parse("42") == ParamValue::of(std::int64_t{42}));
    CHECK(ParamValue::parse("-7") == ParamValue::of(std::int64_t{-7}));
    CHECK(ParamValue::parse("0.5") == ParamValue::of(0.5));
    CHECK(ParamValue::parse("1e3") == ParamValue::of(1000.0));
    CHECK(ParamValue::parse("sqrt") == ParamValue::of(std::string("sqrt")));
    CHECK(ParamValue::parse("0.5").to_string() == "0.5");
    CHECK(ParamValue::none().to_string() == "none");

    CHECK(param_set_to_string({}) == "(defaults)");
    ParamSet p;
    p["b"] = ParamValue::of(std::string("sqrt"));
    p["a"] = ParamValue::of(std::int64_t{1});
    CHECK(param_set_to_string(p) == "a=1 b=sqrt");
}

TEST_CASE("grids enumerate candidates with the last axis fastest") {
    HyperGrid g;
    g.axes = {{"a", {ParamValue::of(std::int64_t{1}), ParamValue::of(std::int64_t{2})}},
              {"b",
               {ParamValue::of(std::string("x")), ParamValue::of(std::string("y")),
                ParamValue::of(std::string("z"))}}};
    REQUIRE(g.size() == 6);
    CHECK(g.candidate(0).at("a") == ParamValue::of(std::int64_t{1}));
    CHECK(g.candidate(0).at("b") == ParamValue::of(std::string("x")));
    CHECK(g.candidate(1).at("a") == ParamValue::of(std::int64_t{1}));
    CHECK(g.candidate(1).at("b") == ParamValue::of(std::string("y")));
    CHECK(g.candidate(3).at("a") == ParamValue::of(std::int64_t{2}));
    CHECK(g.candidate(3).at("b") == ParamValue::of(std::string("x")));
    CHECK(g.candidate(5).at("a") == ParamValue::of(std::int64_t{2}));
    CHECK(g.candidate(5).at("b") == ParamValue::of(std::string("z")));
    CHECK_THROWS_AS(g.candidate(6), std::out_of_range);

    const HyperGrid empty;
    CHECK(empty.size() == 1);
    CHECK(empty.candidate(0).empty());

    CHECK(default_grid(ModelKind::Baseline, Task::Binary).size() == 1);
    CHECK(default_grid(ModelKind::Linear, Task::Regression).size() == 1);
    CHECK(default_grid(ModelKind::RandomForest, Task::Binary).size() == 486);
    CHECK(default_grid(ModelKind::GradientBoosting, Task::Regression).size() == 243);
    CHECK(default_grid(ModelKind::SecondOrderBoosting, Task::Binary).size() == 2);
    CHECK(default_grid(ModelKind::SecondOrderBoosting, Task::Regression).size() == 108);
}

TEST_CASE("model kind names round trip and bad parameters throw early") {
    for (ModelKind k : {ModelKind::Baseline, ModelKind::Linear, ModelKind::RandomForest,
                        ModelKind::GradientBoosting, ModelKind::SecondOrderBoosting}) {
        CHECK(parse_model_kind(model_kind_name(k)) == k);
    }
    CHECK_FALSE(parse_model_kind("forest").has_value());

    ParamSet bogus;
    bogus["bogus"] = ParamValue::of(std::int64_t{1});
    CHECK_THROWS_AS(forest_params(bogus), std::invalid_argument);

    ParamSet zero;
    zero["n_estimators"] = ParamValue::of(std::int64_t{0});
    CHECK_THROWS_AS(forest_params(zero), std::invalid_argument);

    ParamSet wide;
    wide["max_samples"] = ParamValue::of(1.5);
    CHECK_THROWS_AS(forest_params(wide), std::invalid_argument);

    ParamSet neg;
    neg["lambda"] = ParamValue::of(-1.0);
    CHECK_THROWS_AS(boost_params(ModelKind::SecondOrderBoosting, neg), std::invalid_argument);

    // Feature name budgets belong to the first-order booster only.
    ParamSet mf;
    mf["max_features"] = ParamValue::of(std::string("sqrt"));
    CHECK_NOTHROW(boost_params(ModelKind::GradientBoosting, mf));
    CHECK_THROWS_AS(boost_params(ModelKind::SecondOrderBoosting, mf), std::invalid_argument);

    ParamSet real_trees;
    real_trees["n_estimators"] = ParamValue::of(0.5);
    CHECK_THROWS_AS(forest_params(real_trees), std::invalid_argument);

    const DataTable t = learning_table(1, 20);
    const auto reg = fit_model(ModelKind::GradientBoosting, Task::Regression,
                               {{"n_estimators", ParamValue::of(std::int64_t{1})}},
                               full_view(t), 1);
    CHECK_THROWS_AS(reg->predict_class(t, t.all_rows()), std::logic_error);
    const auto cls = fit_model(ModelKind::GradientBoosting, Task::Binary,
                               {{"n_estimators", ParamValue::of(std::int64_t{1})}},
                               full_view(t), 1);
    CHECK_THROWS_AS(cls->predict_value(t, t.all_rows()), std::logic_error);
}
