#include "fadbio/learn/baseline.hpp"

#include <cmath>
#include <stdexcept>

#include "fadbio/eval.hpp"

namespace fadbio {

const char* baseline_rule_name(BaselineRule r) {
    switch (r) {
        case BaselineRule::Sum: return "sum";
        case BaselineRule::Mean: return "mean";
        case BaselineRule::Max: return "max";
    }
    return "?";
}

std::optional<BaselineRule> parse_baseline_rule(std::string_view s) {
    if (s == "sum") return BaselineRule::Sum;
    if (s == "mean") return BaselineRule::Mean;
    if (s == "max") return BaselineRule::Max;
    return std::nullopt;
}

std::vector<double> BaselineModel::rule_scores(const DataTable& table,
                                               std::span<const std::size_t> rows) const {
    std::vector<double> out(rows.size());
    if (rule == BaselineRule::Max) {
        const std::size_t col = table.column_index("Agg.T");
        if (col == kNoColumn) throw std::runtime_error("baseline needs the Agg.T column");
        for (std::size_t i = 0; i < rows.size(); ++i) out[i] = table.at(rows[i], col);
        return out;
    }
    const double cells = 10.0 * static_cast<double>(table.w_hours);
    if (cells <= 0) throw std::runtime_error("baseline needs a positive window length");
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const double s = table.window_sum[rows[i]];
        out[i] = rule == BaselineRule::Sum ? s : s / cells;
    }
    return out;
}

std::vector<double> BaselineModel::predict_scores(const DataTable& table,
                                                  std::span<const std::size_t> rows) const {
    std::vector<double> s = rule_scores(table, rows);
    if (task == Task::RegressionThreshold)
        for (double& v : s) v = std::min(v, kRegressionCapT);
    if (task != Task::Ternary) return s;  // tonnage estimate doubles as the rank score
    // Ternary scores are the one-hot of the thresholded class, so downstream
    // probability-shaped consumers stay well-defined.
    std::vector<double> out(rows.size() * 3, 0.0);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const int c = s[i] < kPresenceThresholdT ? 0 : (s[i] < kHighCatchThresholdT ? 1 : 2);
        out[i * 3 + static_cast<std::size_t>(c)] = 1.0;
    }
    return out;
}

std::vector<int> BaselineModel::predict_class(const DataTable& table,
                                              std::span<const std::size_t> rows) const {
    if (!is_classification(task))
        throw std::logic_error("predict_class on a regression model");
    const std::vector<double> s = rule_scores(table, rows);
    std::vector<int> out(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (task == Task::Binary)
            out[i] = s[i] >= kPresenceThresholdT ? 1 : 0;
        else
            out[i] = s[i] < kPresenceThresholdT ? 0 : (s[i] < kHighCatchThresholdT ? 1 : 2);
    }
    return out;
}

void BaselineModel::save_body(std::string& out) const {
    out += "rule = ";
    out += baseline_rule_name(rule);
    out += '\n';
}

std::unique_ptr<BaselineModel> fit_baseline(Task task, const DataView& train) {
    if (train.n() == 0) throw std::invalid_argument("baseline: empty training view");
    auto model = std::make_unique<BaselineModel>();
    model->kind = ModelKind::Baseline;
    model->task = task;
    model->features = train.column_names();
    model->w_hours = train.table->w_hours;

    // Pick the statistic that scores best on the training rows; with >= in
    // this order, ties prefer max, then mean, then sum.
    const Metric metric = report_metric(task);
    const bool maximize = metric_maximizes(metric);
    double best = maximize ? -1e300 : 1e300;
    BaselineRule best_rule = BaselineRule::Max;
    for (BaselineRule r : {BaselineRule::Sum, BaselineRule::Mean, BaselineRule::Max}) {
        model->rule = r;
        const double s = score_model(*model, *train.table, train.rows, metric);
        if (maximize ? s >= best : s <= best) {
            best = s;
            best_rule = r;
        }
    }
    model->rule = best_rule;
    return model;
}

}  // namespace fadbio
