#pragma once

#include "fadbio/learn/model.hpp"

// Rule-of-thumb reference model: one scalar echo statistic per event (window
// sum, window mean over the 10 x W cells, or window max) used directly as the
// tonnage estimate, thresholded for the classification tasks. Training picks
// the statistic that scores best on the training rows; ties prefer max, then
// mean, then sum.

namespace fadbio {

enum class BaselineRule { Sum, Mean, Max };
const char* baseline_rule_name(BaselineRule r);
std::optional<BaselineRule> parse_baseline_rule(std::string_view s);

class BaselineModel : public Model {
public:
    BaselineRule rule = BaselineRule::Max;

    // The tonnage estimate per row (needs the window-sum column and Agg.T).
    std::vector<double> rule_scores(const DataTable& table,
                                    std::span<const std::size_t> rows) const;

    std::vector<double> predict_scores(const DataTable& table,
                                       std::span<const std::size_t> rows) const override;
    std::vector<int> predict_class(const DataTable& table,
                                   std::span<const std::size_t> rows) const override;
    void save_body(std::string& out) const override;
};

std::unique_ptr<BaselineModel> fit_baseline(Task task, const DataView& train);

}  // namespace fadbio
