#pragma once

#include "fadbio/learn/model.hpp"
#include "fadbio/learn/tree.hpp"

// Tree ensembles. The forest averages fully grown (or depth-capped) trees
// fitted on the original rows or on bootstrap resamples; both boosting
// variants fit shallow trees to the loss gradients stage by stage. Every
// source of randomness is a stream derived from the fit seed and the tree's
// position, so refits are bit-identical and thread count never matters.

namespace fadbio {

class ForestModel : public Model {
public:
    std::vector<Tree> trees;

    std::vector<double> predict_scores(const DataTable& table,
                                       std::span<const std::size_t> rows) const override;
    void save_body(std::string& out) const override;
};

struct ForestParams {
    int n_estimators = 100;
    // nullopt -> every tree sees all rows once; a fraction f in (0, 1] ->
    // bootstrap of ceil(f * n) draws with replacement, carried as weights.
    std::optional<double> max_samples;
    TreeGrowth growth;
    std::string max_features = "none";
};
ForestParams forest_params(const ParamSet& p);

std::unique_ptr<ForestModel> fit_forest(Task task, const DataView& train, const ForestParams& fp,
                                        std::uint64_t seed, int n_jobs = 1);

class BoostModel : public Model {
public:
    // k_outputs trees per stage (1 except for the ternary task, which fits
    // one tree per class); the learning rate is folded into the leaf values.
    std::vector<Tree> trees;
    std::vector<double> init_score;  // length k_outputs
    int k_outputs = 1;
    std::vector<double> train_loss;  // mean training loss after each stage

    // Raw additive scores (margins / log-odds / predicted values).
    std::vector<double> decision(const DataTable& table, std::span<const std::size_t> rows) const;

    std::vector<double> predict_scores(const DataTable& table,
                                       std::span<const std::size_t> rows) const override;
    void save_body(std::string& out) const override;
};

struct BoostParams {
    int n_estimators = 100;
    double learning_rate = 0.1;
    TreeGrowth growth;
    std::string max_features = "none";
    double subsample = 1.0;         // row fraction per stage, without replacement
    double colsample_bytree = 1.0;  // feature fraction per tree (second-order only)
    double lambda = 1.0;            // leaf l2 regularization (second-order only)
};
BoostParams boost_params(ModelKind kind, const ParamSet& p);

// First-order gradient boosting: trees split on squared error against the
// negative gradient, leaves are then refitted by a per-loss Newton step.
std::unique_ptr<BoostModel> fit_gradient_boosting(Task task, const DataView& train,
                                                  const BoostParams& bp, std::uint64_t seed);

// Second-order boosting: splits maximize the regularized gain
// sum(g)^2/(sum(h)+lambda) and leaves are -sum(g)/(sum(h)+lambda), with
// optional row subsampling per stage and feature subsampling per tree.
std::unique_ptr<BoostModel> fit_second_order_boosting(Task task, const DataView& train,
                                                      const BoostParams& bp, std::uint64_t seed);

}  // namespace fadbio
