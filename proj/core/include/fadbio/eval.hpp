#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "fadbio/learn/model.hpp"

// Metrics, deterministic data splitting, exhaustive hyperparameter search and
// permutation importance. Everything is seeded explicitly; reruns with the
// same seed give identical folds, identical candidate ordering and identical
// scores regardless of thread count.

namespace fadbio {

struct ConfusionMatrix {
    int k = 0;
    std::vector<std::int64_t> counts;  // counts[obs * k + pred]

    static ConfusionMatrix from(std::span<const int> obs, std::span<const int> pred, int k);
    std::int64_t at(int obs, int pred) const { return counts[obs * k + pred]; }
    std::int64_t support(int cls) const;
};

// F1 of the positive class (label 1) for two-class problems.
double f1_binary(const ConfusionMatrix& cm);
// Support-weighted mean of per-class F1; classes absent from the observed
// labels are excluded from the average.
double f1_weighted(const ConfusionMatrix& cm);
// Area under the ROC curve by the rank statistic; tied scores get mid-ranks,
// which matches the pairwise win/tie count exactly.
double roc_auc(std::span<const double> scores, std::span<const int> labels);
// Unweighted mean of one-vs-rest AUCs over the k classes; probs is row-major
// n x k. Classes with zero positives or zero negatives are skipped.
double macro_ovr_auc(std::span<const double> probs, std::span<const int> labels, int k);
double mean_absolute_error(std::span<const double> pred, std::span<const double> obs);

enum class Metric { RocAuc, F1, WeightedF1, Mae };
const char* metric_name(Metric m);
bool metric_maximizes(Metric m);
Metric selection_metric(Task t);  // model selection: AUC / AUC / MAE / MAE
Metric report_metric(Task t);     // headline report: F1 / weighted F1 / MAE / MAE

// Evaluates one model on the given rows with the given metric (labels and
// capping follow the model's task).
double score_model(const Model& m, const DataTable& table, std::span<const std::size_t> rows,
                   Metric metric);

// Splits indices 0..n-1 into train/test with the test fraction apportioned
// per stratum by largest remainder, so the overall test count is exactly
// round(n * test_fraction). Strata are arbitrary integer codes.
struct SplitIndices {
    std::vector<std::size_t> train, test;
};
SplitIndices stratified_split(std::span<const int> strata, double test_fraction,
                              std::uint64_t seed);

// K folds of indices 0..n-1; stratified keeps per-stratum proportions, the
// plain version deals shuffled indices round-robin into folds.
std::vector<std::vector<std::size_t>> kfold(std::size_t n, int k, std::uint64_t seed);
std::vector<std::vector<std::size_t>> stratified_kfold(std::span<const int> strata, int k,
                                                       std::uint64_t seed);

struct SearchCandidate {
    ParamSet params;
    std::vector<double> fold_scores;
    double mean_score = 0.0;
    double std_score = 0.0;
    bool failed = false;
    std::string error;  // first failure message when failed
};

struct SearchResult {
    std::vector<SearchCandidate> candidates;  // in grid order
    std::size_t best_index = 0;
    std::unique_ptr<Model> best_model;  // refit on all training rows
};

// Exhaustive search over the grid with k-fold cross-validation on the view's
// rows (stratified by label for classification). Candidates whose fits throw
// are recorded as failed and skipped in the ranking; score ties keep the
// earliest candidate in grid order. Throws only if every candidate fails.
SearchResult grid_search(ModelKind kind, Task task, const HyperGrid& grid, const DataView& train,
                         int folds, std::uint64_t seed, int n_jobs = 1);

struct ImportanceEntry {
    std::string feature;
    double mean_drop = 0.0;  // metric degradation when the column is permuted
    double std_drop = 0.0;
};

// Permutation importance of every model feature on the given rows: each
// column is shuffled n_repeats times (independent stream per feature and
// repeat) and the metric degradation is averaged. Entries are sorted by mean
// drop, descending; constant columns come out exactly zero.
std::vector<ImportanceEntry> permutation_importance(const Model& m, const DataTable& table,
                                                    std::span<const std::size_t> rows,
                                                    Metric metric, int n_repeats,
                                                    std::uint64_t seed);

// Deterministic parallel map over [0, count): fn(i) runs on one of n_jobs
// threads; exceptions are captured and rethrown on the caller.
void parallel_for(std::size_t count, int n_jobs, const std::function<void(std::size_t)>& fn);

}  // namespace fadbio
