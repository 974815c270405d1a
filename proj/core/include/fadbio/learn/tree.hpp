#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "fadbio/rng.hpp"

// Exact-split decision trees over dense numeric features, used by the forest
// and the boosting ensembles. Candidate thresholds are midpoints between
// consecutive distinct sorted values; the best split is chosen by strict
// improvement, so ties resolve to the lower feature index and then to the
// lower threshold. Rows are carried in presorted per-feature arenas that are
// partitioned in place as the tree grows.

namespace fadbio {

// Column-major copy of the training submatrix; local row ids are 0..n-1.
struct ColMatrix {
    std::size_t n = 0, p = 0;
    std::vector<double> v;  // column-major: v[col * n + row]

    double at(std::size_t row, std::size_t col) const { return v[col * n + row]; }
};

struct TreeNode {
    std::int32_t feature = -1;  // -1 marks a leaf
    double threshold = 0.0;     // goes left when x[feature] <= threshold
    std::int32_t left = -1;
    std::int32_t right = -1;
    std::int32_t value_at = -1;  // offset into Tree::values for leaves
};

struct Tree {
    std::vector<TreeNode> nodes;  // nodes[0] is the root
    std::vector<double> values;   // leaf payloads, value_width per leaf
    int value_width = 1;

    std::span<const double> predict_row(std::span<const double> x) const;
    std::size_t leaf_index(std::span<const double> x) const;  // node index of the leaf
    std::size_t n_leaves() const;
};

enum class SplitCriterion {
    Gini,        // classification impurity on integer labels
    Variance,    // weighted squared-error reduction on a real target
    SecondOrder  // gain from per-row gradients/hessians with l2 regularization
};

struct TreeGrowth {
    // nullopt means unbounded depth, which is capped internally at 32.
    std::optional<int> max_depth;
    double min_samples_split = 2;  // weighted row count needed to try a split
    double min_samples_leaf = 1;   // weighted row count required on each side
    // Number of features examined per node; 0 means all.
    std::size_t max_features = 0;
};

std::size_t resolve_max_features(std::string_view spec, std::size_t p);  // "none"/"sqrt"/"log2"

struct TreeProblem {
    SplitCriterion criterion = SplitCriterion::Variance;
    // Gini: labels (0..n_classes-1) and weights; leaves store the weighted
    // class distribution.
    std::span<const int> labels;
    int n_classes = 0;
    // Variance: real target and weights; leaves store the weighted mean.
    std::span<const double> target;
    // SecondOrder: per-row gradient g and hessian h; leaves store
    // -sum(g)/(sum(h)+lambda).
    std::span<const double> grad;
    std::span<const double> hess;
    double lambda = 0.0;
    // Row weights (bootstrap multiplicities / subsample masks); rows with
    // weight 0 are excluded from growth entirely. Empty means all ones.
    std::span<const double> weight;
    // Features the tree may split on, ascending; empty means all columns.
    std::span<const std::uint32_t> allowed_features;
};

// Per-feature row orderings shared by every tree grown on the same matrix.
struct Presorted {
    std::vector<std::uint32_t> order;  // p blocks of n row ids
    std::size_t n = 0, p = 0;

    std::span<const std::uint32_t> column(std::size_t col) const {
        return {order.data() + col * n, n};
    }
};
Presorted presort(const ColMatrix& x);

Tree fit_tree(const ColMatrix& x, const Presorted& sorted, const TreeProblem& problem,
              const TreeGrowth& growth, Rng& rng);

// Best single split of the given rows on one feature, for tests and tooling:
// returns (threshold, gain) or nullopt when no admissible split exists.
struct SplitEval {
    double threshold = 0.0;
    double gain = 0.0;
};
std::optional<SplitEval> best_split_on_feature(const ColMatrix& x, const TreeProblem& problem,
                                               std::span<const std::uint32_t> rows,
                                               std::size_t feature, double min_samples_leaf);

}  // namespace fadbio
