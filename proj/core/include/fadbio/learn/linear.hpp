#pragma once

#include "fadbio/learn/model.hpp"

// Elastic-net linear models on standardized features. Regression uses
// coordinate descent over a geometric penalty-strength path; classification
// uses a proximal-gradient (FISTA) solver for l1+l2 penalized logistic or
// multinomial likelihoods. Both select mixing ratio and strength by an
// internal cross-validation on the training rows, then refit on all of them.

namespace fadbio {

class LinearModel : public Model {
public:
    // Standardization learned on the training rows.
    std::vector<double> center, scale;
    // One weight row per output (1 for regression/binary, 3 for ternary),
    // expressed in standardized coordinates; intercepts alongside.
    std::vector<std::vector<double>> weights;
    std::vector<double> intercept;
    // Chosen penalty, kept for reporting.
    double alpha = 0.0;
    double l1_ratio = 0.0;

    // Linear predictor(s) per row, before any link.
    std::vector<double> decision(const DataTable& table, std::span<const std::size_t> rows) const;

    std::vector<double> predict_scores(const DataTable& table,
                                       std::span<const std::size_t> rows) const override;
    void save_body(std::string& out) const override;
};

struct LinearFitConfig {
    std::vector<double> l1_ratios;  // empty -> task-family default grid
    int n_strengths = 20;           // points on the geometric strength path
    int cv_folds = 5;
    double tolerance = 1e-7;
    int max_iterations = 5000;
};

std::unique_ptr<LinearModel> fit_linear(Task task, const DataView& train, std::uint64_t seed,
                                        const LinearFitConfig& config = {});

// Solver entry points exposed for verification against closed forms.
//
// Minimizes 1/(2n) * ||y - X w||^2 + alpha * (r * ||w||_1 + (1-r)/2 * ||w||^2)
// over w for centered/standardized inputs; returns the coefficients.
std::vector<double> elastic_net_cd(std::size_t n, std::size_t p,
                                   std::span<const double> x_colmajor, std::span<const double> y,
                                   double alpha, double l1_ratio, double tolerance,
                                   int max_iterations, std::vector<double> warm_start = {});

// Mean negative log-likelihood plus the l2 half of the penalty, and its
// gradient, for the multinomial model with per-class weights and intercepts.
// Layout of w: k blocks of (p coefficients + 1 intercept).
double multinomial_loss_grad(std::size_t n, std::size_t p, int k,
                             std::span<const double> x_rowmajor, std::span<const int> y,
                             std::span<const double> w, double l2, std::span<double> grad_out);

}  // namespace fadbio
