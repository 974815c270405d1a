#include "fadbio/learn/linear.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "fadbio/csv.hpp"
#include "fadbio/eval.hpp"
#include "fadbio/rng.hpp"

namespace fadbio {

namespace {

double soft_threshold(double v, double t) {
    if (v > t) return v - t;
    if (v < -t) return v + t;
    return 0.0;
}

// Column-major standardized design matrix with the transform that produced it.
struct StdDesign {
    std::size_t n = 0, p = 0;
    std::vector<double> z;  // column-major
    std::vector<double> center, scale;
};

StdDesign standardize(std::size_t n, std::size_t p, const std::vector<double>& raw_colmajor) {
    StdDesign d;
    d.n = n;
    d.p = p;
    d.z.resize(n * p);
    d.center.resize(p);
    d.scale.resize(p);
    for (std::size_t j = 0; j < p; ++j) {
        const double* col = raw_colmajor.data() + j * n;
        double mean = 0;
        for (std::size_t i = 0; i < n; ++i) mean += col[i];
        mean /= static_cast<double>(n);
        double var = 0;
        for (std::size_t i = 0; i < n; ++i) var += (col[i] - mean) * (col[i] - mean);
        double sd = std::sqrt(var / static_cast<double>(n));
        if (sd == 0.0) sd = 1.0;
        d.center[j] = mean;
        d.scale[j] = sd;
        double* out = d.z.data() + j * n;
        for (std::size_t i = 0; i < n; ++i) out[i] = (col[i] - mean) / sd;
    }
    return d;
}

// ---- gaussian elastic net by coordinate descent -----------------------------

struct CdResult {
    std::vector<double> w;
    bool converged = false;
    double last_delta = 0.0;
};

CdResult cd_fit(std::size_t n, std::size_t p, const double* x, const double* y, double alpha,
                double l1_ratio, double tol, int max_iter, std::vector<double> w0) {
    CdResult res;
    res.w = w0.empty() ? std::vector<double>(p, 0.0) : std::move(w0);
    std::vector<double>& w = res.w;

    std::vector<double> colnorm(p);
    for (std::size_t j = 0; j < p; ++j) {
        const double* col = x + j * n;
        double s = 0;
        for (std::size_t i = 0; i < n; ++i) s += col[i] * col[i];
        colnorm[j] = s / static_cast<double>(n);
    }
    std::vector<double> r(n);  // residual y - Xw
    for (std::size_t i = 0; i < n; ++i) r[i] = y[i];
    for (std::size_t j = 0; j < p; ++j) {
        if (w[j] == 0.0) continue;
        const double* col = x + j * n;
        for (std::size_t i = 0; i < n; ++i) r[i] -= col[i] * w[j];
    }

    const double l1 = alpha * l1_ratio;
    const double l2 = alpha * (1.0 - l1_ratio);
    for (int it = 0; it < max_iter; ++it) {
        double max_delta = 0;
        for (std::size_t j = 0; j < p; ++j) {
            if (colnorm[j] == 0.0) continue;
            const double* col = x + j * n;
            double dot = 0;
            for (std::size_t i = 0; i < n; ++i) dot += col[i] * r[i];
            const double rho = dot / static_cast<double>(n) + colnorm[j] * w[j];
            const double w_new = soft_threshold(rho, l1) / (colnorm[j] + l2);
            const double delta = w_new - w[j];
            if (delta != 0.0) {
                for (std::size_t i = 0; i < n; ++i) r[i] -= col[i] * delta;
                w[j] = w_new;
            }
            max_delta = std::max(max_delta, std::fabs(delta));
        }
        res.last_delta = max_delta;
        if (max_delta < tol) {
            res.converged = true;
            break;
        }
    }
    return res;
}

// ---- penalized likelihood by proximal gradient ------------------------------

// Parameter layout: `blocks` blocks of (p coefficients + 1 intercept).
struct SmoothProblem {
    std::size_t n = 0, p = 0;
    int blocks = 1;
    bool sigmoid = false;  // single-block binary likelihood
    const double* z = nullptr;  // column-major standardized design
    const int* y = nullptr;
    double l2 = 0.0;

    std::size_t dim() const { return static_cast<std::size_t>(blocks) * (p + 1); }

    // Mean negative log-likelihood plus the quadratic penalty half, with its
    // gradient written to `grad`.
    double eval(const double* w, double* grad) const {
        std::fill(grad, grad + dim(), 0.0);
        std::vector<double> margin(n * static_cast<std::size_t>(blocks), 0.0);
        for (int b = 0; b < blocks; ++b) {
            const double* wb = w + static_cast<std::size_t>(b) * (p + 1);
            double* mb = margin.data() + static_cast<std::size_t>(b) * n;
            for (std::size_t i = 0; i < n; ++i) mb[i] = wb[p];
            for (std::size_t j = 0; j < p; ++j) {
                const double wj = wb[j];
                if (wj == 0.0) continue;
                const double* col = z + j * n;
                for (std::size_t i = 0; i < n; ++i) mb[i] += col[i] * wj;
            }
        }

        double loss = 0;
        std::vector<double> resid(n * static_cast<std::size_t>(blocks));
        if (sigmoid) {
            for (std::size_t i = 0; i < n; ++i) {
                const double m = margin[i];
                // log(1 + e^m) - y*m, computed stably
                loss += (m > 0 ? m + std::log1p(std::exp(-m)) : std::log1p(std::exp(m))) -
                        (y[i] ? m : 0.0);
                const double prob = 1.0 / (1.0 + std::exp(-m));
                resid[i] = prob - (y[i] ? 1.0 : 0.0);
            }
        } else {
            for (std::size_t i = 0; i < n; ++i) {
                double mx = margin[i];
                for (int b = 1; b < blocks; ++b)
                    mx = std::max(mx, margin[static_cast<std::size_t>(b) * n + i]);
                double lse = 0;
                for (int b = 0; b < blocks; ++b)
                    lse += std::exp(margin[static_cast<std::size_t>(b) * n + i] - mx);
                lse = mx + std::log(lse);
                loss += lse - margin[static_cast<std::size_t>(y[i]) * n + i];
                for (int b = 0; b < blocks; ++b) {
                    const double prob =
                        std::exp(margin[static_cast<std::size_t>(b) * n + i] - lse);
                    resid[static_cast<std::size_t>(b) * n + i] = prob - (y[i] == b ? 1.0 : 0.0);
                }
            }
        }
        loss /= static_cast<double>(n);

        for (int b = 0; b < blocks; ++b) {
            const double* rb = resid.data() + static_cast<std::size_t>(b) * n;
            double* gb = grad + static_cast<std::size_t>(b) * (p + 1);
            for (std::size_t j = 0; j < p; ++j) {
                const double* col = z + j * n;
                double dot = 0;
                for (std::size_t i = 0; i < n; ++i) dot += col[i] * rb[i];
                gb[j] = dot / static_cast<double>(n);
            }
            double isum = 0;
            for (std::size_t i = 0; i < n; ++i) isum += rb[i];
            gb[p] = isum / static_cast<double>(n);
        }

        if (l2 > 0) {
            const double* wp = w;
            for (int b = 0; b < blocks; ++b) {
                const double* wb = wp + static_cast<std::size_t>(b) * (p + 1);
                double* gb = grad + static_cast<std::size_t>(b) * (p + 1);
                for (std::size_t j = 0; j < p; ++j) {
                    loss += 0.5 * l2 * wb[j] * wb[j];
                    gb[j] += l2 * wb[j];
                }
            }
        }
        return loss;
    }
};

double power_iteration_lmax(std::size_t n, std::size_t p, const double* z, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<double> v(p), u(n), zv(p);
    for (double& x : v) x = rng.next_double() - 0.5;
    double lam = 1.0;
    for (int it = 0; it < 40; ++it) {
        std::fill(u.begin(), u.end(), 0.0);
        for (std::size_t j = 0; j < p; ++j) {
            const double* col = z + j * n;
            const double vj = v[j];
            if (vj == 0.0) continue;
            for (std::size_t i = 0; i < n; ++i) u[i] += col[i] * vj;
        }
        for (std::size_t j = 0; j < p; ++j) {
            const double* col = z + j * n;
            double dot = 0;
            for (std::size_t i = 0; i < n; ++i) dot += col[i] * u[i];
            zv[j] = dot / static_cast<double>(n);
        }
        double norm = 0;
        for (double x : zv) norm += x * x;
        norm = std::sqrt(norm);
        if (norm == 0) return 1.0;
        lam = norm;
        for (std::size_t j = 0; j < p; ++j) v[j] = zv[j] / norm;
    }
    return lam;
}

struct FistaResult {
    std::vector<double> w;
    bool converged = false;
    double grad_norm = 0.0;
};

FistaResult fista_fit(const SmoothProblem& prob, double l1, double step, double tol, int max_iter,
                      std::vector<double> w0) {
    const std::size_t d = prob.dim(), p = prob.p;
    FistaResult res;
    res.w = w0.empty() ? std::vector<double>(d, 0.0) : std::move(w0);
    std::vector<double> v = res.w, w_prev = res.w, grad(d);
    double t = 1.0;
    for (int it = 0; it < max_iter; ++it) {
        prob.eval(v.data(), grad.data());
        double max_delta = 0;
        for (std::size_t idx = 0; idx < d; ++idx) {
            const bool is_intercept = idx % (p + 1) == p;
            double wn = v[idx] - step * grad[idx];
            if (!is_intercept && l1 > 0) wn = soft_threshold(wn, step * l1);
            max_delta = std::max(max_delta, std::fabs(wn - res.w[idx]));
            w_prev[idx] = res.w[idx];
            res.w[idx] = wn;
        }
        const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
        double restart = 0;
        for (std::size_t idx = 0; idx < d; ++idx)
            restart += (v[idx] - res.w[idx]) * (res.w[idx] - w_prev[idx]);
        if (restart > 0) {
            t = 1.0;
            v = res.w;
        } else {
            const double mom = (t - 1.0) / t_next;
            for (std::size_t idx = 0; idx < d; ++idx)
                v[idx] = res.w[idx] + mom * (res.w[idx] - w_prev[idx]);
            t = t_next;
        }
        if (max_delta < tol) {
            res.converged = true;
            break;
        }
    }
    prob.eval(res.w.data(), grad.data());
    double gn = 0;
    for (std::size_t idx = 0; idx < d; ++idx) {
        // Proximal gradient norm: zero exactly at a constrained optimum.
        const bool is_intercept = idx % (p + 1) == p;
        double g = grad[idx];
        if (!is_intercept && l1 > 0) {
            if (res.w[idx] > 0)
                g += l1;
            else if (res.w[idx] < 0)
                g -= l1;
            else
                g = std::max(0.0, std::fabs(g) - l1);
        }
        gn += g * g;
    }
    res.grad_norm = std::sqrt(gn);
    return res;
}

std::vector<double> strength_path(double alpha_max, int n_points, double span_ratio) {
    std::vector<double> path(static_cast<std::size_t>(n_points));
    const double lo = alpha_max * span_ratio;
    for (int i = 0; i < n_points; ++i) {
        const double f = n_points == 1 ? 0.0
                                       : static_cast<double>(i) / static_cast<double>(n_points - 1);
        path[static_cast<std::size_t>(i)] = alpha_max * std::pow(lo / alpha_max, f);
    }
    return path;
}

std::vector<double> raw_col_major(const DataView& v) {
    std::vector<double> m(v.n() * v.p());
    for (std::size_t j = 0; j < v.p(); ++j)
        for (std::size_t i = 0; i < v.n(); ++i) m[j * v.n() + i] = v.at(i, j);
    return m;
}

}  // namespace

std::vector<double> elastic_net_cd(std::size_t n, std::size_t p,
                                   std::span<const double> x_colmajor, std::span<const double> y,
                                   double alpha, double l1_ratio, double tolerance,
                                   int max_iterations, std::vector<double> warm_start) {
    if (x_colmajor.size() != n * p || y.size() != n)
        throw std::invalid_argument("elastic_net_cd: size mismatch");
    return cd_fit(n, p, x_colmajor.data(), y.data(), alpha, l1_ratio, tolerance, max_iterations,
                  std::move(warm_start))
        .w;
}

double multinomial_loss_grad(std::size_t n, std::size_t p, int k,
                             std::span<const double> x_rowmajor, std::span<const int> y,
                             std::span<const double> w, double l2, std::span<double> grad_out) {
    if (x_rowmajor.size() != n * p || y.size() != n)
        throw std::invalid_argument("multinomial_loss_grad: size mismatch");
    const std::size_t d = static_cast<std::size_t>(k) * (p + 1);
    if (w.size() != d || grad_out.size() != d)
        throw std::invalid_argument("multinomial_loss_grad: parameter size mismatch");
    std::vector<double> colmajor(n * p);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < p; ++j) colmajor[j * n + i] = x_rowmajor[i * p + j];
    SmoothProblem prob{.n = n, .p = p, .blocks = k, .sigmoid = false, .z = colmajor.data(),
                       .y = y.data(), .l2 = l2};
    return prob.eval(w.data(), grad_out.data());
}

// ---- model -------------------------------------------------------------------

std::vector<double> LinearModel::decision(const DataTable& table,
                                          std::span<const std::size_t> rows) const {
    const std::vector<std::size_t> cols = resolve_columns(table);
    const std::size_t k = weights.size(), p = features.size();
    std::vector<double> out(rows.size() * k);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        for (std::size_t b = 0; b < k; ++b) {
            double m = intercept[b];
            const std::vector<double>& wb = weights[b];
            for (std::size_t j = 0; j < p; ++j)
                m += wb[j] * (table.at(rows[i], cols[j]) - center[j]) / scale[j];
            out[i * k + b] = m;
        }
    }
    return out;
}

std::vector<double> LinearModel::predict_scores(const DataTable& table,
                                                std::span<const std::size_t> rows) const {
    std::vector<double> d = decision(table, rows);
    if (task == Task::Binary) {
        for (double& v : d) v = 1.0 / (1.0 + std::exp(-v));
    } else if (task == Task::Ternary) {
        const std::size_t k = weights.size();
        for (std::size_t i = 0; i < rows.size(); ++i) {
            double* fi = d.data() + i * k;
            double mx = fi[0];
            for (std::size_t c = 1; c < k; ++c) mx = std::max(mx, fi[c]);
            double sum = 0;
            for (std::size_t c = 0; c < k; ++c) sum += fi[c] = std::exp(fi[c] - mx);
            for (std::size_t c = 0; c < k; ++c) fi[c] /= sum;
        }
    } else if (task == Task::RegressionThreshold) {
        for (double& v : d) v = std::min(v, kRegressionCapT);
    }
    return d;
}

void LinearModel::save_body(std::string& out) const {
    out += "alpha = " + format_double(alpha) + "\n";
    out += "l1_ratio = " + format_double(l1_ratio) + "\n";
    out += "outputs = " + std::to_string(weights.size()) + "\n";
    auto emit = [&out](const char* name, const std::vector<double>& v) {
        out += name;
        out += " =";
        for (double x : v) {
            out += ' ';
            out += format_double(x);
        }
        out += '\n';
    };
    emit("center", center);
    emit("scale", scale);
    emit("intercept", intercept);
    for (const std::vector<double>& wb : weights) emit("weights", wb);
}

std::unique_ptr<LinearModel> fit_linear(Task task, const DataView& train, std::uint64_t seed,
                                        const LinearFitConfig& config) {
    const std::size_t n = train.n(), p = train.p();
    if (n < 4) throw std::invalid_argument("linear: need at least four training rows");

    std::vector<double> l1_ratios = config.l1_ratios;
    if (l1_ratios.empty()) {
        if (is_classification(task))
            l1_ratios = {0.0, 0.2, 0.4, 0.6, 0.8, 1.0};
        else
            l1_ratios = {0.1, 0.5, 0.9, 1.0};
    }
    const int n_strengths = is_classification(task) ? std::min(config.n_strengths, 8)
                                                    : config.n_strengths;

    const std::vector<double> raw = raw_col_major(train);
    std::vector<int> ylab(n);
    std::vector<double> yreal(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double v = train.label(i, task);
        ylab[i] = static_cast<int>(v);
        yreal[i] = v;
    }
    const int k = task == Task::Ternary ? 3 : 1;

    // Common strength path computed from the gradient at zero on the full
    // standardized data: the largest penalty that keeps every coefficient at
    // zero, then a geometric decay.
    const StdDesign full = standardize(n, p, raw);
    double gmax = 0;
    if (is_classification(task)) {
        std::vector<double> base(static_cast<std::size_t>(k), 0.0);
        if (task == Task::Binary) {
            double pos = 0;
            for (int v : ylab) pos += v;
            base[0] = pos / static_cast<double>(n);
        } else {
            for (int v : ylab) base[static_cast<std::size_t>(v)] += 1.0 / static_cast<double>(n);
        }
        for (std::size_t j = 0; j < p; ++j) {
            const double* col = full.z.data() + j * n;
            for (int c = 0; c < k; ++c) {
                double dot = 0;
                for (std::size_t i = 0; i < n; ++i) {
                    const double target = task == Task::Binary ? (ylab[i] ? 1.0 : 0.0)
                                                               : (ylab[i] == c ? 1.0 : 0.0);
                    dot += col[i] * (base[static_cast<std::size_t>(c)] - target);
                }
                gmax = std::max(gmax, std::fabs(dot) / static_cast<double>(n));
            }
        }
    } else {
        double ybar = 0;
        for (double v : yreal) ybar += v;
        ybar /= static_cast<double>(n);
        for (std::size_t j = 0; j < p; ++j) {
            const double* col = full.z.data() + j * n;
            double dot = 0;
            for (std::size_t i = 0; i < n; ++i) dot += col[i] * (yreal[i] - ybar);
            gmax = std::max(gmax, std::fabs(dot) / static_cast<double>(n));
        }
    }
    if (gmax == 0) gmax = 1.0;

    const auto path_for = [&](double ratio) {
        const double denom = std::max(ratio, 0.01);
        return strength_path(gmax / denom, n_strengths, is_classification(task) ? 1e-4 : 1e-3);
    };

    // Internal cross-validation over (l1_ratio, strength).
    const int folds = std::max(2, std::min<int>(config.cv_folds,
                                                static_cast<int>(n) / 2));
    std::vector<std::vector<std::size_t>> fold_sets;
    if (is_classification(task)) {
        fold_sets = stratified_kfold(ylab, folds, derive_seed(seed, "linear_cv"));
    } else {
        fold_sets = kfold(n, folds, derive_seed(seed, "linear_cv"));
    }

    const std::size_t n_ratio = l1_ratios.size();
    const auto n_alpha = static_cast<std::size_t>(n_strengths);
    std::vector<double> cv_loss(n_ratio * n_alpha, 0.0);
    const double cv_tol = std::max(config.tolerance, 1e-5);
    const int cv_iter = std::min(config.max_iterations, 600);

    for (int f = 0; f < folds; ++f) {
        std::vector<char> in_val(n, 0);
        for (std::size_t i : fold_sets[static_cast<std::size_t>(f)]) in_val[i] = 1;
        std::vector<std::size_t> tr, va;
        for (std::size_t i = 0; i < n; ++i) (in_val[i] ? va : tr).push_back(i);
        if (tr.empty() || va.empty()) continue;
        const std::size_t nt = tr.size();

        std::vector<double> sub(nt * p);
        for (std::size_t j = 0; j < p; ++j)
            for (std::size_t i = 0; i < nt; ++i) sub[j * nt + i] = raw[j * n + tr[i]];
        const StdDesign ds = standardize(nt, p, sub);

        if (is_classification(task)) {
            std::vector<int> yt(nt);
            for (std::size_t i = 0; i < nt; ++i) yt[i] = ylab[tr[i]];
            const double lmax = power_iteration_lmax(nt, p, ds.z.data(),
                                                     derive_seed(seed, "lipschitz", f));
            for (std::size_t ri = 0; ri < n_ratio; ++ri) {
                const double ratio = l1_ratios[ri];
                const std::vector<double> path = path_for(ratio);
                std::vector<double> warm;
                for (std::size_t ai = 0; ai < n_alpha; ++ai) {
                    const double alpha = path[ai];
                    SmoothProblem prob{.n = nt, .p = p, .blocks = k,
                                       .sigmoid = task == Task::Binary, .z = ds.z.data(),
                                       .y = yt.data(), .l2 = alpha * (1.0 - ratio)};
                    const double lip = (task == Task::Binary ? 0.25 : 0.5) * (lmax + 1.0) * 1.05 +
                                       prob.l2;
                    FistaResult fr = fista_fit(prob, alpha * ratio, 1.0 / lip, cv_tol, cv_iter,
                                               std::move(warm));
                    warm = fr.w;
                    // Validation deviance under the fold-train transform.
                    double loss = 0;
                    for (std::size_t vi : va) {
                        std::vector<double> m(static_cast<std::size_t>(k), 0.0);
                        for (int c = 0; c < k; ++c) {
                            const double* wb = fr.w.data() +
                                               static_cast<std::size_t>(c) * (p + 1);
                            double acc = wb[p];
                            for (std::size_t j = 0; j < p; ++j)
                                acc += wb[j] * (raw[j * n + vi] - ds.center[j]) / ds.scale[j];
                            m[static_cast<std::size_t>(c)] = acc;
                        }
                        if (task == Task::Binary) {
                            const double mm = m[0];
                            loss += (mm > 0 ? mm + std::log1p(std::exp(-mm))
                                            : std::log1p(std::exp(mm))) -
                                    (ylab[vi] ? mm : 0.0);
                        } else {
                            double mx = *std::max_element(m.begin(), m.end());
                            double lse = 0;
                            for (double v : m) lse += std::exp(v - mx);
                            loss += mx + std::log(lse) - m[static_cast<std::size_t>(ylab[vi])];
                        }
                    }
                    cv_loss[ri * n_alpha + ai] += loss / static_cast<double>(va.size());
                }
            }
        } else {
            std::vector<double> yt(nt);
            double ybar = 0;
            for (std::size_t i = 0; i < nt; ++i) ybar += yreal[tr[i]];
            ybar /= static_cast<double>(nt);
            for (std::size_t i = 0; i < nt; ++i) yt[i] = yreal[tr[i]] - ybar;
            for (std::size_t ri = 0; ri < n_ratio; ++ri) {
                const double ratio = l1_ratios[ri];
                const std::vector<double> path = path_for(ratio);
                std::vector<double> warm;
                for (std::size_t ai = 0; ai < n_alpha; ++ai) {
                    CdResult cr = cd_fit(nt, p, ds.z.data(), yt.data(), path[ai], ratio, cv_tol,
                                         cv_iter, std::move(warm));
                    warm = cr.w;
                    double loss = 0;
                    for (std::size_t vi : va) {
                        double pred = ybar;
                        for (std::size_t j = 0; j < p; ++j)
                            pred += cr.w[j] * (raw[j * n + vi] - ds.center[j]) / ds.scale[j];
                        const double d = pred - yreal[vi];
                        loss += d * d;
                    }
                    cv_loss[ri * n_alpha + ai] += loss / static_cast<double>(va.size());
                }
            }
        }
    }

    std::size_t best = 0;
    for (std::size_t i = 1; i < cv_loss.size(); ++i)
        if (cv_loss[i] < cv_loss[best]) best = i;
    const double best_ratio = l1_ratios[best / n_alpha];
    const std::vector<double> best_path = path_for(best_ratio);
    const std::size_t best_ai = best % n_alpha;
    const double best_alpha = best_path[best_ai];

    // Refit on all training rows, warm-starting down the path to the winner.
    auto model = std::make_unique<LinearModel>();
    model->kind = ModelKind::Linear;
    model->task = task;
    model->features = train.column_names();
    model->w_hours = train.table->w_hours;
    model->center = full.center;
    model->scale = full.scale;
    model->alpha = best_alpha;
    model->l1_ratio = best_ratio;

    if (is_classification(task)) {
        const double lmax = power_iteration_lmax(n, p, full.z.data(),
                                                 derive_seed(seed, "lipschitz_full"));
        std::vector<double> warm;
        FistaResult fr;
        for (std::size_t ai = 0; ai <= best_ai; ++ai) {
            const double alpha = best_path[ai];
            SmoothProblem prob{.n = n, .p = p, .blocks = k,
                               .sigmoid = task == Task::Binary, .z = full.z.data(),
                               .y = ylab.data(), .l2 = alpha * (1.0 - best_ratio)};
            const double lip = (task == Task::Binary ? 0.25 : 0.5) * (lmax + 1.0) * 1.05 +
                               prob.l2;
            const bool last = ai == best_ai;
            fr = fista_fit(prob, alpha * best_ratio, 1.0 / lip, config.tolerance,
                           last ? config.max_iterations : cv_iter, std::move(warm));
            warm = fr.w;
        }
        if (!fr.converged)
            throw std::runtime_error(
                "linear solver did not converge; proximal gradient norm = " +
                format_double(fr.grad_norm));
        model->weights.resize(static_cast<std::size_t>(k));
        model->intercept.resize(static_cast<std::size_t>(k));
        for (int c = 0; c < k; ++c) {
            const double* wb = fr.w.data() + static_cast<std::size_t>(c) * (p + 1);
            model->weights[static_cast<std::size_t>(c)].assign(wb, wb + p);
            model->intercept[static_cast<std::size_t>(c)] = wb[p];
        }
    } else {
        double ybar = 0;
        for (double v : yreal) ybar += v;
        ybar /= static_cast<double>(n);
        std::vector<double> yc(n);
        for (std::size_t i = 0; i < n; ++i) yc[i] = yreal[i] - ybar;
        std::vector<double> warm;
        CdResult cr;
        for (std::size_t ai = 0; ai <= best_ai; ++ai) {
            const bool last = ai == best_ai;
            cr = cd_fit(n, p, full.z.data(), yc.data(), best_path[ai], best_ratio,
                        last ? config.tolerance : cv_tol,
                        last ? config.max_iterations : cv_iter, std::move(warm));
            warm = cr.w;
        }
        if (!cr.converged)
            throw std::runtime_error("linear solver did not converge; last sweep delta = " +
                                     format_double(cr.last_delta));
        model->weights = {cr.w};
        model->intercept = {ybar};
    }
    return model;
}

}  // namespace fadbio
