#include "fadbio/learn/ensemble.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "fadbio/csv.hpp"
#include "fadbio/eval.hpp"

namespace fadbio {

namespace {

ColMatrix col_matrix(const DataView& v) {
    ColMatrix m;
    m.n = v.n();
    m.p = v.p();
    m.v.resize(m.n * m.p);
    for (std::size_t j = 0; j < m.p; ++j)
        for (std::size_t i = 0; i < m.n; ++i) m.v[j * m.n + i] = v.at(i, j);
    return m;
}

void gather_row(const DataTable& t, std::size_t row, std::span<const std::size_t> cols,
                std::vector<double>& buf) {
    buf.resize(cols.size());
    for (std::size_t j = 0; j < cols.size(); ++j) buf[j] = t.at(row, cols[j]);
}

// Leaf lookup straight off the training matrix, avoiding row gathers.
std::size_t leaf_for_matrix_row(const Tree& t, const ColMatrix& x, std::size_t row) {
    std::size_t i = 0;
    while (t.nodes[i].feature >= 0) {
        const TreeNode& n = t.nodes[i];
        i = static_cast<std::size_t>(
            x.at(row, static_cast<std::size_t>(n.feature)) <= n.threshold ? n.left : n.right);
    }
    return i;
}

double leaf_value_for_matrix_row(const Tree& t, const ColMatrix& x, std::size_t row) {
    const TreeNode& n = t.nodes[leaf_for_matrix_row(t, x, row)];
    return t.values[static_cast<std::size_t>(n.value_at)];
}

std::vector<int> class_labels(const DataView& v, Task task) {
    std::vector<int> y(v.n());
    for (std::size_t i = 0; i < v.n(); ++i) y[i] = static_cast<int>(v.label(i, task));
    return y;
}

std::vector<double> real_labels(const DataView& v, Task task) {
    std::vector<double> y(v.n());
    for (std::size_t i = 0; i < v.n(); ++i) y[i] = v.label(i, task);
    return y;
}

double clamp_prob(double p) { return std::min(1.0 - 1e-15, std::max(1e-15, p)); }

void check_keys(const ParamSet& p, std::initializer_list<const char*> allowed) {
    for (const auto& [name, value] : p) {
        bool ok = false;
        for (const char* a : allowed) ok = ok || name == a;
        if (!ok) throw std::invalid_argument("unknown hyperparameter: " + name);
    }
}

TreeGrowth growth_from(const ParamSet& p, std::int64_t default_depth) {
    TreeGrowth g;
    auto it = p.find("max_depth");
    if (it != p.end() && it->second.kind == ParamValue::Kind::None) {
        g.max_depth = std::nullopt;
    } else {
        const std::int64_t d = param_int(p, "max_depth", default_depth);
        if (default_depth < 0 && it == p.end())
            g.max_depth = std::nullopt;  // unbounded by default
        else
            g.max_depth = static_cast<int>(d);
    }
    g.min_samples_split = static_cast<double>(param_int(p, "min_samples_split", 2));
    g.min_samples_leaf = static_cast<double>(param_int(p, "min_samples_leaf", 1));
    if (g.min_samples_split < 2 || g.min_samples_leaf < 1)
        throw std::invalid_argument("min_samples bounds out of range");
    return g;
}

}  // namespace

ForestParams forest_params(const ParamSet& p) {
    check_keys(p, {"n_estimators", "max_samples", "max_depth", "min_samples_split",
                   "min_samples_leaf", "max_features"});
    ForestParams fp;
    fp.n_estimators = static_cast<int>(param_int(p, "n_estimators", 100));
    if (fp.n_estimators < 1) throw std::invalid_argument("n_estimators must be positive");
    fp.max_samples = param_opt_real(p, "max_samples");
    if (fp.max_samples && (*fp.max_samples <= 0.0 || *fp.max_samples > 1.0))
        throw std::invalid_argument("max_samples must lie in (0, 1]");
    fp.growth = growth_from(p, -1);
    fp.max_features = param_str(p, "max_features", "none");
    return fp;
}

BoostParams boost_params(ModelKind kind, const ParamSet& p) {
    BoostParams bp;
    if (kind == ModelKind::GradientBoosting) {
        check_keys(p, {"n_estimators", "learning_rate", "max_depth", "min_samples_split",
                       "min_samples_leaf", "max_features", "subsample"});
        bp.growth = growth_from(p, 3);
        bp.learning_rate = param_real(p, "learning_rate", 0.1);
    } else {
        check_keys(p, {"n_estimators", "learning_rate", "max_depth", "min_samples_split",
                       "min_samples_leaf", "subsample", "colsample_bytree", "lambda"});
        bp.growth = growth_from(p, 6);
        bp.learning_rate = param_real(p, "learning_rate", 0.3);
        bp.colsample_bytree = param_real(p, "colsample_bytree", 1.0);
        bp.lambda = param_real(p, "lambda", 1.0);
    }
    bp.n_estimators = static_cast<int>(param_int(p, "n_estimators", 100));
    bp.max_features = param_str(p, "max_features", "none");
    bp.subsample = param_real(p, "subsample", 1.0);
    if (bp.n_estimators < 1) throw std::invalid_argument("n_estimators must be positive");
    if (!(bp.learning_rate > 0.0)) throw std::invalid_argument("learning_rate must be positive");
    if (bp.subsample <= 0.0 || bp.subsample > 1.0)
        throw std::invalid_argument("subsample must lie in (0, 1]");
    if (bp.colsample_bytree <= 0.0 || bp.colsample_bytree > 1.0)
        throw std::invalid_argument("colsample_bytree must lie in (0, 1]");
    if (bp.lambda < 0.0) throw std::invalid_argument("lambda must be non-negative");
    return bp;
}

// ---- forest ----------------------------------------------------------------

std::unique_ptr<ForestModel> fit_forest(Task task, const DataView& train, const ForestParams& fp,
                                        std::uint64_t seed, int n_jobs) {
    const std::size_t n = train.n(), p = train.p();
    if (n < 2) throw std::invalid_argument("forest: need at least two training rows");

    auto model = std::make_unique<ForestModel>();
    model->kind = ModelKind::RandomForest;
    model->task = task;
    model->features = train.column_names();
    model->trees.resize(static_cast<std::size_t>(fp.n_estimators));

    const ColMatrix x = col_matrix(train);
    const Presorted sorted = presort(x);

    std::vector<int> ylab;
    std::vector<double> yreal;
    if (is_classification(task))
        ylab = class_labels(train, task);
    else
        yreal = real_labels(train, task);

    TreeGrowth growth = fp.growth;
    growth.max_features = resolve_max_features(fp.max_features, p);

    parallel_for(model->trees.size(), n_jobs, [&](std::size_t t) {
        std::vector<double> weight;
        if (fp.max_samples) {
            Rng boot(derive_seed(seed, "bootstrap", t));
            const auto draws = static_cast<std::size_t>(
                std::ceil(*fp.max_samples * static_cast<double>(n)));
            weight.assign(n, 0.0);
            for (std::size_t d = 0; d < draws; ++d) weight[boot.below(n)] += 1.0;
        }

        TreeProblem prob;
        prob.weight = weight;
        if (is_classification(task)) {
            prob.criterion = SplitCriterion::Gini;
            prob.labels = ylab;
            prob.n_classes = n_classes(task);
        } else {
            prob.criterion = SplitCriterion::Variance;
            prob.target = yreal;
        }
        Rng split_rng(derive_seed(seed, "split", t));
        model->trees[t] = fit_tree(x, sorted, prob, growth, split_rng);
    });
    return model;
}

std::vector<double> ForestModel::predict_scores(const DataTable& table,
                                                std::span<const std::size_t> rows) const {
    const std::vector<std::size_t> cols = resolve_columns(table);
    const int k = score_width();
    std::vector<double> out(rows.size() * static_cast<std::size_t>(k), 0.0);
    std::vector<double> buf;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        gather_row(table, rows[i], cols, buf);
        double* dst = out.data() + i * static_cast<std::size_t>(k);
        if (task == Task::Binary) {
            for (const Tree& t : trees) dst[0] += t.predict_row(buf)[1];
        } else {
            for (const Tree& t : trees) {
                std::span<const double> v = t.predict_row(buf);
                for (int c = 0; c < k; ++c) dst[c] += v[static_cast<std::size_t>(c)];
            }
        }
        for (int c = 0; c < k; ++c) dst[c] /= static_cast<double>(trees.size());
    }
    return out;
}

// ---- boosting --------------------------------------------------------------

namespace {

// Shared additive-model state for both boosting flavors.
struct BoostFit {
    Task task;
    int k = 1;  // outputs per stage
    std::size_t n = 0;
    std::vector<int> ylab;
    std::vector<double> yreal;
    std::vector<double> f;  // n x k margins, row-major

    void init_scores(std::vector<double>& init) {
        init.assign(static_cast<std::size_t>(k), 0.0);
        if (task == Task::Binary) {
            double pos = 0;
            for (int v : ylab) pos += v;
            const double pbar = clamp_prob(pos / static_cast<double>(n));
            init[0] = std::log(pbar / (1.0 - pbar));
        } else if (task == Task::Ternary) {
            for (std::size_t i = 0; i < n; ++i) init[static_cast<std::size_t>(ylab[i])] += 1.0;
            for (int c = 0; c < k; ++c)
                init[static_cast<std::size_t>(c)] =
                    std::log(clamp_prob(init[static_cast<std::size_t>(c)] /
                                        static_cast<double>(n)));
        } else {
            double s = 0;
            for (double v : yreal) s += v;
            init[0] = s / static_cast<double>(n);
        }
        f.assign(n * static_cast<std::size_t>(k), 0.0);
        for (std::size_t i = 0; i < n; ++i)
            for (int c = 0; c < k; ++c) f[i * static_cast<std::size_t>(k) + c] = init[c];
    }

    // Row-wise probabilities for classification margins.
    void probs(std::size_t i, double* p) const {
        if (task == Task::Binary) {
            p[0] = 1.0 / (1.0 + std::exp(-f[i]));
            return;
        }
        const double* fi = f.data() + i * static_cast<std::size_t>(k);
        double mx = fi[0];
        for (int c = 1; c < k; ++c) mx = std::max(mx, fi[c]);
        double sum = 0;
        for (int c = 0; c < k; ++c) sum += p[c] = std::exp(fi[c] - mx);
        for (int c = 0; c < k; ++c) p[c] /= sum;
    }

    double mean_loss() const {
        double total = 0;
        double p[3];
        for (std::size_t i = 0; i < n; ++i) {
            if (task == Task::Binary) {
                probs(i, p);
                const double pi = clamp_prob(p[0]);
                total -= ylab[i] ? std::log(pi) : std::log(1.0 - pi);
            } else if (task == Task::Ternary) {
                probs(i, p);
                total -= std::log(clamp_prob(p[static_cast<std::size_t>(ylab[i])]));
            } else {
                const double d = yreal[i] - f[i];
                total += 0.5 * d * d;
            }
        }
        return total / static_cast<double>(n);
    }
};

std::vector<double> subsample_mask(std::size_t n, double fraction, Rng& rng) {
    std::vector<double> w(n, 1.0);
    if (fraction >= 1.0) return w;
    const auto keep = std::max<std::size_t>(
        1, static_cast<std::size_t>(std::round(fraction * static_cast<double>(n))));
    std::vector<std::uint32_t> idx(n);
    std::iota(idx.begin(), idx.end(), 0u);
    for (std::size_t i = 0; i < keep; ++i)
        std::swap(idx[i], idx[i + static_cast<std::size_t>(rng.below(n - i))]);
    std::fill(w.begin(), w.end(), 0.0);
    for (std::size_t i = 0; i < keep; ++i) w[idx[i]] = 1.0;
    return w;
}

std::vector<std::uint32_t> feature_subset(std::size_t p, double fraction, Rng& rng) {
    std::vector<std::uint32_t> idx(p);
    std::iota(idx.begin(), idx.end(), 0u);
    if (fraction >= 1.0) return idx;
    const auto keep = std::max<std::size_t>(
        1, static_cast<std::size_t>(std::round(fraction * static_cast<double>(p))));
    for (std::size_t i = 0; i < keep; ++i)
        std::swap(idx[i], idx[i + static_cast<std::size_t>(rng.below(p - i))]);
    idx.resize(keep);
    std::sort(idx.begin(), idx.end());
    return idx;
}

std::unique_ptr<BoostModel> make_boost_model(ModelKind kind, Task task, const DataView& train) {
    auto model = std::make_unique<BoostModel>();
    model->kind = kind;
    model->task = task;
    model->features = train.column_names();
    model->k_outputs = task == Task::Ternary ? 3 : 1;
    return model;
}

}  // namespace

std::unique_ptr<BoostModel> fit_gradient_boosting(Task task, const DataView& train,
                                                  const BoostParams& bp, std::uint64_t seed) {
    const std::size_t n = train.n(), p = train.p();
    if (n < 2) throw std::invalid_argument("boosting: need at least two training rows");
    auto model = make_boost_model(ModelKind::GradientBoosting, task, train);
    const int k = model->k_outputs;

    const ColMatrix x = col_matrix(train);
    const Presorted sorted = presort(x);

    BoostFit st;
    st.task = task;
    st.k = k;
    st.n = n;
    if (is_classification(task))
        st.ylab = class_labels(train, task);
    else
        st.yreal = real_labels(train, task);
    st.init_scores(model->init_score);

    TreeGrowth growth = bp.growth;
    growth.max_features = resolve_max_features(bp.max_features, p);

    std::vector<double> resid(n), hess(n), pbuf(3);
    for (int stage = 0; stage < bp.n_estimators; ++stage) {
        Rng sub_rng(derive_seed(seed, "subsample", static_cast<std::uint64_t>(stage)));
        const std::vector<double> mask = subsample_mask(n, bp.subsample, sub_rng);

        for (int c = 0; c < k; ++c) {
            // Negative gradient of the loss at the current margins.
            for (std::size_t i = 0; i < n; ++i) {
                if (task == Task::Binary) {
                    st.probs(i, pbuf.data());
                    resid[i] = st.ylab[i] - pbuf[0];
                    hess[i] = std::max(pbuf[0] * (1.0 - pbuf[0]), 1e-12);
                } else if (task == Task::Ternary) {
                    st.probs(i, pbuf.data());
                    const double pc = pbuf[static_cast<std::size_t>(c)];
                    resid[i] = (st.ylab[i] == c ? 1.0 : 0.0) - pc;
                    hess[i] = std::max(pc * (1.0 - pc), 1e-12);
                } else {
                    resid[i] = st.yreal[i] - st.f[i];
                }
            }

            TreeProblem prob;
            prob.criterion = SplitCriterion::Variance;
            prob.target = resid;
            prob.weight = mask;
            Rng split_rng(derive_seed(seed, "split",
                                      static_cast<std::uint64_t>(stage) * 8 +
                                          static_cast<std::uint64_t>(c)));
            Tree tree = fit_tree(x, sorted, prob, growth, split_rng);

            // Newton refit of the leaves for the likelihood losses, on the
            // rows the tree was grown on.
            if (is_classification(task)) {
                std::vector<double> num(tree.nodes.size(), 0.0), den(tree.nodes.size(), 0.0);
                for (std::size_t i = 0; i < n; ++i) {
                    if (mask[i] == 0.0) continue;
                    const std::size_t leaf = leaf_for_matrix_row(tree, x, i);
                    num[leaf] += resid[i];
                    den[leaf] += hess[i];
                }
                for (std::size_t ni = 0; ni < tree.nodes.size(); ++ni) {
                    TreeNode& node = tree.nodes[ni];
                    if (node.feature >= 0) continue;
                    tree.values[static_cast<std::size_t>(node.value_at)] =
                        den[ni] > 0 ? num[ni] / std::max(den[ni], 1e-12) : 0.0;
                }
            }
            for (double& v : tree.values) v *= bp.learning_rate;

            for (std::size_t i = 0; i < n; ++i)
                st.f[i * static_cast<std::size_t>(k) + c] += leaf_value_for_matrix_row(tree, x, i);
            model->trees.push_back(std::move(tree));
        }
        model->train_loss.push_back(st.mean_loss());
    }
    return model;
}

std::unique_ptr<BoostModel> fit_second_order_boosting(Task task, const DataView& train,
                                                      const BoostParams& bp, std::uint64_t seed) {
    const std::size_t n = train.n(), p = train.p();
    if (n < 2) throw std::invalid_argument("boosting: need at least two training rows");
    auto model = make_boost_model(ModelKind::SecondOrderBoosting, task, train);
    const int k = model->k_outputs;

    const ColMatrix x = col_matrix(train);
    const Presorted sorted = presort(x);

    BoostFit st;
    st.task = task;
    st.k = k;
    st.n = n;
    if (is_classification(task))
        st.ylab = class_labels(train, task);
    else
        st.yreal = real_labels(train, task);
    st.init_scores(model->init_score);

    TreeGrowth growth = bp.growth;
    growth.max_features = resolve_max_features(bp.max_features, p);

    std::vector<double> grad(n), hess(n), pbuf(3);
    for (int stage = 0; stage < bp.n_estimators; ++stage) {
        Rng sub_rng(derive_seed(seed, "subsample", static_cast<std::uint64_t>(stage)));
        const std::vector<double> mask = subsample_mask(n, bp.subsample, sub_rng);

        for (int c = 0; c < k; ++c) {
            for (std::size_t i = 0; i < n; ++i) {
                if (task == Task::Binary) {
                    st.probs(i, pbuf.data());
                    grad[i] = pbuf[0] - st.ylab[i];
                    hess[i] = std::max(pbuf[0] * (1.0 - pbuf[0]), 1e-16);
                } else if (task == Task::Ternary) {
                    st.probs(i, pbuf.data());
                    const double pc = pbuf[static_cast<std::size_t>(c)];
                    grad[i] = pc - (st.ylab[i] == c ? 1.0 : 0.0);
                    hess[i] = std::max(pc * (1.0 - pc), 1e-16);
                } else {
                    grad[i] = st.f[i] - st.yreal[i];
                    hess[i] = 1.0;
                }
            }

            Rng col_rng(derive_seed(seed, "colsample",
                                    static_cast<std::uint64_t>(stage) * 8 +
                                        static_cast<std::uint64_t>(c)));
            const std::vector<std::uint32_t> cols = feature_subset(p, bp.colsample_bytree, col_rng);

            TreeProblem prob;
            prob.criterion = SplitCriterion::SecondOrder;
            prob.grad = grad;
            prob.hess = hess;
            prob.lambda = bp.lambda;
            prob.weight = mask;
            prob.allowed_features = cols;
            Rng split_rng(derive_seed(seed, "split",
                                      static_cast<std::uint64_t>(stage) * 8 +
                                          static_cast<std::uint64_t>(c)));
            Tree tree = fit_tree(x, sorted, prob, growth, split_rng);
            for (double& v : tree.values) v *= bp.learning_rate;

            for (std::size_t i = 0; i < n; ++i)
                st.f[i * static_cast<std::size_t>(k) + c] += leaf_value_for_matrix_row(tree, x, i);
            model->trees.push_back(std::move(tree));
        }
        model->train_loss.push_back(st.mean_loss());
    }
    return model;
}

std::vector<double> BoostModel::decision(const DataTable& table,
                                         std::span<const std::size_t> rows) const {
    const std::vector<std::size_t> cols = resolve_columns(table);
    const auto k = static_cast<std::size_t>(k_outputs);
    std::vector<double> out(rows.size() * k);
    std::vector<double> buf;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        gather_row(table, rows[i], cols, buf);
        double* dst = out.data() + i * k;
        for (std::size_t c = 0; c < k; ++c) dst[c] = init_score[c];
        for (std::size_t t = 0; t < trees.size(); ++t)
            dst[t % k] += trees[t].predict_row(buf)[0];
    }
    return out;
}

std::vector<double> BoostModel::predict_scores(const DataTable& table,
                                               std::span<const std::size_t> rows) const {
    std::vector<double> d = decision(table, rows);
    if (task == Task::Binary) {
        for (double& v : d) v = 1.0 / (1.0 + std::exp(-v));
    } else if (task == Task::Ternary) {
        const auto k = static_cast<std::size_t>(k_outputs);
        for (std::size_t i = 0; i < rows.size(); ++i) {
            double* fi = d.data() + i * k;
            double mx = fi[0];
            for (std::size_t c = 1; c < k; ++c) mx = std::max(mx, fi[c]);
            double sum = 0;
            for (std::size_t c = 0; c < k; ++c) sum += fi[c] = std::exp(fi[c] - mx);
            for (std::size_t c = 0; c < k; ++c) fi[c] /= sum;
        }
    }
    return d;
}

// ---- serialization bodies ---------------------------------------------------

namespace {

void save_tree_block(std::string& out, const std::vector<Tree>& trees) {
    out += "trees = " + std::to_string(trees.size()) + "\n";
    for (const Tree& t : trees) {
        out += "tree " + std::to_string(t.nodes.size()) + " " + std::to_string(t.value_width) +
               "\n";
        for (const TreeNode& n : t.nodes) {
            if (n.feature < 0) {
                out += "leaf";
                for (int c = 0; c < t.value_width; ++c) {
                    out += ' ';
                    out += format_double(t.values[static_cast<std::size_t>(n.value_at) +
                                                  static_cast<std::size_t>(c)]);
                }
            } else {
                out += "split " + std::to_string(n.feature) + " " + format_double(n.threshold) +
                       " " + std::to_string(n.left) + " " + std::to_string(n.right);
            }
            out += '\n';
        }
    }
}

}  // namespace

void ForestModel::save_body(std::string& out) const { save_tree_block(out, trees); }

void BoostModel::save_body(std::string& out) const {
    out += "outputs = " + std::to_string(k_outputs) + "\n";
    out += "init =";
    for (double v : init_score) {
        out += ' ';
        out += format_double(v);
    }
    out += '\n';
    out += "loss_trace =";
    for (double v : train_loss) {
        out += ' ';
        out += format_double(v);
    }
    out += '\n';
    save_tree_block(out, trees);
}

}  // namespace fadbio
