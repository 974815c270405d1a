#include "fadbio/learn/model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "fadbio/csv.hpp"
#include "fadbio/learn/baseline.hpp"
#include "fadbio/learn/ensemble.hpp"
#include "fadbio/learn/linear.hpp"

namespace fadbio {

const char* model_kind_name(ModelKind k) {
    switch (k) {
        case ModelKind::Baseline: return "baseline";
        case ModelKind::Linear: return "linear";
        case ModelKind::RandomForest: return "rf";
        case ModelKind::GradientBoosting: return "gb";
        case ModelKind::SecondOrderBoosting: return "xgb";
    }
    return "?";
}

std::optional<ModelKind> parse_model_kind(std::string_view s) {
    if (s == "baseline") return ModelKind::Baseline;
    if (s == "linear") return ModelKind::Linear;
    if (s == "rf") return ModelKind::RandomForest;
    if (s == "gb") return ModelKind::GradientBoosting;
    if (s == "xgb") return ModelKind::SecondOrderBoosting;
    return std::nullopt;
}

ParamValue ParamValue::parse(std::string_view text) {
    if (text == "none" || text == "None") return none();
    if (const std::optional<std::int64_t> i = parse_int(text)) return of(*i);
    if (const std::optional<double> d = parse_double(text)) return of(*d);
    return of(std::string(text));
}

std::string ParamValue::to_string() const {
    switch (kind) {
        case Kind::None: return "none";
        case Kind::Int: return std::to_string(i);
        case Kind::Real: return format_double(d);
        case Kind::Str: return s;
    }
    return "?";
}

std::string param_set_to_string(const ParamSet& p) {
    std::string out;
    for (const auto& [name, value] : p) {
        if (!out.empty()) out += ' ';
        out += name + "=" + value.to_string();
    }
    return out.empty() ? "(defaults)" : out;
}

std::size_t HyperGrid::size() const {
    std::size_t total = 1;
    for (const auto& [name, values] : axes) {
        if (values.empty()) throw std::invalid_argument("empty grid axis: " + name);
        total *= values.size();
    }
    return total;
}

ParamSet HyperGrid::candidate(std::size_t index) const {
    if (index >= size()) throw std::out_of_range("grid candidate index");
    ParamSet p;
    // Last axis varies fastest.
    for (std::size_t a = axes.size(); a-- > 0;) {
        const auto& [name, values] = axes[a];
        p[name] = values[index % values.size()];
        index /= values.size();
    }
    return p;
}

int Model::score_width() const { return task == Task::Ternary ? 3 : 1; }

std::vector<std::size_t> Model::resolve_columns(const DataTable& table) const {
    std::vector<std::size_t> cols(features.size());
    std::string missing;
    for (std::size_t j = 0; j < features.size(); ++j) {
        cols[j] = table.column_index(features[j]);
        if (cols[j] == kNoColumn) {
            if (!missing.empty()) missing += ", ";
            missing += features[j];
        }
    }
    if (!missing.empty())
        throw std::runtime_error("dataset is missing model columns: " + missing);
    return cols;
}

std::vector<int> Model::predict_class(const DataTable& table,
                                      std::span<const std::size_t> rows) const {
    if (!is_classification(task))
        throw std::logic_error("predict_class on a regression model");
    const std::vector<double> s = predict_scores(table, rows);
    std::vector<int> out(rows.size());
    if (task == Task::Binary) {
        for (std::size_t i = 0; i < rows.size(); ++i) out[i] = s[i] >= 0.5 ? 1 : 0;
        return out;
    }
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const double* p = s.data() + i * 3;
        int arg = 0;
        for (int c = 1; c < 3; ++c)
            if (p[c] > p[arg]) arg = c;
        out[i] = arg;
    }
    return out;
}

std::vector<double> Model::predict_value(const DataTable& table,
                                         std::span<const std::size_t> rows) const {
    if (is_classification(task))
        throw std::logic_error("predict_value on a classification model");
    return predict_scores(table, rows);
}

std::unique_ptr<Model> fit_model(ModelKind kind, Task task, const ParamSet& params,
                                 const DataView& train, std::uint64_t seed, int n_jobs) {
    std::unique_ptr<Model> m;
    switch (kind) {
        case ModelKind::Baseline:
            m = fit_baseline(task, train);
            break;
        case ModelKind::Linear:
            // Penalty selection is internal; no outer hyperparameters.
            m = fit_linear(task, train, seed);
            break;
        case ModelKind::RandomForest:
            m = fit_forest(task, train, forest_params(params), seed, n_jobs);
            break;
        case ModelKind::GradientBoosting:
            m = fit_gradient_boosting(task, train, boost_params(kind, params), seed);
            break;
        case ModelKind::SecondOrderBoosting:
            m = fit_second_order_boosting(task, train, boost_params(kind, params), seed);
            break;
    }
    m->w_hours = train.table->w_hours;
    return m;
}

HyperGrid default_grid(ModelKind kind, Task task) {
    const bool cls = is_classification(task);
    auto ints = [](std::initializer_list<std::int64_t> vs) {
        std::vector<ParamValue> out;
        for (std::int64_t v : vs) out.push_back(ParamValue::of(v));
        return out;
    };
    auto reals = [](std::initializer_list<double> vs) {
        std::vector<ParamValue> out;
        for (double v : vs) out.push_back(ParamValue::of(v));
        return out;
    };
    auto depth_list = [](std::initializer_list<std::int64_t> vs) {
        std::vector<ParamValue> out{ParamValue::none()};
        for (std::int64_t v : vs) out.push_back(ParamValue::of(v));
        return out;
    };
    const std::vector<ParamValue> feature_modes{ParamValue::none(),
                                                ParamValue::of(std::string("sqrt")),
                                                ParamValue::of(std::string("log2"))};

    HyperGrid g;
    switch (kind) {
        case ModelKind::Baseline:
        case ModelKind::Linear:
            return g;  // single empty candidate
        case ModelKind::RandomForest:
            g.axes = {
                {"n_estimators", cls ? ints({200, 500, 1000}) : ints({100, 200, 500})},
                {"max_samples", {ParamValue::none(), ParamValue::of(0.8)}},
                {"max_depth", cls ? depth_list({2, 4}) : depth_list({4, 8})},
                {"min_samples_split", ints({2, 8, 32})},
                {"min_samples_leaf", ints({1, 4, 16})},
                {"max_features", feature_modes},
            };
            return g;
        case ModelKind::GradientBoosting:
            g.axes = {
                {"n_estimators", cls ? ints({50, 100, 200}) : ints({400})},
                {"learning_rate", reals({0.01, 0.1, 0.2})},
                {"max_depth", depth_list({3, 6})},
                {"min_samples_split", ints({2, 4, 8})},
                {"min_samples_leaf", ints({1, 2, 4})},
                {"max_features", feature_modes},
            };
            return g;
        case ModelKind::SecondOrderBoosting:
            g.axes = {
                {"n_estimators", cls ? ints({50}) : ints({50, 100, 200})},
                {"learning_rate", cls ? reals({0.2}) : reals({0.01, 0.1, 0.2})},
                {"max_depth", cls ? ints({2, 4}) : ints({2, 4, 6})},
                {"subsample", cls ? reals({1.0}) : reals({0.7, 1.0})},
                {"colsample_bytree", cls ? reals({1.0}) : reals({0.5, 1.0})},
            };
            return g;
    }
    return g;
}

// ---- param helpers -----------------------------------------------------------

namespace {

const ParamValue* find_param(const ParamSet& p, const std::string& name) {
    const auto it = p.find(name);
    return it == p.end() ? nullptr : &it->second;
}

[[noreturn]] void bad_param(const std::string& name, const char* want) {
    throw std::invalid_argument("hyperparameter " + name + " must be " + want);
}

}  // namespace

std::int64_t param_int(const ParamSet& p, const std::string& name, std::int64_t fallback) {
    const ParamValue* v = find_param(p, name);
    if (!v) return fallback;
    if (v->kind != ParamValue::Kind::Int) bad_param(name, "an integer");
    return v->i;
}

double param_real(const ParamSet& p, const std::string& name, double fallback) {
    const ParamValue* v = find_param(p, name);
    if (!v) return fallback;
    if (v->kind == ParamValue::Kind::Int) return static_cast<double>(v->i);
    if (v->kind != ParamValue::Kind::Real) bad_param(name, "a number");
    return v->d;
}

std::optional<std::int64_t> param_opt_int(const ParamSet& p, const std::string& name) {
    const ParamValue* v = find_param(p, name);
    if (!v || v->kind == ParamValue::Kind::None) return std::nullopt;
    if (v->kind != ParamValue::Kind::Int) bad_param(name, "an integer or none");
    return v->i;
}

std::optional<double> param_opt_real(const ParamSet& p, const std::string& name) {
    const ParamValue* v = find_param(p, name);
    if (!v || v->kind == ParamValue::Kind::None) return std::nullopt;
    if (v->kind == ParamValue::Kind::Int) return static_cast<double>(v->i);
    if (v->kind != ParamValue::Kind::Real) bad_param(name, "a number or none");
    return v->d;
}

std::string param_str(const ParamSet& p, const std::string& name, const std::string& fallback) {
    const ParamValue* v = find_param(p, name);
    if (!v) return fallback;
    if (v->kind == ParamValue::Kind::None) return "none";
    if (v->kind != ParamValue::Kind::Str) bad_param(name, "a symbol");
    return v->s;
}

// ---- serialization -----------------------------------------------------------

namespace {

constexpr const char* kMagic = "fadbio model 1";

struct LineReader {
    std::vector<std::string> lines;
    std::size_t pos = 0;

    explicit LineReader(const std::string& text) {
        std::string cur;
        for (char c : text) {
            if (c == '\n') {
                lines.push_back(cur);
                cur.clear();
            } else if (c != '\r') {
                cur += c;
            }
        }
        if (!cur.empty()) lines.push_back(cur);
    }
    bool done() const { return pos >= lines.size(); }
    const std::string& next() {
        if (done()) throw std::runtime_error("model file: unexpected end of file");
        return lines[pos++];
    }
};

std::vector<std::string> split_ws(const std::string& line) {
    std::vector<std::string> out;
    std::istringstream ss(line);
    std::string tok;
    while (ss >> tok) out.push_back(tok);
    return out;
}

// Reads `key = v1 v2 ...` and returns the value tokens.
std::vector<std::string> expect_kv(LineReader& r, const std::string& key) {
    const std::string& line = r.next();
    std::vector<std::string> toks = split_ws(line);
    if (toks.size() < 2 || toks[0] != key || toks[1] != "=")
        throw std::runtime_error("model file: expected '" + key + " = ...', got: " + line);
    return {toks.begin() + 2, toks.end()};
}

std::string expect_one(LineReader& r, const std::string& key) {
    const std::vector<std::string> vals = expect_kv(r, key);
    if (vals.size() != 1)
        throw std::runtime_error("model file: expected one value for " + key);
    return vals[0];
}

double num(const std::string& tok) {
    const std::optional<double> v = parse_double(tok);
    if (!v) throw std::runtime_error("model file: bad number: " + tok);
    return *v;
}

std::int64_t inum(const std::string& tok) {
    const std::optional<std::int64_t> v = parse_int(tok);
    if (!v) throw std::runtime_error("model file: bad integer: " + tok);
    return *v;
}

std::vector<double> nums(const std::vector<std::string>& toks) {
    std::vector<double> out;
    out.reserve(toks.size());
    for (const std::string& t : toks) out.push_back(num(t));
    return out;
}

std::vector<Tree> load_tree_block(LineReader& r) {
    const auto n_trees = static_cast<std::size_t>(inum(expect_one(r, "trees")));
    std::vector<Tree> trees(n_trees);
    for (Tree& t : trees) {
        const std::vector<std::string> head = split_ws(r.next());
        if (head.size() != 3 || head[0] != "tree")
            throw std::runtime_error("model file: expected tree header");
        const auto n_nodes = static_cast<std::size_t>(inum(head[1]));
        t.value_width = static_cast<int>(inum(head[2]));
        if (t.value_width < 1 || n_nodes < 1)
            throw std::runtime_error("model file: malformed tree header");
        t.nodes.resize(n_nodes);
        for (TreeNode& node : t.nodes) {
            const std::vector<std::string> toks = split_ws(r.next());
            if (!toks.empty() && toks[0] == "leaf") {
                if (toks.size() != 1 + static_cast<std::size_t>(t.value_width))
                    throw std::runtime_error("model file: leaf arity mismatch");
                node.value_at = static_cast<std::int32_t>(t.values.size());
                for (std::size_t c = 1; c < toks.size(); ++c) t.values.push_back(num(toks[c]));
            } else if (!toks.empty() && toks[0] == "split" && toks.size() == 5) {
                node.feature = static_cast<std::int32_t>(inum(toks[1]));
                node.threshold = num(toks[2]);
                node.left = static_cast<std::int32_t>(inum(toks[3]));
                node.right = static_cast<std::int32_t>(inum(toks[4]));
                if (node.feature < 0 || node.left < 0 || node.right < 0 ||
                    node.left >= static_cast<std::int32_t>(n_nodes) ||
                    node.right >= static_cast<std::int32_t>(n_nodes))
                    throw std::runtime_error("model file: split node out of range");
            } else {
                throw std::runtime_error("model file: bad tree node line");
            }
        }
    }
    return trees;
}

}  // namespace

std::string save_model(const Model& m) {
    std::string out;
    out += kMagic;
    out += '\n';
    out += "kind = ";
    out += model_kind_name(m.kind);
    out += '\n';
    out += "task = ";
    out += task_name(m.task);
    out += '\n';
    out += "w_hours = " + std::to_string(m.w_hours) + "\n";
    out += "features = " + std::to_string(m.features.size()) + "\n";
    for (const std::string& f : m.features) {
        out += f;
        out += '\n';
    }
    out += "medians = " + std::to_string(m.medians.size()) + "\n";
    for (const auto& [name, value] : m.medians) {
        out += name;
        out += ' ';
        out += format_double(value);
        out += '\n';
    }
    m.save_body(out);
    out += "end\n";
    return out;
}

void save_model_file(const Model& m, const std::string& path) {
    atomic_write_file(path, save_model(m));
}

std::unique_ptr<Model> load_model(const std::string& text) {
    LineReader r(text);
    if (r.next() != kMagic) throw std::runtime_error("model file: unrecognized header");
    const std::string kind_s = expect_one(r, "kind");
    const std::optional<ModelKind> kind = parse_model_kind(kind_s);
    if (!kind) throw std::runtime_error("model file: unknown kind: " + kind_s);
    const std::string task_s = expect_one(r, "task");
    const std::optional<Task> task = parse_task(task_s);
    if (!task) throw std::runtime_error("model file: unknown task: " + task_s);
    const int w_hours = static_cast<int>(inum(expect_one(r, "w_hours")));

    const auto n_features = static_cast<std::size_t>(inum(expect_one(r, "features")));
    std::vector<std::string> features(n_features);
    for (std::string& f : features) f = r.next();
    const auto n_medians = static_cast<std::size_t>(inum(expect_one(r, "medians")));
    TrainMedians medians;
    for (std::size_t i = 0; i < n_medians; ++i) {
        const std::vector<std::string> toks = split_ws(r.next());
        if (toks.size() != 2) throw std::runtime_error("model file: bad median line");
        medians[toks[0]] = num(toks[1]);
    }

    std::unique_ptr<Model> m;
    switch (*kind) {
        case ModelKind::Baseline: {
            auto b = std::make_unique<BaselineModel>();
            const std::string rule_s = expect_one(r, "rule");
            const std::optional<BaselineRule> rule = parse_baseline_rule(rule_s);
            if (!rule) throw std::runtime_error("model file: unknown baseline rule: " + rule_s);
            b->rule = *rule;
            m = std::move(b);
            break;
        }
        case ModelKind::Linear: {
            auto lm = std::make_unique<LinearModel>();
            lm->alpha = num(expect_one(r, "alpha"));
            lm->l1_ratio = num(expect_one(r, "l1_ratio"));
            const auto outputs = static_cast<std::size_t>(inum(expect_one(r, "outputs")));
            lm->center = nums(expect_kv(r, "center"));
            lm->scale = nums(expect_kv(r, "scale"));
            lm->intercept = nums(expect_kv(r, "intercept"));
            for (std::size_t b = 0; b < outputs; ++b)
                lm->weights.push_back(nums(expect_kv(r, "weights")));
            if (lm->center.size() != n_features || lm->scale.size() != n_features ||
                lm->intercept.size() != outputs)
                throw std::runtime_error("model file: linear dimensions inconsistent");
            for (const std::vector<double>& wb : lm->weights)
                if (wb.size() != n_features)
                    throw std::runtime_error("model file: linear weight row length mismatch");
            m = std::move(lm);
            break;
        }
        case ModelKind::RandomForest: {
            auto f = std::make_unique<ForestModel>();
            f->trees = load_tree_block(r);
            if (f->trees.empty()) throw std::runtime_error("model file: forest with no trees");
            m = std::move(f);
            break;
        }
        case ModelKind::GradientBoosting:
        case ModelKind::SecondOrderBoosting: {
            auto bm = std::make_unique<BoostModel>();
            bm->k_outputs = static_cast<int>(inum(expect_one(r, "outputs")));
            bm->init_score = nums(expect_kv(r, "init"));
            bm->train_loss = nums(expect_kv(r, "loss_trace"));
            bm->trees = load_tree_block(r);
            if (bm->k_outputs < 1 ||
                bm->init_score.size() != static_cast<std::size_t>(bm->k_outputs) ||
                bm->trees.size() % static_cast<std::size_t>(bm->k_outputs) != 0)
                throw std::runtime_error("model file: boosting dimensions inconsistent");
            m = std::move(bm);
            break;
        }
    }
    if (r.next() != "end") throw std::runtime_error("model file: missing end marker");
    m->kind = *kind;
    m->task = *task;
    m->w_hours = w_hours;
    m->features = std::move(features);
    m->medians = std::move(medians);
    return m;
}

std::unique_ptr<Model> load_model_file(const std::string& path) {
    return load_model(read_text_file(path));
}

}  // namespace fadbio
