#include "fadbio/eval.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <map>
#include <mutex>
#include <numeric>
#include <stdexcept>
#include <thread>

#include "fadbio/rng.hpp"

namespace fadbio {

ConfusionMatrix ConfusionMatrix::from(std::span<const int> obs, std::span<const int> pred,
                                      int k) {
    if (obs.size() != pred.size()) throw std::invalid_argument("label/prediction size mismatch");
    if (k < 2) throw std::invalid_argument("confusion matrix needs k >= 2");
    ConfusionMatrix cm;
    cm.k = k;
    cm.counts.assign(static_cast<std::size_t>(k) * k, 0);
    for (std::size_t i = 0; i < obs.size(); ++i) {
        if (obs[i] < 0 || obs[i] >= k || pred[i] < 0 || pred[i] >= k)
            throw std::invalid_argument("class index out of range");
        ++cm.counts[static_cast<std::size_t>(obs[i]) * k + pred[i]];
    }
    return cm;
}

std::int64_t ConfusionMatrix::support(int cls) const {
    std::int64_t s = 0;
    for (int p = 0; p < k; ++p) s += at(cls, p);
    return s;
}

namespace {

// Per-class F1 with 0 conventions when precision/recall are undefined.
double f1_of_class(const ConfusionMatrix& cm, int c) {
    std::int64_t col = 0;
    for (int o = 0; o < cm.k; ++o) col += cm.at(o, c);
    const std::int64_t row = cm.support(c);
    const std::int64_t tp = cm.at(c, c);
    if (col == 0 || row == 0) return 0.0;
    const double prec = static_cast<double>(tp) / static_cast<double>(col);
    const double rec = static_cast<double>(tp) / static_cast<double>(row);
    if (prec + rec == 0.0) return 0.0;
    return 2.0 * prec * rec / (prec + rec);
}

}  // namespace

double f1_binary(const ConfusionMatrix& cm) {
    if (cm.k != 2) throw std::invalid_argument("binary F1 needs k = 2");
    return f1_of_class(cm, 1);
}

double f1_weighted(const ConfusionMatrix& cm) {
    double num = 0.0;
    std::int64_t total = 0;
    for (int c = 0; c < cm.k; ++c) {
        const std::int64_t sup = cm.support(c);
        if (sup == 0) continue;
        num += static_cast<double>(sup) * f1_of_class(cm, c);
        total += sup;
    }
    if (total == 0) throw std::invalid_argument("weighted F1 on empty labels");
    return num / static_cast<double>(total);
}

double roc_auc(std::span<const double> scores, std::span<const int> labels) {
    if (scores.size() != labels.size() || scores.empty())
        throw std::invalid_argument("roc_auc input size mismatch");
    const std::size_t n = scores.size();
    std::size_t n_pos = 0;
    for (int l : labels) {
        if (l != 0 && l != 1) throw std::invalid_argument("roc_auc labels must be 0/1");
        n_pos += static_cast<std::size_t>(l);
    }
    const std::size_t n_neg = n - n_pos;
    if (n_pos == 0 || n_neg == 0)
        throw std::runtime_error("roc_auc needs both classes present");

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

    // Mid-rank assignment over tied score groups; ranks are 1-based.
    double pos_rank_sum = 0.0;
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && scores[order[j + 1]] == scores[order[i]]) ++j;
        const double rank = 0.5 * static_cast<double>(i + j) + 1.0;
        for (std::size_t t = i; t <= j; ++t)
            if (labels[order[t]] == 1) pos_rank_sum += rank;
        i = j + 1;
    }
    const double np = static_cast<double>(n_pos);
    const double nn = static_cast<double>(n_neg);
    return (pos_rank_sum - np * (np + 1.0) * 0.5) / (np * nn);
}

double macro_ovr_auc(std::span<const double> probs, std::span<const int> labels, int k) {
    if (k < 2 || labels.empty() || probs.size() != labels.size() * static_cast<std::size_t>(k))
        throw std::invalid_argument("macro_ovr_auc input size mismatch");
    const std::size_t n = labels.size();
    double sum = 0.0;
    int used = 0;
    std::vector<double> col(n);
    std::vector<int> bin(n);
    for (int c = 0; c < k; ++c) {
        std::size_t n_pos = 0;
        for (std::size_t r = 0; r < n; ++r) {
            col[r] = probs[r * k + c];
            bin[r] = labels[r] == c ? 1 : 0;
            n_pos += static_cast<std::size_t>(bin[r]);
        }
        if (n_pos == 0 || n_pos == n) continue;  // degenerate one-vs-rest split
        sum += roc_auc(col, bin);
        ++used;
    }
    if (used == 0) throw std::runtime_error("macro_ovr_auc: no scorable class");
    return sum / used;
}

double mean_absolute_error(std::span<const double> pred, std::span<const double> obs) {
    if (pred.size() != obs.size() || pred.empty())
        throw std::invalid_argument("mean_absolute_error input size mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < pred.size(); ++i) s += std::abs(pred[i] - obs[i]);
    return s / static_cast<double>(pred.size());
}

const char* metric_name(Metric m) {
    switch (m) {
        case Metric::RocAuc: return "auc";
        case Metric::F1: return "f1";
        case Metric::WeightedF1: return "weighted_f1";
        case Metric::Mae: return "mae";
    }
    return "?";
}

bool metric_maximizes(Metric m) { return m != Metric::Mae; }

Metric selection_metric(Task t) { return is_classification(t) ? Metric::RocAuc : Metric::Mae; }

Metric report_metric(Task t) {
    switch (t) {
        case Task::Binary: return Metric::F1;
        case Task::Ternary: return Metric::WeightedF1;
        default: return Metric::Mae;
    }
}

double score_model(const Model& m, const DataTable& table, std::span<const std::size_t> rows,
                   Metric metric) {
    if (rows.empty()) throw std::invalid_argument("score_model on zero rows");
    std::vector<int> labels;
    if (is_classification(m.task)) {
        labels.resize(rows.size());
        for (std::size_t i = 0; i < rows.size(); ++i)
            labels[i] = static_cast<int>(label_value(table.y[rows[i]], m.task));
    }
    switch (metric) {
        case Metric::RocAuc: {
            if (!is_classification(m.task))
                throw std::invalid_argument("AUC is undefined for regression tasks");
            const std::vector<double> scores = m.predict_scores(table, rows);
            if (m.task == Task::Binary) return roc_auc(scores, labels);
            return macro_ovr_auc(scores, labels, 3);
        }
        case Metric::F1: {
            if (m.task != Task::Binary) throw std::invalid_argument("F1 needs the binary task");
            const std::vector<int> pred = m.predict_class(table, rows);
            return f1_binary(ConfusionMatrix::from(labels, pred, 2));
        }
        case Metric::WeightedF1: {
            if (m.task != Task::Ternary)
                throw std::invalid_argument("weighted F1 needs the ternary task");
            const std::vector<int> pred = m.predict_class(table, rows);
            return f1_weighted(ConfusionMatrix::from(labels, pred, 3));
        }
        case Metric::Mae: {
            if (is_classification(m.task))
                throw std::invalid_argument("MAE is undefined for classification tasks");
            const std::vector<double> pred = m.predict_value(table, rows);
            std::vector<double> obs(rows.size());
            for (std::size_t i = 0; i < rows.size(); ++i)
                obs[i] = label_value(table.y[rows[i]], m.task);
            return mean_absolute_error(pred, obs);
        }
    }
    throw std::logic_error("unreachable metric");
}

namespace {

// Stratum codes in ascending order with their member indices.
std::map<int, std::vector<std::size_t>> group_strata(std::span<const int> strata) {
    std::map<int, std::vector<std::size_t>> groups;
    for (std::size_t i = 0; i < strata.size(); ++i) groups[strata[i]].push_back(i);
    return groups;
}

std::uint64_t code_stream(int code) {
    return static_cast<std::uint64_t>(static_cast<std::int64_t>(code));
}

}  // namespace

SplitIndices stratified_split(std::span<const int> strata, double test_fraction,
                              std::uint64_t seed) {
    if (strata.empty()) throw std::invalid_argument("stratified_split on empty data");
    if (!(test_fraction > 0.0 && test_fraction < 1.0))
        throw std::invalid_argument("test_fraction must be inside (0, 1)");
    auto groups = group_strata(strata);
    for (const auto& [code, members] : groups)
        if (members.size() < 2)
            throw std::invalid_argument("stratum " + std::to_string(code) +
                                        " has fewer than 2 rows");

    const auto n = strata.size();
    const auto total_test =
        static_cast<std::size_t>(std::llround(static_cast<double>(n) * test_fraction));

    // Largest-remainder apportionment of the test quota across strata.
    struct Share {
        int code;
        std::size_t base;
        double remainder;
    };
    std::vector<Share> shares;
    std::size_t assigned = 0;
    for (const auto& [code, members] : groups) {
        const double quota = static_cast<double>(members.size()) * test_fraction;
        const auto base = static_cast<std::size_t>(std::floor(quota));
        shares.push_back({code, base, quota - static_cast<double>(base)});
        assigned += base;
    }
    std::vector<std::size_t> order(shares.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (shares[a].remainder != shares[b].remainder)
            return shares[a].remainder > shares[b].remainder;
        return shares[a].code < shares[b].code;
    });
    for (std::size_t oi = 0; assigned < total_test && oi < order.size(); ++oi) {
        Share& s = shares[order[oi]];
        if (s.base < groups[s.code].size()) {
            ++s.base;
            ++assigned;
        }
    }
    if (assigned != total_test)
        throw std::runtime_error("stratified_split could not satisfy the test quota");

    SplitIndices out;
    std::size_t si = 0;
    for (auto& [code, members] : groups) {
        Rng rng(derive_seed(seed, "split", code_stream(code)));
        rng.shuffle(members);
        const std::size_t t = shares[si++].base;
        for (std::size_t i = 0; i < members.size(); ++i)
            (i < t ? out.test : out.train).push_back(members[i]);
    }
    std::sort(out.train.begin(), out.train.end());
    std::sort(out.test.begin(), out.test.end());
    return out;
}

std::vector<std::vector<std::size_t>> kfold(std::size_t n, int k, std::uint64_t seed) {
    if (k < 2) throw std::invalid_argument("kfold needs k >= 2");
    if (static_cast<std::size_t>(k) > n) throw std::invalid_argument("kfold needs k <= n");
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    Rng rng(derive_seed(seed, "kfold"));
    rng.shuffle(idx);
    std::vector<std::vector<std::size_t>> folds(static_cast<std::size_t>(k));
    for (std::size_t i = 0; i < n; ++i) folds[i % k].push_back(idx[i]);
    for (auto& f : folds) std::sort(f.begin(), f.end());
    return folds;
}

std::vector<std::vector<std::size_t>> stratified_kfold(std::span<const int> strata, int k,
                                                       std::uint64_t seed) {
    if (k < 2) throw std::invalid_argument("stratified_kfold needs k >= 2");
    if (static_cast<std::size_t>(k) > strata.size())
        throw std::invalid_argument("stratified_kfold needs k <= n");
    auto groups = group_strata(strata);
    std::vector<std::vector<std::size_t>> folds(static_cast<std::size_t>(k));
    std::size_t pos = 0;  // running deal position keeps fold sizes within one
    for (auto& [code, members] : groups) {
        Rng rng(derive_seed(seed, "kfold", code_stream(code)));
        rng.shuffle(members);
        for (std::size_t m : members) folds[pos++ % k].push_back(m);
    }
    for (auto& f : folds) std::sort(f.begin(), f.end());
    return folds;
}

SearchResult grid_search(ModelKind kind, Task task, const HyperGrid& grid, const DataView& train,
                         int folds, std::uint64_t seed, int n_jobs) {
    if (!train.table) throw std::invalid_argument("grid_search needs a bound view");
    const std::size_t n = train.n();
    const std::size_t n_cand = grid.size();

    std::vector<std::vector<std::size_t>> fold_local;
    if (is_classification(task)) {
        std::vector<int> labels(n);
        for (std::size_t i = 0; i < n; ++i)
            labels[i] = static_cast<int>(train.label(i, task));
        fold_local = stratified_kfold(labels, folds, derive_seed(seed, "cv"));
    } else {
        fold_local = kfold(n, folds, derive_seed(seed, "cv"));
    }
    const auto n_folds = fold_local.size();

    // Table-row id lists per fold, built once and shared by all candidates.
    std::vector<std::vector<std::size_t>> val_rows(n_folds), fit_rows(n_folds);
    std::vector<char> in_fold(n);
    for (std::size_t f = 0; f < n_folds; ++f) {
        std::fill(in_fold.begin(), in_fold.end(), 0);
        for (std::size_t i : fold_local[f]) in_fold[i] = 1;
        for (std::size_t i = 0; i < n; ++i)
            (in_fold[i] ? val_rows[f] : fit_rows[f]).push_back(train.rows[i]);
    }

    SearchResult result;
    result.candidates.resize(n_cand);
    for (std::size_t ci = 0; ci < n_cand; ++ci)
        result.candidates[ci].params = grid.candidate(ci);

    const Metric metric = selection_metric(task);
    std::vector<double> scores(n_cand * n_folds, 0.0);
    std::vector<std::string> errors(n_cand * n_folds);
    std::vector<char> errored(n_cand * n_folds, 0);

    parallel_for(n_cand * n_folds, n_jobs, [&](std::size_t t) {
        const std::size_t ci = t / n_folds;
        const std::size_t fi = t % n_folds;
        try {
            DataView fold_view{train.table, fit_rows[fi], train.cols};
            const std::unique_ptr<Model> m =
                fit_model(kind, task, result.candidates[ci].params, fold_view,
                          derive_seed(seed, "grid", ci, fi), 1);
            scores[t] = score_model(*m, *train.table, val_rows[fi], metric);
        } catch (const std::exception& e) {
            errored[t] = 1;
            errors[t] = e.what();
        }
    });

    const bool maximize = metric_maximizes(metric);
    bool have_best = false;
    for (std::size_t ci = 0; ci < n_cand; ++ci) {
        SearchCandidate& cand = result.candidates[ci];
        double sum = 0.0, sumsq = 0.0;
        for (std::size_t fi = 0; fi < n_folds; ++fi) {
            const std::size_t t = ci * n_folds + fi;
            if (errored[t]) {
                if (!cand.failed) cand.error = errors[t];
                cand.failed = true;
                continue;
            }
            cand.fold_scores.push_back(scores[t]);
            sum += scores[t];
            sumsq += scores[t] * scores[t];
        }
        if (cand.failed) continue;
        const auto nf = static_cast<double>(n_folds);
        cand.mean_score = sum / nf;
        cand.std_score = std::sqrt(std::max(0.0, sumsq / nf - cand.mean_score * cand.mean_score));
        const bool better =
            !have_best || (maximize ? cand.mean_score > result.candidates[result.best_index].mean_score
                                    : cand.mean_score < result.candidates[result.best_index].mean_score);
        if (better) {
            result.best_index = ci;
            have_best = true;
        }
    }
    if (!have_best) {
        std::string why;
        for (const SearchCandidate& c : result.candidates)
            if (c.failed && why.empty()) why = c.error;
        throw std::runtime_error("every grid candidate failed; first error: " + why);
    }

    result.best_model = fit_model(kind, task, result.candidates[result.best_index].params, train,
                                  derive_seed(seed, "refit"), n_jobs);
    return result;
}

std::vector<ImportanceEntry> permutation_importance(const Model& m, const DataTable& table,
                                                    std::span<const std::size_t> rows,
                                                    Metric metric, int n_repeats,
                                                    std::uint64_t seed) {
    if (n_repeats < 1) throw std::invalid_argument("permutation importance needs repeats >= 1");
    if (rows.empty()) throw std::invalid_argument("permutation importance on zero rows");
    const std::vector<std::size_t> cols = m.resolve_columns(table);
    const double base = score_model(m, table, rows, metric);
    const bool maximize = metric_maximizes(metric);

    DataTable work = table;
    std::vector<ImportanceEntry> out(m.features.size());
    std::vector<double> vals(rows.size());
    for (std::size_t j = 0; j < m.features.size(); ++j) {
        const std::size_t col = cols[j];
        double sum = 0.0, sumsq = 0.0;
        for (int r = 0; r < n_repeats; ++r) {
            for (std::size_t i = 0; i < rows.size(); ++i) vals[i] = table.at(rows[i], col);
            Rng rng(derive_seed(seed, "perm", j, static_cast<std::uint64_t>(r)));
            rng.shuffle(vals);
            for (std::size_t i = 0; i < rows.size(); ++i)
                work.x[rows[i] * work.p + col] = vals[i];
            const double s = score_model(m, work, rows, metric);
            const double drop = maximize ? base - s : s - base;
            sum += drop;
            sumsq += drop * drop;
        }
        for (std::size_t i : rows) work.x[i * work.p + col] = table.at(i, col);
        const double mean = sum / n_repeats;
        out[j] = {m.features[j], mean,
                  std::sqrt(std::max(0.0, sumsq / n_repeats - mean * mean))};
    }
    std::stable_sort(out.begin(), out.end(), [](const ImportanceEntry& a, const ImportanceEntry& b) {
        return a.mean_drop > b.mean_drop;
    });
    return out;
}

void parallel_for(std::size_t count, int n_jobs, const std::function<void(std::size_t)>& fn) {
    if (count == 0) return;
    const std::size_t workers =
        std::min<std::size_t>(count, n_jobs < 1 ? 1 : static_cast<std::size_t>(n_jobs));
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;
    std::atomic<bool> stop{false};
    auto body = [&] {
        while (!stop.load(std::memory_order_relaxed)) {
            const std::size_t i = next.fetch_add(1);
            if (i >= count) return;
            try {
                fn(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
                stop.store(true);
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(body);
    for (std::thread& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);
}

}  // namespace fadbio
