// Command-line frontend: synthetic world generation, dataset construction,
// model training with exhaustive cross-validated search, evaluation reports
// and batch prediction.
//
// Exit codes: 0 success, 2 unreadable/invalid input, 3 training or generation
// failure, 4 model/dataset schema mismatch.

#include <chrono>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "fadbio/csv.hpp"
#include "fadbio/data.hpp"
#include "fadbio/eval.hpp"
#include "fadbio/ingest.hpp"
#include "fadbio/learn/model.hpp"
#include "fadbio/pipeline.hpp"
#include "fadbio/synth.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace fadbio;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInput = 2;
constexpr int kExitTraining = 3;
constexpr int kExitSchema = 4;

struct CliError {
    int code;
    std::string message;
};

[[noreturn]] void fail(int code, const std::string& message) {
    throw CliError{code, message};
}

std::int64_t now_ms() {
    return std::chrono::duration_cast<std::chrono::milliseconds>(
               std::chrono::steady_clock::now().time_since_epoch())
        .count();
}

// Writes a run manifest next to the other outputs.
void write_manifest(const std::string& dir, const std::string& command,
                    const std::vector<std::string>& argv,
                    const std::map<std::string, std::string>& inputs,
                    const std::vector<std::string>& outputs, std::uint64_t seed,
                    std::int64_t elapsed_ms, const json& extra) {
    json m;
    m["command"] = command;
    m["argv"] = argv;
    m["seed"] = seed;
    m["elapsed_ms"] = elapsed_ms;
    m["version"] = "0.1.0";
    json in = json::object();
    for (const auto& [name, path] : inputs) {
        try {
            in[name] = {{"path", path}, {"digest", file_digest(path)}};
        } catch (const std::exception&) {
            in[name] = {{"path", path}};
        }
    }
    m["inputs"] = in;
    m["outputs"] = outputs;
    for (const auto& [k, v] : extra.items()) m[k] = v;
    atomic_write_file((fs::path(dir) / "manifest.json").string(), m.dump(2) + "\n");
}

// Monospace table with left-aligned first column, right-aligned rest.
std::string render_table(const std::vector<std::vector<std::string>>& rows) {
    if (rows.empty()) return "";
    std::vector<std::size_t> width;
    for (const auto& r : rows) {
        if (width.size() < r.size()) width.resize(r.size(), 0);
        for (std::size_t c = 0; c < r.size(); ++c) width[c] = std::max(width[c], r[c].size());
    }
    std::string out;
    for (const auto& r : rows) {
        for (std::size_t c = 0; c < r.size(); ++c) {
            const std::string& cell = r[c];
            if (c == 0) {
                out += cell;
                out.append(width[c] - cell.size(), ' ');
            } else {
                out += "  ";
                out.append(width[c] - cell.size(), ' ');
                out += cell;
            }
        }
        out += '\n';
    }
    return out;
}

std::string fmt(double v) { return format_double(v); }

// ---- grid files ----------------------------------------------------------
//
//   [rf]
//   n_estimators = 100, 200
//   max_depth = none, 4
//
// A file without section headers applies to whichever model is being trained.
HyperGrid parse_grid_file(const std::string& path, ModelKind kind) {
    const std::string text = read_text_file(path);
    HyperGrid grid;
    std::string section;
    bool any_section = false;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t eol = text.find('\n', pos);
        if (eol == std::string::npos) eol = text.size();
        std::string line = text.substr(pos, eol - pos);
        pos = eol + 1;
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        const auto first = line.find_first_not_of(" \t");
        if (first == std::string::npos) continue;
        const auto last = line.find_last_not_of(" \t");
        line = line.substr(first, last - first + 1);
        if (line[0] == '#') continue;
        if (line.front() == '[' && line.back() == ']') {
            section = line.substr(1, line.size() - 2);
            any_section = true;
            if (!parse_model_kind(section))
                fail(kExitInput, path + ":" + std::to_string(line_no) +
                                     ": unknown model section [" + section + "]");
            continue;
        }
        if (any_section && section != model_kind_name(kind)) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            fail(kExitInput,
                 path + ":" + std::to_string(line_no) + ": expected 'name = v1, v2, ...'");
        std::string name = line.substr(0, eq);
        name.erase(name.find_last_not_of(" \t") + 1);
        if (name.empty())
            fail(kExitInput, path + ":" + std::to_string(line_no) + ": empty parameter name");
        std::vector<ParamValue> values;
        std::string rest = line.substr(eq + 1);
        std::size_t vp = 0;
        while (vp <= rest.size()) {
            std::size_t comma = rest.find(',', vp);
            if (comma == std::string::npos) comma = rest.size();
            std::string tok = rest.substr(vp, comma - vp);
            vp = comma + 1;
            const auto f = tok.find_first_not_of(" \t");
            if (f == std::string::npos)
                fail(kExitInput, path + ":" + std::to_string(line_no) + ": empty value");
            const auto l = tok.find_last_not_of(" \t");
            values.push_back(ParamValue::parse(tok.substr(f, l - f + 1)));
            if (comma == rest.size()) break;
        }
        if (values.empty())
            fail(kExitInput, path + ":" + std::to_string(line_no) + ": no values");
        grid.axes.emplace_back(name, std::move(values));
    }
    return grid;
}

// ---- shared loading helpers ------------------------------------------------

DataTable load_dataset(const std::string& path) {
    try {
        return dataset_from_csv(path);
    } catch (const std::exception& e) {
        fail(kExitInput, e.what());
    }
}

std::unique_ptr<Model> load_model_checked(const std::string& path) {
    try {
        return load_model_file(path);
    } catch (const std::exception& e) {
        fail(kExitInput, std::string(e.what()) + ": " + path);
    }
}

// Rows of the table selected by a --split argument.
std::vector<std::size_t> rows_for_split(const DataTable& t, const std::string& split) {
    if (split == "all") return t.all_rows();
    if (split == "train") return t.rows_with_split(Split::Train);
    if (split == "test") return t.rows_with_split(Split::Test);
    fail(kExitInput, "unknown split: " + split);
}

// Feature/table compatibility gate shared by eval and predict.
void check_model_table(const Model& m, const DataTable& t) {
    if (m.w_hours != t.w_hours)
        fail(kExitSchema, "model was trained on " + std::to_string(m.w_hours) +
                              " h windows but the dataset holds " +
                              std::to_string(t.w_hours) + " h windows");
    try {
        m.resolve_columns(t);
    } catch (const std::exception& e) {
        fail(kExitSchema, e.what());
    }
}

// ---- synth -----------------------------------------------------------------

struct SynthArgs {
    SynthConfig config;
    std::string out;
    std::string start = "2019-01-10";
    double all_rules = -1.0;
};

int cmd_synth(const SynthArgs& a, const std::vector<std::string>& argv) {
    const std::int64_t t0 = now_ms();
    SynthConfig cfg = a.config;
    if (const std::optional<Date> d = parse_date(a.start))
        cfg.start_date = *d;
    else
        fail(kExitInput, "bad --start date: " + a.start);
    if (a.all_rules >= 0.0) {
        cfg.rate_id_mismatch = cfg.rate_no_sunset = cfg.rate_coverage = cfg.rate_on_land =
            cfg.rate_shallow = cfg.rate_speeding = a.all_rules;
    }

    SynthWorld world;
    try {
        world = generate(cfg);
    } catch (const std::exception& e) {
        fail(kExitInput, e.what());
    }
    write_world(world, a.out);

    std::vector<std::vector<std::string>> rows;
    rows.push_back({"events", std::to_string(world.stats.n_events)});
    rows.push_back({"echo rows", std::to_string(world.stats.n_echo_rows)});
    rows.push_back({"median catch (t)", fmt(world.stats.median_catch_t)});
    rows.push_back({"catch >= 10 t", fmt(world.stats.positive_fraction)});
    rows.push_back({"catch >= 30 t", fmt(world.stats.high_fraction)});
    rows.push_back({"censored fraction", fmt(world.stats.censored_fraction)});
    rows.push_back({"censored expected", fmt(world.stats.censored_expected)});
    rows.push_back({"day mean latent (t)", fmt(world.stats.day_mean_latent)});
    rows.push_back({"night mean latent (t)", fmt(world.stats.night_mean_latent)});
    for (int r = 0; r < kDropRules; ++r)
        if (world.injected[static_cast<std::size_t>(r)] > 0)
            rows.push_back({std::string("injected ") + drop_rule_name(static_cast<DropRule>(r)),
                            std::to_string(world.injected[static_cast<std::size_t>(r)])});
    std::fputs(render_table(rows).c_str(), stdout);

    json extra;
    extra["stats"] = {{"median_catch_t", world.stats.median_catch_t},
                      {"positive_fraction", world.stats.positive_fraction},
                      {"censored_fraction", world.stats.censored_fraction},
                      {"censored_expected", world.stats.censored_expected}};
    write_manifest(a.out, "synth", argv, {},
                   {"logbook.csv", "echo.csv", "ocean.csv", "bathy.csv", "ground_truth.csv",
                    "ground_truth_events.csv"},
                   cfg.seed, now_ms() - t0, extra);

    if (!world.stats.ok()) {
        for (const std::string& f : world.stats.failures)
            std::fprintf(stderr, "validation: %s\n", f.c_str());
        return kExitTraining;
    }
    return kExitOk;
}

// ---- build -----------------------------------------------------------------

struct BuildArgs {
    std::string logbook, echo, ocean, bathy, out;
    int window = 72;
    double test_fraction = 0.25;
    std::uint64_t seed = 1;
};

int cmd_build(const BuildArgs& a, const std::vector<std::string>& argv) {
    const std::int64_t t0 = now_ms();
    LogbookResult logbook;
    EchoResult echo;
    OceanGrid ocean;
    BathyGrid bathy;
    try {
        logbook = read_logbook(a.logbook);
        echo = read_echograms(a.echo);
        ocean = read_ocean_grid(a.ocean);
        bathy = read_bathy_grid(a.bathy);
    } catch (const std::exception& e) {
        fail(kExitInput, e.what());
    }
    for (const RowReject& r : logbook.rejects)
        std::fprintf(stderr, "%s:%zu: %s\n", a.logbook.c_str(), r.line_no, r.reason.c_str());
    for (const RowReject& r : echo.rejects)
        std::fprintf(stderr, "%s:%zu: %s\n", a.echo.c_str(), r.line_no, r.reason.c_str());

    const BuildOutput built =
        build_dataset(logbook.events, echo.records, ocean, bathy, a.window);

    // Split stratified on event kind and, for sets, the catch band, so every
    // task sees representative train and test shares.
    std::vector<int> strata(built.examples.size());
    for (std::size_t i = 0; i < built.examples.size(); ++i) {
        const LabeledExample& ex = built.examples[i];
        strata[i] = ex.kind == EventKind::Deployment
                        ? 0
                        : 1 + static_cast<int>(label_value(ex.y, Task::Ternary));
    }
    SplitIndices split;
    try {
        split = stratified_split(strata, a.test_fraction, a.seed);
    } catch (const std::exception& e) {
        fail(kExitInput, e.what());
    }
    std::vector<Split> tags(built.examples.size(), Split::Train);
    for (std::size_t i : split.test) tags[i] = Split::Test;

    const TrainMedians medians = compute_medians(built.examples, split.train, a.window);
    const DataTable table = to_table(built.examples, tags, medians, a.window);

    fs::create_directories(a.out);
    const std::string dataset_path = (fs::path(a.out) / "dataset.csv").string();
    const std::string medians_path = (fs::path(a.out) / "medians.csv").string();
    atomic_write_file(dataset_path, dataset_to_csv(table));
    atomic_write_file(medians_path, medians_to_csv(medians));

    std::vector<std::vector<std::string>> rows;
    rows.push_back({"rule", "dropped"});
    for (int r = 0; r < kDropRules; ++r)
        rows.push_back({drop_rule_name(static_cast<DropRule>(r)),
                        std::to_string(built.report.dropped_by_rule[static_cast<std::size_t>(r)])});
    rows.push_back({"total dropped", std::to_string(built.report.total_dropped())});
    rows.push_back({"survivors", std::to_string(built.report.survivors)});
    rows.push_back({"train rows", std::to_string(split.train.size())});
    rows.push_back({"test rows", std::to_string(split.test.size())});
    const std::string table_txt = render_table(rows);
    std::fputs(table_txt.c_str(), stdout);

    std::string report_csv = "rule,dropped\n";
    for (int r = 0; r < kDropRules; ++r)
        report_csv += std::string(drop_rule_name(static_cast<DropRule>(r))) + "," +
                      std::to_string(built.report.dropped_by_rule[static_cast<std::size_t>(r)]) +
                      "\n";
    report_csv += "survivors," + std::to_string(built.report.survivors) + "\n";
    atomic_write_file((fs::path(a.out) / "clean_report.csv").string(), report_csv);
    atomic_write_file((fs::path(a.out) / "clean_report.txt").string(), table_txt);

    json extra;
    extra["window_hours"] = a.window;
    extra["survivors"] = built.report.survivors;
    extra["rejected_rows"] = logbook.rejects.size() + echo.rejects.size();
    write_manifest(a.out, "build", argv,
                   {{"logbook", a.logbook},
                    {"echo", a.echo},
                    {"ocean", a.ocean},
                    {"bathy", a.bathy}},
                   {"dataset.csv", "medians.csv", "clean_report.csv", "clean_report.txt"},
                   a.seed, now_ms() - t0, extra);
    return kExitOk;
}

// ---- train -----------------------------------------------------------------

struct TrainArgs {
    std::string dataset, medians, grid_file, out;
    std::string task = "binary";
    std::string model = "gb";
    std::string features = "all";
    std::uint64_t seed = 1;
    int folds = 5;
    int jobs = 1;
};

int cmd_train(const TrainArgs& a, const std::vector<std::string>& argv) {
    const std::int64_t t0 = now_ms();
    const std::optional<Task> task = parse_task(a.task);
    if (!task) fail(kExitInput, "unknown task: " + a.task);
    const std::optional<ModelKind> kind = parse_model_kind(a.model);
    if (!kind) fail(kExitInput, "unknown model: " + a.model);
    const std::optional<FeatureLevel> level = parse_feature_level(a.features);
    if (!level) fail(kExitInput, "unknown feature level: " + a.features);

    const DataTable table = load_dataset(a.dataset);
    TrainMedians medians;
    if (!a.medians.empty()) {
        try {
            medians = medians_from_csv(a.medians);
        } catch (const std::exception& e) {
            fail(kExitInput, e.what());
        }
    }

    const std::vector<std::size_t> train_rows = table.rows_with_split(Split::Train);
    if (train_rows.empty()) fail(kExitInput, "dataset has no training rows");
    DataView view;
    try {
        view = make_view(table, train_rows, *level);
    } catch (const std::exception& e) {
        fail(kExitInput, e.what());
    }

    HyperGrid grid =
        a.grid_file.empty() ? default_grid(*kind, *task) : parse_grid_file(a.grid_file, *kind);
    std::printf("search space: %zu candidate(s) x %d fold(s)\n", grid.size(), a.folds);

    SearchResult result;
    try {
        result = grid_search(*kind, *task, grid, view, a.folds, a.seed, a.jobs);
    } catch (const std::exception& e) {
        fail(kExitTraining, e.what());
    }
    result.best_model->medians = medians;

    fs::create_directories(a.out);
    const std::string model_path = (fs::path(a.out) / "model.txt").string();
    save_model_file(*result.best_model, model_path);

    std::string search_csv = "candidate,params,mean_score,std_score,failed,error\n";
    for (std::size_t i = 0; i < result.candidates.size(); ++i) {
        const SearchCandidate& c = result.candidates[i];
        std::string err = c.error;
        for (char& ch : err)
            if (ch == ',' || ch == '\n') ch = ';';
        search_csv += std::to_string(i) + "," + param_set_to_string(c.params) + "," +
                      (c.failed ? "" : fmt(c.mean_score)) + "," +
                      (c.failed ? "" : fmt(c.std_score)) + "," + (c.failed ? "1" : "0") + "," +
                      err + "\n";
    }
    atomic_write_file((fs::path(a.out) / "search.csv").string(), search_csv);

    const SearchCandidate& best = result.candidates[result.best_index];
    const Metric metric = selection_metric(*task);
    std::printf("best candidate #%zu: %s\n", result.best_index,
                param_set_to_string(best.params).c_str());
    std::printf("cv %s: %s +/- %s\n", metric_name(metric), fmt(best.mean_score).c_str(),
                fmt(best.std_score).c_str());

    json extra;
    extra["task"] = a.task;
    extra["model"] = a.model;
    extra["features"] = a.features;
    extra["candidates"] = grid.size();
    extra["folds"] = a.folds;
    extra["best_index"] = result.best_index;
    extra["best_params"] = param_set_to_string(best.params);
    extra["cv_metric"] = metric_name(metric);
    extra["cv_mean"] = best.mean_score;
    extra["cv_std"] = best.std_score;
    std::map<std::string, std::string> inputs{{"dataset", a.dataset}};
    if (!a.medians.empty()) inputs["medians"] = a.medians;
    if (!a.grid_file.empty()) inputs["grid"] = a.grid_file;
    write_manifest(a.out, "train", argv, inputs, {"model.txt", "search.csv"}, a.seed,
                   now_ms() - t0, extra);
    return kExitOk;
}

// ---- eval ------------------------------------------------------------------

struct EvalArgs {
    std::string model, dataset, report;
    std::string split = "test";
    bool importance = false;
    int repeats = 10;
    std::uint64_t seed = 1;
};

int cmd_eval(const EvalArgs& a, const std::vector<std::string>& argv) {
    const std::int64_t t0 = now_ms();
    const std::unique_ptr<Model> model = load_model_checked(a.model);
    const DataTable table = load_dataset(a.dataset);
    check_model_table(*model, table);
    const std::vector<std::size_t> rows = rows_for_split(table, a.split);
    if (rows.empty()) fail(kExitInput, "no rows in split: " + a.split);

    fs::create_directories(a.report);
    std::vector<std::string> outputs;
    std::vector<std::vector<std::string>> lines;
    lines.push_back({"model", model_kind_name(model->kind)});
    lines.push_back({"task", task_name(model->task)});
    lines.push_back({"split", a.split});
    lines.push_back({"rows", std::to_string(rows.size())});
    std::string metrics_csv = "metric,value\n";
    auto add_metric = [&](const std::string& name, double v) {
        lines.push_back({name, fmt(v)});
        metrics_csv += name + "," + fmt(v) + "\n";
    };

    if (is_classification(model->task)) {
        const int k = n_classes(model->task);
        std::vector<int> obs(rows.size());
        for (std::size_t i = 0; i < rows.size(); ++i)
            obs[i] = static_cast<int>(label_value(table.y[rows[i]], model->task));
        const std::vector<int> pred = model->predict_class(table, rows);
        const ConfusionMatrix cm = ConfusionMatrix::from(obs, pred, k);
        try {
            add_metric("auc", score_model(*model, table, rows, Metric::RocAuc));
        } catch (const std::exception& e) {
            std::fprintf(stderr, "auc unavailable: %s\n", e.what());
        }
        if (model->task == Task::Binary)
            add_metric("f1", f1_binary(cm));
        else
            add_metric("weighted_f1", f1_weighted(cm));
        double correct = 0;
        for (int c = 0; c < k; ++c) correct += static_cast<double>(cm.at(c, c));
        add_metric("accuracy", correct / static_cast<double>(rows.size()));

        std::string cm_csv = "obs\\pred";
        for (int c = 0; c < k; ++c) cm_csv += ",pred_" + std::to_string(c);
        cm_csv += "\n";
        for (int o = 0; o < k; ++o) {
            cm_csv += "obs_" + std::to_string(o);
            for (int c = 0; c < k; ++c) cm_csv += "," + std::to_string(cm.at(o, c));
            cm_csv += "\n";
        }
        atomic_write_file((fs::path(a.report) / "confusion.csv").string(), cm_csv);
        outputs.push_back("confusion.csv");
    } else {
        add_metric("mae", score_model(*model, table, rows, Metric::Mae));
        // Decomposition by event kind: sets carry tonnage, deployments are 0.
        std::string kind_csv = "kind,rows,mae\n";
        for (EventKind kind : {EventKind::Set, EventKind::Deployment}) {
            std::vector<std::size_t> sub;
            for (std::size_t r : rows)
                if (table.kind[r] == kind) sub.push_back(r);
            const char* kind_name = kind == EventKind::Set ? "sets" : "deployments";
            if (sub.empty()) {
                kind_csv += std::string(kind_name) + ",0,\n";
                continue;
            }
            const double mae = score_model(*model, table, sub, Metric::Mae);
            add_metric(std::string("mae_") + kind_name, mae);
            kind_csv += std::string(kind_name) + "," + std::to_string(sub.size()) + "," +
                        fmt(mae) + "\n";
        }
        atomic_write_file((fs::path(a.report) / "per_kind_mae.csv").string(), kind_csv);
        outputs.push_back("per_kind_mae.csv");
    }

    if (a.importance) {
        const Metric metric = selection_metric(model->task);
        const std::vector<ImportanceEntry> imp =
            permutation_importance(*model, table, rows, metric, a.repeats, a.seed);
        std::string imp_csv = "feature,mean_drop,std_drop\n";
        for (const ImportanceEntry& e : imp)
            imp_csv += e.feature + "," + fmt(e.mean_drop) + "," + fmt(e.std_drop) + "\n";
        atomic_write_file((fs::path(a.report) / "importance.csv").string(), imp_csv);
        outputs.push_back("importance.csv");
        std::vector<std::vector<std::string>> top;
        top.push_back({"feature", std::string("drop(") + metric_name(metric) + ")"});
        for (std::size_t i = 0; i < imp.size() && i < 10; ++i)
            top.push_back({imp[i].feature, fmt(imp[i].mean_drop)});
        std::fputs(render_table(top).c_str(), stdout);
    }

    const std::string lines_txt = render_table(lines);
    std::fputs(lines_txt.c_str(), stdout);
    atomic_write_file((fs::path(a.report) / "metrics.csv").string(), metrics_csv);
    atomic_write_file((fs::path(a.report) / "metrics.txt").string(), lines_txt);
    outputs.push_back("metrics.csv");
    outputs.push_back("metrics.txt");

    write_manifest(a.report, "eval", argv, {{"model", a.model}, {"dataset", a.dataset}},
                   outputs, a.seed, now_ms() - t0, json::object());
    return kExitOk;
}

// ---- predict ---------------------------------------------------------------

struct PredictArgs {
    std::string model, input, out;
};

int cmd_predict(const PredictArgs& a, const std::vector<std::string>& argv) {
    const std::int64_t t0 = now_ms();
    const std::unique_ptr<Model> model = load_model_checked(a.model);
    const DataTable table = load_dataset(a.input);
    check_model_table(*model, table);
    const std::vector<std::size_t> rows = table.all_rows();
    if (rows.empty()) fail(kExitInput, "input has no rows");

    std::string out_csv;
    if (model->task == Task::Binary) {
        const std::vector<double> s = model->predict_scores(table, rows);
        const std::vector<int> cls = model->predict_class(table, rows);
        out_csv = "event_id,score,class\n";
        for (std::size_t i = 0; i < rows.size(); ++i)
            out_csv += table.event_id[rows[i]] + "," + fmt(s[i]) + "," +
                       std::to_string(cls[i]) + "\n";
    } else if (model->task == Task::Ternary) {
        const std::vector<double> s = model->predict_scores(table, rows);
        const std::vector<int> cls = model->predict_class(table, rows);
        out_csv = "event_id,p0,p1,p2,class\n";
        for (std::size_t i = 0; i < rows.size(); ++i)
            out_csv += table.event_id[rows[i]] + "," + fmt(s[i * 3]) + "," +
                       fmt(s[i * 3 + 1]) + "," + fmt(s[i * 3 + 2]) + "," +
                       std::to_string(cls[i]) + "\n";
    } else {
        const std::vector<double> v = model->predict_value(table, rows);
        out_csv = "event_id,value\n";
        for (std::size_t i = 0; i < rows.size(); ++i)
            out_csv += table.event_id[rows[i]] + "," + fmt(v[i]) + "\n";
    }
    atomic_write_file(a.out, out_csv);

    const fs::path out_dir = fs::path(a.out).has_parent_path()
                                 ? fs::path(a.out).parent_path()
                                 : fs::path(".");
    write_manifest(out_dir.string(), "predict", argv,
                   {{"model", a.model}, {"input", a.input}},
                   {fs::path(a.out).filename().string()}, 0, now_ms() - t0, json::object());
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"dFAD biomass pipeline: synthetic data, dataset construction, "
                 "training, evaluation and prediction"};
    app.require_subcommand(1);
    std::vector<std::string> raw_args(argv, argv + argc);

    SynthArgs sa;
    CLI::App* synth = app.add_subcommand("synth", "generate a synthetic fleet");
    synth->add_option("--out", sa.out, "output directory")->required();
    synth->add_option("--seed", sa.config.seed, "random seed");
    synth->add_option("--buoys", sa.config.n_buoys, "fleet size");
    synth->add_option("--days", sa.config.days, "world length in days");
    synth->add_option("--start", sa.start, "first calendar day (YYYY-MM-DD)");
    synth->add_option("--coupling", sa.config.ocean_coupling,
                      "ocean coupling strength (0 = independent)");
    synth->add_option("--bias", sa.config.set_bias, "set-day selection bias exponent");
    synth->add_option("--median-catch", sa.config.k_median_t, "median carrying capacity, t");
    synth->add_option("--violations", sa.all_rules,
                      "shorthand: inject this fraction for every rule");
    synth->add_option("--rate-id-mismatch", sa.config.rate_id_mismatch, "ghost-id fraction");
    synth->add_option("--rate-no-sunset", sa.config.rate_no_sunset, "polar-event fraction");
    synth->add_option("--rate-coverage", sa.config.rate_coverage, "blackout fraction");
    synth->add_option("--rate-on-land", sa.config.rate_on_land, "island-event fraction");
    synth->add_option("--rate-shallow", sa.config.rate_shallow, "shoal-record fraction");
    synth->add_option("--rate-speeding", sa.config.rate_speeding, "jump-record fraction");

    BuildArgs ba;
    CLI::App* build = app.add_subcommand("build", "construct a labeled dataset");
    build->add_option("--logbook", ba.logbook, "logbook.csv")->required();
    build->add_option("--echo", ba.echo, "echo.csv")->required();
    build->add_option("--ocean", ba.ocean, "ocean.csv")->required();
    build->add_option("--bathy", ba.bathy, "bathy.csv")->required();
    build->add_option("--window", ba.window, "window length in hours")
        ->check(CLI::IsMember({24, 48, 72}));
    build->add_option("--out", ba.out, "output directory")->required();
    build->add_option("--test-fraction", ba.test_fraction, "held-out fraction");
    build->add_option("--seed", ba.seed, "split seed");

    TrainArgs ta;
    CLI::App* train = app.add_subcommand("train", "grid-search and fit one model");
    train->add_option("--dataset", ta.dataset, "dataset.csv from build")->required();
    train->add_option("--medians", ta.medians, "medians.csv from build");
    train->add_option("--task", ta.task, "binary | ternary | regression | regression100");
    train->add_option("--model", ta.model, "baseline | linear | rf | gb | xgb");
    train->add_option("--features", ta.features, "echo | echo_ocean | all");
    train->add_option("--grid", ta.grid_file, "hyperparameter grid file");
    train->add_option("--seed", ta.seed, "search seed");
    train->add_option("--folds", ta.folds, "cross-validation folds")
        ->check(CLI::Range(2, 20));
    train->add_option("--jobs", ta.jobs, "worker threads")->check(CLI::Range(1, 256));
    train->add_option("--out", ta.out, "output directory")->required();

    EvalArgs ea;
    CLI::App* eval = app.add_subcommand("eval", "evaluate a saved model");
    eval->add_option("--model", ea.model, "model.txt")->required();
    eval->add_option("--dataset", ea.dataset, "dataset.csv")->required();
    eval->add_option("--split", ea.split, "train | test | all");
    eval->add_option("--report", ea.report, "report directory")->required();
    eval->add_flag("--importance", ea.importance, "permutation importance");
    eval->add_option("--repeats", ea.repeats, "importance repeats")->check(CLI::Range(1, 100));
    eval->add_option("--seed", ea.seed, "importance seed");

    PredictArgs pa;
    CLI::App* predict = app.add_subcommand("predict", "score a dataset with a saved model");
    predict->add_option("--model", pa.model, "model.txt")->required();
    predict->add_option("--input", pa.input, "dataset-format csv")->required();
    predict->add_option("--out", pa.out, "predictions csv")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help
        app.exit(e);
        return kExitInput;
    }

    try {
        if (synth->parsed()) return cmd_synth(sa, raw_args);
        if (build->parsed()) return cmd_build(ba, raw_args);
        if (train->parsed()) return cmd_train(ta, raw_args);
        if (eval->parsed()) return cmd_eval(ea, raw_args);
        if (predict->parsed()) return cmd_predict(pa, raw_args);
    } catch (const CliError& e) {
        std::fprintf(stderr, "error: %s\n", e.message.c_str());
        return e.code;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitInput;
    }
    return kExitInput;
}
