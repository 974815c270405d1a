#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fadbio/data.hpp"

// Model zoo interface. Every trained model carries its task, its window
// length, its exact feature schema and the imputation medians, and can score
// any table that provides those columns by name. Serialization is a
// versioned, self-describing text format with shortest-round-trip numbers, so
// identical fits produce byte-identical files.

namespace fadbio {

enum class ModelKind { Baseline, Linear, RandomForest, GradientBoosting, SecondOrderBoosting };

const char* model_kind_name(ModelKind k);  // "baseline", "linear", "rf", "gb", "xgb"
std::optional<ModelKind> parse_model_kind(std::string_view s);

// One hyperparameter value: none, integer, real or symbol.
struct ParamValue {
    enum class Kind { None, Int, Real, Str };
    Kind kind = Kind::None;
    std::int64_t i = 0;
    double d = 0.0;
    std::string s;

    static ParamValue none() { return {}; }
    static ParamValue of(std::int64_t v) { return {Kind::Int, v, 0.0, {}}; }
    static ParamValue of(double v) { return {Kind::Real, 0, v, {}}; }
    static ParamValue of(std::string v) { return {Kind::Str, 0, 0.0, std::move(v)}; }
    static ParamValue parse(std::string_view text);  // "none"/int/real/symbol

    double as_real() const { return kind == Kind::Int ? static_cast<double>(i) : d; }
    std::string to_string() const;
    friend bool operator==(const ParamValue&, const ParamValue&) = default;
};

using ParamSet = std::map<std::string, ParamValue>;
std::string param_set_to_string(const ParamSet& p);

// Ordered cartesian hyperparameter grid; the last axis varies fastest.
struct HyperGrid {
    std::vector<std::pair<std::string, std::vector<ParamValue>>> axes;

    std::size_t size() const;
    ParamSet candidate(std::size_t index) const;
};

class Model {
public:
    virtual ~Model() = default;

    ModelKind kind = ModelKind::Baseline;
    Task task = Task::Binary;
    int w_hours = 0;
    std::vector<std::string> features;
    TrainMedians medians;  // carried for scoring raw inputs

    // Scores for each row, row-major with score_width() values per row:
    // regression -> the prediction; binary -> probability (or a monotone
    // score) of the positive class; ternary -> three class probabilities.
    virtual std::vector<double> predict_scores(const DataTable& table,
                                               std::span<const std::size_t> rows) const = 0;
    int score_width() const;

    // Class decisions for classification tasks (0-based labels).
    virtual std::vector<int> predict_class(const DataTable& table,
                                           std::span<const std::size_t> rows) const;

    // Regression predictions (task must be a regression task).
    std::vector<double> predict_value(const DataTable& table,
                                      std::span<const std::size_t> rows) const;

    // Maps this model's features onto table columns; throws std::runtime_error
    // naming every missing column.
    std::vector<std::size_t> resolve_columns(const DataTable& table) const;

    virtual void save_body(std::string& out) const = 0;
};

// Fits a model of the given kind on the view's rows and columns. `params` is
// interpreted per kind; linear models run their internal penalty search and
// ignore it. Throws on invalid parameters or non-converging solvers.
std::unique_ptr<Model> fit_model(ModelKind kind, Task task, const ParamSet& params,
                                 const DataView& train, std::uint64_t seed, int n_jobs = 1);

// Appendix-style default hyperparameter grids per model kind and task family.
HyperGrid default_grid(ModelKind kind, Task task);

std::string save_model(const Model& m);                      // full text form
void save_model_file(const Model& m, const std::string& path);
std::unique_ptr<Model> load_model(const std::string& text);  // throws on malformed input
std::unique_ptr<Model> load_model_file(const std::string& path);

// Param helpers shared by the model implementations.
std::int64_t param_int(const ParamSet& p, const std::string& name, std::int64_t fallback);
double param_real(const ParamSet& p, const std::string& name, double fallback);
std::optional<std::int64_t> param_opt_int(const ParamSet& p, const std::string& name);
std::optional<double> param_opt_real(const ParamSet& p, const std::string& name);
std::string param_str(const ParamSet& p, const std::string& name, const std::string& fallback);

}  // namespace fadbio
