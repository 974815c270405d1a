#include "fadbio/data.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "fadbio/csv.hpp"

namespace fadbio {

std::size_t DataTable::column_index(std::string_view name) const {
    for (std::size_t j = 0; j < feature_names.size(); ++j) {
        if (feature_names[j] == name) return j;
    }
    return kNoColumn;
}

std::vector<std::size_t> DataTable::rows_with_split(Split s) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < n; ++i) {
        if (split[i] == s) out.push_back(i);
    }
    return out;
}

std::vector<std::size_t> DataTable::all_rows() const {
    std::vector<std::size_t> out(n);
    std::iota(out.begin(), out.end(), 0);
    return out;
}

std::vector<std::string> DataView::column_names() const {
    std::vector<std::string> out;
    out.reserve(cols.size());
    for (std::size_t j : cols) out.push_back(table->feature_names[j]);
    return out;
}

DataView make_view(const DataTable& table, const std::vector<std::size_t>& rows,
                   const std::vector<std::string>& columns) {
    DataView v;
    v.table = &table;
    v.rows = rows;
    v.cols.reserve(columns.size());
    std::string missing;
    for (const std::string& name : columns) {
        const std::size_t j = table.column_index(name);
        if (j == kNoColumn) {
            if (!missing.empty()) missing += ", ";
            missing += name;
        } else {
            v.cols.push_back(j);
        }
    }
    if (!missing.empty()) {
        throw std::runtime_error("dataset is missing feature columns: " + missing);
    }
    return v;
}

DataView make_view(const DataTable& table, const std::vector<std::size_t>& rows,
                   FeatureLevel level) {
    return make_view(table, rows, feature_names(level, table.w_hours));
}

DataTable to_table(const std::vector<LabeledExample>& examples,
                   const std::vector<Split>& split, const TrainMedians& medians,
                   int w_hours) {
    DataTable t;
    t.feature_names = feature_names(FeatureLevel::All, w_hours);
    t.n = examples.size();
    t.p = t.feature_names.size();
    t.w_hours = w_hours;
    t.x.reserve(t.n * t.p);
    t.split = split;

    for (const LabeledExample& ex : examples) {
        const std::vector<double> row = assemble(ex, FeatureLevel::All, w_hours, medians);
        t.x.insert(t.x.end(), row.begin(), row.end());
        t.y.push_back(ex.y);
        t.kind.push_back(ex.kind);
        t.event_id.push_back(ex.event_id);
        double cell_sum = 0.0;
        for (const auto& col : ex.window.cols) {
            if (col) cell_sum += col->layer_sum();
        }
        t.window_sum.push_back(cell_sum);
    }
    return t;
}

std::string dataset_to_csv(const DataTable& table) {
    std::string out;
    out.reserve(table.n * table.p * 8 + 256);
    out += "event_id,y,kind,split,Win.Sum";
    for (const std::string& name : table.feature_names) {
        out += ',';
        out += name;
    }
    out += '\n';
    for (std::size_t i = 0; i < table.n; ++i) {
        out += table.event_id[i];
        out += ',';
        out += format_double(table.y[i]);
        out += ',';
        out += table.kind[i] == EventKind::Set ? "set" : "deploy";
        out += ',';
        out += table.split[i] == Split::Train ? "train" : "test";
        out += ',';
        out += format_double(table.window_sum[i]);
        for (std::size_t j = 0; j < table.p; ++j) {
            out += ',';
            out += format_double(table.at(i, j));
        }
        out += '\n';
    }
    return out;
}

DataTable dataset_from_csv(const std::string& path) {
    const CsvTable csv = read_csv(path);
    static constexpr const char* kFixed[] = {"event_id", "y", "kind", "split", "Win.Sum"};
    constexpr std::size_t kFixedCount = 5;
    if (csv.header.size() < kFixedCount) {
        throw std::runtime_error(path + ": not a dataset file (too few columns)");
    }
    for (std::size_t i = 0; i < kFixedCount; ++i) {
        if (csv.header[i] != kFixed[i]) {
            throw std::runtime_error(path + ": expected column '" + kFixed[i] +
                                     "' at position " + std::to_string(i + 1));
        }
    }

    DataTable t;
    t.p = csv.header.size() - kFixedCount;
    for (std::size_t j = 0; j < t.p; ++j) {
        t.feature_names.emplace_back(csv.header[kFixedCount + j]);
    }
    // Window length is implied by the hour-aggregate column count.
    for (const std::string& name : t.feature_names) {
        if (name.rfind("Agg.H", 0) == 0) t.w_hours += 1;
    }

    t.n = csv.rows.size();
    t.x.reserve(t.n * t.p);
    for (std::size_t r = 0; r < csv.rows.size(); ++r) {
        const auto& f = csv.rows[r];
        const std::string where = path + ':' + std::to_string(csv.line_numbers[r]);
        if (f.size() != csv.header.size()) {
            throw std::runtime_error(where + ": wrong field count");
        }
        t.event_id.emplace_back(f[0]);
        const auto y = parse_double(f[1]);
        if (!y) throw std::runtime_error(where + ": bad y");
        t.y.push_back(*y);
        if (f[2] == "set") {
            t.kind.push_back(EventKind::Set);
        } else if (f[2] == "deploy") {
            t.kind.push_back(EventKind::Deployment);
        } else {
            throw std::runtime_error(where + ": bad kind");
        }
        if (f[3] == "train") {
            t.split.push_back(Split::Train);
        } else if (f[3] == "test") {
            t.split.push_back(Split::Test);
        } else {
            throw std::runtime_error(where + ": bad split tag");
        }
        const auto ws = parse_double(f[4]);
        if (!ws) throw std::runtime_error(where + ": bad Win.Sum");
        t.window_sum.push_back(*ws);
        for (std::size_t j = 0; j < t.p; ++j) {
            const auto v = parse_double(f[kFixedCount + j]);
            if (!v || !std::isfinite(*v)) {
                throw std::runtime_error(where + ": bad feature value in column " +
                                         t.feature_names[j]);
            }
            t.x.push_back(*v);
        }
    }
    return t;
}

std::string medians_to_csv(const TrainMedians& medians) {
    std::string out = "feature,median\n";
    for (const auto& [name, value] : medians) {
        out += name;
        out += ',';
        out += format_double(value);
        out += '\n';
    }
    return out;
}

TrainMedians medians_from_csv(const std::string& path) {
    const CsvTable csv = read_csv(path);
    if (csv.header.size() != 2 || csv.header[0] != "feature" || csv.header[1] != "median") {
        throw std::runtime_error(path + ": expected header 'feature,median'");
    }
    TrainMedians out;
    for (std::size_t r = 0; r < csv.rows.size(); ++r) {
        const auto& f = csv.rows[r];
        if (f.size() != 2) {
            throw std::runtime_error(path + ':' + std::to_string(csv.line_numbers[r]) +
                                     ": wrong field count");
        }
        const auto v = parse_double(f[1]);
        if (!v) {
            throw std::runtime_error(path + ':' + std::to_string(csv.line_numbers[r]) +
                                     ": bad median");
        }
        out[std::string(f[0])] = *v;
    }
    return out;
}

}  // namespace fadbio
