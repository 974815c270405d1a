#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fadbio/features.hpp"

// Flat tabular view of a built dataset: one row per labeled example, columns
// for every feature at the richest level, plus bookkeeping columns consumed
// by training and evaluation (event id, observed tonnage, event kind, split
// tag, and the raw window cell sum needed by the threshold baselines).

namespace fadbio {

enum class Split : std::int8_t { Train = 0, Test = 1 };

struct DataTable {
    std::vector<std::string> feature_names;
    std::size_t n = 0;
    std::size_t p = 0;
    std::vector<double> x;  // row-major, n * p
    std::vector<double> y;
    std::vector<EventKind> kind;
    std::vector<std::string> event_id;
    std::vector<Split> split;
    std::vector<double> window_sum;  // sum of all window cells (missing = 0)
    int w_hours = 0;

    double at(std::size_t row, std::size_t col) const { return x[row * p + col]; }
    std::size_t column_index(std::string_view name) const;  // npos when absent
    std::vector<std::size_t> rows_with_split(Split s) const;
    std::vector<std::size_t> all_rows() const;
};

inline constexpr std::size_t kNoColumn = static_cast<std::size_t>(-1);

// A (rows x columns) selection over a table; models see only this.
struct DataView {
    const DataTable* table = nullptr;
    std::vector<std::size_t> rows;
    std::vector<std::size_t> cols;

    std::size_t n() const { return rows.size(); }
    std::size_t p() const { return cols.size(); }
    double at(std::size_t i, std::size_t j) const {
        return table->at(rows[i], cols[j]);
    }
    double label(std::size_t i, Task t) const {
        return label_value(table->y[rows[i]], t);
    }
    std::vector<std::string> column_names() const;
};

// View over the given rows with the feature columns of `level`; throws when a
// required column is missing from the table.
DataView make_view(const DataTable& table, const std::vector<std::size_t>& rows,
                   FeatureLevel level);
DataView make_view(const DataTable& table, const std::vector<std::size_t>& rows,
                   const std::vector<std::string>& columns);

// Materializes a built dataset into a table. The split assignment and the
// medians must be computed beforehand (medians on the training rows only).
DataTable to_table(const std::vector<LabeledExample>& examples,
                   const std::vector<Split>& split, const TrainMedians& medians,
                   int w_hours);

// dataset.csv: event_id,y,kind,split,Win.Sum,<features...>; rows sorted by
// event_id; numbers in shortest round-trip form.
std::string dataset_to_csv(const DataTable& table);
DataTable dataset_from_csv(const std::string& path);  // throws on schema problems

// medians.csv: feature,median
std::string medians_to_csv(const TrainMedians& medians);
TrainMedians medians_from_csv(const std::string& path);

}  // namespace fadbio
