#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace rolltree {

// Tabular data as loaded from CSV, column-major. Numeric detection happens at
// load time: a column is numeric iff every cell parses as a number.
struct RawDataset {
    std::vector<std::string> column_names;
    std::vector<std::vector<std::string>> columns;  // cells, column-major
    std::vector<bool> numeric;
    std::vector<std::vector<double>> numeric_values;  // parsed, empty for text columns
    std::string label_column;
    std::size_t n_rows = 0;

    int column_index(const std::string& name) const;
};

RawDataset load_csv(const std::string& path, const std::string& label_column,
                    char delimiter = ',');
RawDataset parse_csv(const std::string& text, const std::string& label_column,
                     const std::string& origin, char delimiter = ',');
void write_csv(const RawDataset& raw, const std::string& path, char delimiter = ',');

// One source column's mapping onto a group of one-hot columns. Categorical
// features match on exact value; binned features cut on boundaries, where
// value v lands in bin = number of boundaries <= v.
struct SchemaFeature {
    enum class Kind { categorical, binned };
    std::string source;
    Kind kind = Kind::categorical;
    bool source_numeric = false;
    std::vector<std::string> categories_text;   // categorical, text source
    std::vector<double> categories_numeric;     // categorical, numeric source
    std::vector<double> boundaries;             // binned, strictly increasing
    int first_column = 0;
    std::vector<std::string> column_names;

    int width() const {
        if (kind == Kind::binned) return static_cast<int>(boundaries.size()) + 1;
        return static_cast<int>(source_numeric ? categories_numeric.size()
                                               : categories_text.size());
    }
};

struct BinarizationSchema {
    std::string label_column;
    std::vector<std::string> class_names;
    std::vector<SchemaFeature> features;
    int total_columns = 0;
    std::vector<std::string> warnings;
};

std::string schema_to_json(const BinarizationSchema& schema);
BinarizationSchema schema_from_json(const std::string& text);

// 0/1 feature matrix with integer class labels. y may be left empty when the
// matrix was produced from unlabeled prediction input.
struct BinaryDataset {
    std::int64_t n = 0;
    std::int64_t p = 0;
    int n_classes = 0;
    std::vector<std::uint8_t> x;  // row-major, n * p
    std::vector<std::int32_t> y;
    std::vector<std::string> feature_names;
    std::vector<std::string> class_names;

    std::uint8_t at(std::int64_t row, std::int64_t col) const {
        return x[static_cast<std::size_t>(row * p + col)];
    }
    void validate() const;  // throws on malformed contents
};

std::pair<BinaryDataset, BinarizationSchema> binarize(const RawDataset& raw,
                                                      int max_categorical_unique = 7,
                                                      int quantile_bins = 4);

// Re-applies a fitted schema to new raw data. Unseen category values map to an
// all-zero group. Labels are mapped when the label column is present, else y
// stays empty.
BinaryDataset apply_schema(const BinarizationSchema& schema, const RawDataset& raw);

struct FoldAssignment {
    int k = 0;
    std::uint64_t seed = 0;
    std::vector<std::int32_t> fold_of;  // one entry per datapoint, in [0, k)
    std::vector<std::string> warnings;
};

FoldAssignment stratified_k_folds(const BinaryDataset& ds, int k, std::uint64_t seed);

}  // namespace rolltree
