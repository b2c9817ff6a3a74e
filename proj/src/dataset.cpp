#include "rolltree/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <random>
#include <set>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace rolltree {

namespace {

std::optional<double> parse_number(const std::string& text) {
    if (text.empty()) return std::nullopt;
    const char* begin = text.c_str();
    char* end = nullptr;
    errno = 0;
    double value = std::strtod(begin, &end);
    if (end != begin + text.size() || errno == ERANGE) return std::nullopt;
    if (!std::isfinite(value)) return std::nullopt;
    return value;
}

std::string format_number(double value) {
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof(buf), value);
    return std::string(buf, res.ptr);
}

std::vector<std::string> split_line(const std::string& line, char delimiter) {
    std::vector<std::string> cells;
    std::string cell;
    for (char ch : line) {
        if (ch == delimiter) {
            cells.push_back(cell);
            cell.clear();
        } else {
            cell.push_back(ch);
        }
    }
    cells.push_back(cell);
    return cells;
}

}  // namespace

int RawDataset::column_index(const std::string& name) const {
    for (std::size_t i = 0; i < column_names.size(); ++i)
        if (column_names[i] == name) return static_cast<int>(i);
    return -1;
}

RawDataset parse_csv(const std::string& text, const std::string& label_column,
                     const std::string& origin, char delimiter) {
    std::istringstream in(text);
    std::string line;
    RawDataset raw;
    raw.label_column = label_column;

    if (!std::getline(in, line)) throw std::runtime_error(origin + ": empty file");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    raw.column_names = split_line(line, delimiter);
    std::set<std::string> seen(raw.column_names.begin(), raw.column_names.end());
    if (seen.size() != raw.column_names.size())
        throw std::runtime_error(origin + ": duplicate column names in header");
    // An empty label name loads the file as unlabeled prediction input.
    if (!label_column.empty() && raw.column_index(label_column) < 0)
        throw std::runtime_error(origin + ": label column '" + label_column + "' not found");

    raw.columns.resize(raw.column_names.size());
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() && in.eof()) break;
        auto cells = split_line(line, delimiter);
        if (cells.size() != raw.column_names.size())
            throw std::runtime_error(origin + ": row " + std::to_string(line_no) + " has " +
                                     std::to_string(cells.size()) + " cells, expected " +
                                     std::to_string(raw.column_names.size()));
        for (std::size_t c = 0; c < cells.size(); ++c)
            raw.columns[c].push_back(std::move(cells[c]));
        ++raw.n_rows;
    }
    if (raw.n_rows == 0) throw std::runtime_error(origin + ": no data rows");

    raw.numeric.resize(raw.columns.size(), false);
    raw.numeric_values.resize(raw.columns.size());
    for (std::size_t c = 0; c < raw.columns.size(); ++c) {
        std::vector<double> parsed;
        parsed.reserve(raw.n_rows);
        bool ok = true;
        for (const auto& cell : raw.columns[c]) {
            auto v = parse_number(cell);
            if (!v) {
                ok = false;
                break;
            }
            parsed.push_back(*v);
        }
        raw.numeric[c] = ok;
        if (ok) raw.numeric_values[c] = std::move(parsed);
    }
    return raw;
}

RawDataset load_csv(const std::string& path, const std::string& label_column,
                    char delimiter) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error(path + ": cannot open");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_csv(buf.str(), label_column, path, delimiter);
}

void write_csv(const RawDataset& raw, const std::string& path, char delimiter) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error(path + ": cannot open for writing");
    for (std::size_t c = 0; c < raw.column_names.size(); ++c) {
        if (c) out << delimiter;
        out << raw.column_names[c];
    }
    out << '\n';
    for (std::size_t r = 0; r < raw.n_rows; ++r) {
        for (std::size_t c = 0; c < raw.columns.size(); ++c) {
            if (c) out << delimiter;
            out << raw.columns[c][r];
        }
        out << '\n';
    }
    if (!out) throw std::runtime_error(path + ": write failed");
}

void BinaryDataset::validate() const {
    if (n <= 0) throw std::runtime_error("binary dataset: no rows");
    if (p <= 0) throw std::runtime_error("binary dataset: no feature columns");
    if (x.size() != static_cast<std::size_t>(n * p))
        throw std::runtime_error("binary dataset: matrix size mismatch");
    for (auto v : x)
        if (v > 1) throw std::runtime_error("binary dataset: non-binary entry");
    if (static_cast<std::int64_t>(feature_names.size()) != p)
        throw std::runtime_error("binary dataset: feature name count mismatch");
    if (y.empty()) return;  // unlabeled prediction input
    if (static_cast<std::int64_t>(y.size()) != n)
        throw std::runtime_error("binary dataset: label count mismatch");
    if (n_classes < 1 || static_cast<int>(class_names.size()) != n_classes)
        throw std::runtime_error("binary dataset: class name count mismatch");
    std::vector<bool> present(n_classes, false);
    for (auto label : y) {
        if (label < 0 || label >= n_classes)
            throw std::runtime_error("binary dataset: label out of range");
        present[label] = true;
    }
    for (int c = 0; c < n_classes; ++c)
        if (!present[c])
            throw std::runtime_error("binary dataset: class " + class_names[c] +
                                     " has no datapoints");
}

namespace {

// Linearly interpolated empirical quantiles; duplicate boundaries and
// boundaries at or below the minimum are dropped so no bin is empty by
// construction.
std::vector<double> quantile_boundaries(std::vector<double> values, int bins) {
    std::sort(values.begin(), values.end());
    std::vector<double> raw;
    const std::size_t sz = values.size();
    for (int m = 1; m < bins; ++m) {
        double pos = (static_cast<double>(m) / bins) * static_cast<double>(sz - 1);
        auto idx = static_cast<std::size_t>(pos);
        double frac = pos - static_cast<double>(idx);
        double v = values[idx];
        if (idx + 1 < sz) v += frac * (values[idx + 1] - values[idx]);
        raw.push_back(v);
    }
    std::vector<double> out;
    for (double b : raw) {
        if (b <= values.front()) continue;
        if (!out.empty() && b == out.back()) continue;
        out.push_back(b);
    }
    return out;
}

int bin_index(double v, const std::vector<double>& boundaries) {
    int idx = 0;
    for (double b : boundaries)
        if (v >= b) ++idx;
    return idx;
}

std::string range_name(const std::string& source, const std::vector<double>& boundaries,
                       int bin) {
    std::string lo = bin == 0 ? "-inf" : format_number(boundaries[bin - 1]);
    std::string hi = bin == static_cast<int>(boundaries.size())
                         ? "+inf"
                         : format_number(boundaries[bin]);
    return source + ":[" + lo + "," + hi + ")";
}

}  // namespace

std::pair<BinaryDataset, BinarizationSchema> binarize(const RawDataset& raw,
                                                      int max_categorical_unique,
                                                      int quantile_bins) {
    if (quantile_bins < 2) throw std::invalid_argument("binarize: quantile_bins must be >= 2");
    BinarizationSchema schema;
    schema.label_column = raw.label_column;
    int label_col = raw.column_index(raw.label_column);
    if (label_col < 0) throw std::invalid_argument("binarize: dataset has no label column");

    BinaryDataset ds;
    ds.n = static_cast<std::int64_t>(raw.n_rows);
    ds.y.reserve(raw.n_rows);
    for (const auto& cell : raw.columns[label_col]) {
        auto it = std::find(schema.class_names.begin(), schema.class_names.end(), cell);
        if (it == schema.class_names.end()) {
            schema.class_names.push_back(cell);
            ds.y.push_back(static_cast<std::int32_t>(schema.class_names.size() - 1));
        } else {
            ds.y.push_back(static_cast<std::int32_t>(it - schema.class_names.begin()));
        }
    }

    int next_column = 0;
    for (std::size_t c = 0; c < raw.column_names.size(); ++c) {
        if (static_cast<int>(c) == label_col) continue;
        SchemaFeature feature;
        feature.source = raw.column_names[c];
        feature.source_numeric = raw.numeric[c];
        feature.first_column = next_column;

        if (raw.numeric[c]) {
            std::vector<double> distinct = raw.numeric_values[c];
            std::sort(distinct.begin(), distinct.end());
            distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
            if (static_cast<int>(distinct.size()) < max_categorical_unique) {
                feature.kind = SchemaFeature::Kind::categorical;
                feature.categories_numeric = distinct;
                for (double v : distinct)
                    feature.column_names.push_back(feature.source + "=" + format_number(v));
            } else {
                feature.kind = SchemaFeature::Kind::binned;
                feature.boundaries = quantile_boundaries(raw.numeric_values[c], quantile_bins);
                for (int b = 0; b <= static_cast<int>(feature.boundaries.size()); ++b)
                    feature.column_names.push_back(range_name(feature.source,
                                                              feature.boundaries, b));
            }
        } else {
            std::vector<std::string> distinct = raw.columns[c];
            std::sort(distinct.begin(), distinct.end());
            distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
            feature.kind = SchemaFeature::Kind::categorical;
            feature.categories_text = distinct;
            for (const auto& v : distinct)
                feature.column_names.push_back(feature.source + "=" + v);
        }

        if (feature.width() == 1)
            schema.warnings.push_back("constant feature: " + feature.source);
        next_column += feature.width();
        schema.features.push_back(std::move(feature));
    }
    if (schema.features.empty())
        throw std::runtime_error("binarize: no feature columns besides the label");
    schema.total_columns = next_column;

    ds.p = next_column;
    ds.n_classes = static_cast<int>(schema.class_names.size());
    ds.class_names = schema.class_names;
    for (const auto& feature : schema.features)
        for (const auto& name : feature.column_names) ds.feature_names.push_back(name);

    ds.x.assign(static_cast<std::size_t>(ds.n * ds.p), 0);
    for (const auto& feature : schema.features) {
        int src = raw.column_index(feature.source);
        for (std::size_t r = 0; r < raw.n_rows; ++r) {
            int offset;
            if (feature.kind == SchemaFeature::Kind::binned) {
                offset = bin_index(raw.numeric_values[src][r], feature.boundaries);
            } else if (feature.source_numeric) {
                double v = raw.numeric_values[src][r];
                auto it = std::lower_bound(feature.categories_numeric.begin(),
                                           feature.categories_numeric.end(), v);
                offset = static_cast<int>(it - feature.categories_numeric.begin());
            } else {
                const auto& v = raw.columns[src][r];
                auto it = std::lower_bound(feature.categories_text.begin(),
                                           feature.categories_text.end(), v);
                offset = static_cast<int>(it - feature.categories_text.begin());
            }
            ds.x[r * ds.p + feature.first_column + offset] = 1;
        }
    }
    ds.validate();
    return {std::move(ds), std::move(schema)};
}

BinaryDataset apply_schema(const BinarizationSchema& schema, const RawDataset& raw) {
    BinaryDataset ds;
    ds.n = static_cast<std::int64_t>(raw.n_rows);
    ds.p = schema.total_columns;
    ds.n_classes = static_cast<int>(schema.class_names.size());
    ds.class_names = schema.class_names;
    for (const auto& feature : schema.features)
        for (const auto& name : feature.column_names) ds.feature_names.push_back(name);
    ds.x.assign(static_cast<std::size_t>(ds.n * ds.p), 0);

    for (const auto& feature : schema.features) {
        int src = raw.column_index(feature.source);
        if (src < 0)
            throw std::runtime_error("apply_schema: input lacks column '" + feature.source + "'");
        for (std::size_t r = 0; r < raw.n_rows; ++r) {
            const auto& cell = raw.columns[src][r];
            int offset = -1;
            if (feature.kind == SchemaFeature::Kind::binned) {
                auto v = parse_number(cell);
                if (v) offset = bin_index(*v, feature.boundaries);
            } else if (feature.source_numeric) {
                auto v = parse_number(cell);
                if (v) {
                    auto it = std::lower_bound(feature.categories_numeric.begin(),
                                               feature.categories_numeric.end(), *v);
                    if (it != feature.categories_numeric.end() && *it == *v)
                        offset = static_cast<int>(it - feature.categories_numeric.begin());
                }
            } else {
                auto it = std::lower_bound(feature.categories_text.begin(),
                                           feature.categories_text.end(), cell);
                if (it != feature.categories_text.end() && *it == cell)
                    offset = static_cast<int>(it - feature.categories_text.begin());
            }
            // offset stays -1 for unseen categories: the whole group reads 0
            if (offset >= 0) ds.x[r * ds.p + feature.first_column + offset] = 1;
        }
    }

    int label_col = raw.column_index(schema.label_column);
    if (label_col >= 0) {
        for (const auto& cell : raw.columns[label_col]) {
            auto it = std::find(schema.class_names.begin(), schema.class_names.end(), cell);
            if (it == schema.class_names.end())
                throw std::runtime_error("apply_schema: unknown class label '" + cell + "'");
            ds.y.push_back(static_cast<std::int32_t>(it - schema.class_names.begin()));
        }
    }
    return ds;
}

namespace {

using nlohmann::json;

json feature_to_json(const SchemaFeature& f) {
    json j;
    j["source"] = f.source;
    j["kind"] = f.kind == SchemaFeature::Kind::binned ? "binned" : "categorical";
    j["source_numeric"] = f.source_numeric;
    if (f.kind == SchemaFeature::Kind::binned)
        j["boundaries"] = f.boundaries;
    else if (f.source_numeric)
        j["categories"] = f.categories_numeric;
    else
        j["categories"] = f.categories_text;
    j["first_column"] = f.first_column;
    j["column_names"] = f.column_names;
    return j;
}

SchemaFeature feature_from_json(const json& j) {
    SchemaFeature f;
    f.source = j.at("source").get<std::string>();
    std::string kind = j.at("kind").get<std::string>();
    if (kind == "binned")
        f.kind = SchemaFeature::Kind::binned;
    else if (kind == "categorical")
        f.kind = SchemaFeature::Kind::categorical;
    else
        throw std::runtime_error("schema: unknown feature kind '" + kind + "'");
    f.source_numeric = j.at("source_numeric").get<bool>();
    if (f.kind == SchemaFeature::Kind::binned)
        f.boundaries = j.at("boundaries").get<std::vector<double>>();
    else if (f.source_numeric)
        f.categories_numeric = j.at("categories").get<std::vector<double>>();
    else
        f.categories_text = j.at("categories").get<std::vector<std::string>>();
    f.first_column = j.at("first_column").get<int>();
    f.column_names = j.at("column_names").get<std::vector<std::string>>();
    if (static_cast<int>(f.column_names.size()) != f.width())
        throw std::runtime_error("schema: column name count mismatch for " + f.source);
    return f;
}

}  // namespace

std::string schema_to_json(const BinarizationSchema& schema) {
    json j;
    j["format_version"] = 1;
    j["label_column"] = schema.label_column;
    j["classes"] = schema.class_names;
    j["total_columns"] = schema.total_columns;
    j["warnings"] = schema.warnings;
    j["features"] = json::array();
    for (const auto& f : schema.features) j["features"].push_back(feature_to_json(f));
    return j.dump(2);
}

BinarizationSchema schema_from_json(const std::string& text) {
    json j = json::parse(text);
    BinarizationSchema schema;
    schema.label_column = j.at("label_column").get<std::string>();
    schema.class_names = j.at("classes").get<std::vector<std::string>>();
    schema.total_columns = j.at("total_columns").get<int>();
    if (j.contains("warnings"))
        schema.warnings = j.at("warnings").get<std::vector<std::string>>();
    int next = 0;
    for (const auto& fj : j.at("features")) {
        auto f = feature_from_json(fj);
        if (f.first_column != next)
            throw std::runtime_error("schema: feature columns are not contiguous");
        next += f.width();
        schema.features.push_back(std::move(f));
    }
    if (next != schema.total_columns)
        throw std::runtime_error("schema: total column count mismatch");
    return schema;
}

FoldAssignment stratified_k_folds(const BinaryDataset& ds, int k, std::uint64_t seed) {
    if (ds.y.empty()) throw std::invalid_argument("stratified_k_folds: dataset has no labels");
    if (k < 2 || static_cast<std::int64_t>(k) > ds.n)
        throw std::invalid_argument("stratified_k_folds: k must be in [2, n]");

    FoldAssignment folds;
    folds.k = k;
    folds.seed = seed;
    folds.fold_of.assign(ds.n, 0);

    std::vector<std::vector<std::uint32_t>> by_class(ds.n_classes);
    for (std::int64_t i = 0; i < ds.n; ++i)
        by_class[ds.y[i]].push_back(static_cast<std::uint32_t>(i));

    for (int c = 0; c < ds.n_classes; ++c) {
        if (static_cast<int>(by_class[c].size()) < k) {
            folds.warnings.push_back("class " + ds.class_names[c] + " has fewer datapoints (" +
                                     std::to_string(by_class[c].size()) + ") than folds (" +
                                     std::to_string(k) + "); some folds will miss it");
        }
    }

    // Seeded Fisher-Yates per class (self-contained so shuffles are identical
    // across standard libraries), then one round-robin cursor running through
    // the classes keeps both per-class and total fold sizes within one.
    std::mt19937_64 rng(seed);
    int cursor = 0;
    for (int c = 0; c < ds.n_classes; ++c) {
        auto& group = by_class[c];
        for (std::size_t i = group.size(); i > 1; --i) {
            std::size_t j = static_cast<std::size_t>(rng() % i);
            std::swap(group[i - 1], group[j]);
        }
        for (auto idx : group) {
            folds.fold_of[idx] = static_cast<std::int32_t>(cursor);
            cursor = (cursor + 1) % k;
        }
    }
    return folds;
}

}  // namespace rolltree
