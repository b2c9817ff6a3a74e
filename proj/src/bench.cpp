#include "rolltree/bench.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

#include "rolltree/tree.hpp"

namespace rolltree {

namespace {

using nlohmann::json;

// Reproducible coin flips independent of standard-library distribution
// implementations: consume raw engine words bit by bit.
class BitStream {
  public:
    explicit BitStream(std::uint64_t seed) : rng_(seed) {}

    bool next() {
        if (left_ == 0) {
            word_ = rng_();
            left_ = 64;
        }
        const bool bit = word_ & 1;
        word_ >>= 1;
        --left_;
        return bit;
    }

    std::uint64_t word() { return rng_(); }

  private:
    std::mt19937_64 rng_;
    std::uint64_t word_ = 0;
    int left_ = 0;
};

}  // namespace

MethodSpec method_from_name(const std::string& name) {
    MethodSpec spec;
    spec.name = name;
    FitConfig& cfg = spec.config;
    if (name == "cart-m") {
        cfg.lookahead = 1;
        cfg.loss = LossKind::misclassification;
    } else if (name == "cart-g") {
        cfg.lookahead = 1;
        cfg.loss = LossKind::gini;
    } else if (name == "rst-m") {
        cfg.lookahead = 2;
        cfg.loss = LossKind::misclassification;
    } else if (name == "rst-g") {
        cfg.lookahead = 2;
        cfg.loss = LossKind::gini;
    } else if (name == "rst3-m") {
        cfg.lookahead = 3;
        cfg.loss = LossKind::misclassification;
    } else if (name == "rst3-g") {
        cfg.lookahead = 3;
        cfg.loss = LossKind::gini;
    } else if (name == "hybrid") {
        cfg.lookahead = 2;
        cfg.strategy = FitConfig::Strategy::hybrid;
    } else {
        throw std::invalid_argument(
            "unknown method '" + name +
            "' (expected cart-m, cart-g, rst-m, rst-g, rst3-m, rst3-g or hybrid)");
    }
    return spec;
}

const CvRecord* CvReport::find(const std::string& method, int depth, int fold) const {
    for (const auto& r : records)
        if (r.method == method && r.depth == depth && r.fold == fold) return &r;
    return nullptr;
}

namespace {

double mean_over_folds(const CvReport& report, const std::string& method, int depth,
                       bool train) {
    double sum = 0.0;
    int n = 0;
    for (const auto& r : report.records) {
        if (r.method != method || r.depth != depth || !r.error.empty()) continue;
        sum += train ? r.train_accuracy : r.test_accuracy;
        ++n;
    }
    return n == 0 ? std::nan("") : sum / n;
}

}  // namespace

double CvReport::mean_train(const std::string& method, int depth) const {
    return mean_over_folds(*this, method, depth, true);
}

double CvReport::mean_test(const std::string& method, int depth) const {
    return mean_over_folds(*this, method, depth, false);
}

CvReport run_cv(const BinaryDataset& ds, const std::string& dataset_name,
                const std::vector<MethodSpec>& methods, const std::vector<int>& depths,
                int k, std::uint64_t seed) {
    CvReport report;
    report.dataset = dataset_name;
    report.k = k;
    report.seed = seed;
    for (const auto& m : methods) report.methods.push_back(m.name);
    report.depths = depths;

    const FoldAssignment folds = stratified_k_folds(ds, k, seed);
    std::vector<std::vector<std::uint32_t>> in_fold(k), out_of_fold(k);
    for (std::int64_t i = 0; i < ds.n; ++i) {
        const int f = folds.fold_of[i];
        in_fold[f].push_back(static_cast<std::uint32_t>(i));
        for (int g = 0; g < k; ++g)
            if (g != f) out_of_fold[g].push_back(static_cast<std::uint32_t>(i));
    }

    for (const auto& method : methods) {
        for (const int depth : depths) {
            for (int fold = 0; fold < k; ++fold) {
                CvRecord rec;
                rec.method = method.name;
                rec.depth = depth;
                rec.fold = fold;
                try {
                    FitConfig cfg = method.config;
                    cfg.d_max = depth;
                    const auto start = std::chrono::steady_clock::now();
                    const DecisionTree tree = fit_tree(ds, out_of_fold[fold], cfg);
                    rec.fit_seconds =
                        std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                                      start)
                            .count();
                    rec.train_accuracy = evaluate_accuracy(tree, ds, out_of_fold[fold]);
                    rec.test_accuracy = evaluate_accuracy(tree, ds, in_fold[fold]);
                } catch (const std::exception& e) {
                    rec.error = e.what();
                }
                report.records.push_back(std::move(rec));
            }
        }
    }
    return report;
}

WinTieTable win_tie(const CvReport& report) {
    WinTieTable table;
    for (const int depth : report.depths)
        for (const auto& method : report.methods)
            table.rows.push_back(WinTieRow{method, depth, 0, 0, 0});
    auto row_of = [&](const std::string& method, int depth) -> WinTieRow& {
        for (auto& row : table.rows)
            if (row.method == method && row.depth == depth) return row;
        throw std::logic_error("win_tie: row lookup failed");
    };

    for (const int depth : report.depths) {
        for (int fold = 0; fold < report.k; ++fold) {
            std::vector<std::pair<std::string, std::int64_t>> cells;
            bool complete = true;
            for (const auto& method : report.methods) {
                const CvRecord* rec = report.find(method, depth, fold);
                if (rec == nullptr || !rec->error.empty()) {
                    complete = false;
                    break;
                }
                cells.emplace_back(method,
                                   std::llround(rec->test_accuracy * 10000.0));
            }
            if (!complete) {
                ++table.excluded_instances;
                continue;
            }
            std::int64_t best = cells.front().second;
            for (const auto& [m, v] : cells) best = std::max(best, v);
            int sharers = 0;
            for (const auto& [m, v] : cells) sharers += v == best;
            for (const auto& [m, v] : cells) {
                WinTieRow& row = row_of(m, depth);
                ++row.instances;
                if (v == best) {
                    if (sharers == 1)
                        ++row.wins;
                    else
                        ++row.ties_for_best;
                }
            }
        }
    }
    return table;
}

namespace {

json record_to_json(const CvRecord& r) {
    return json{{"method", r.method},
                {"depth", r.depth},
                {"fold", r.fold},
                {"train_accuracy", r.train_accuracy},
                {"test_accuracy", r.test_accuracy},
                {"fit_seconds", r.fit_seconds},
                {"error", r.error}};
}

}  // namespace

std::string report_to_json(const CvReport& report) {
    json doc{{"format_version", 1},
             {"dataset", report.dataset},
             {"k", report.k},
             {"seed", report.seed},
             {"methods", report.methods},
             {"depths", report.depths}};
    json records = json::array();
    for (const auto& r : report.records) records.push_back(record_to_json(r));
    doc["records"] = std::move(records);
    return doc.dump(2) + "\n";
}

CvReport report_from_json(const std::string& text) {
    const json doc = json::parse(text);
    if (doc.value("format_version", 0) != 1)
        throw std::runtime_error("cv report: unsupported format_version");
    CvReport report;
    report.dataset = doc.at("dataset").get<std::string>();
    report.k = doc.at("k").get<int>();
    report.seed = doc.at("seed").get<std::uint64_t>();
    report.methods = doc.at("methods").get<std::vector<std::string>>();
    report.depths = doc.at("depths").get<std::vector<int>>();
    for (const auto& r : doc.at("records")) {
        CvRecord rec;
        rec.method = r.at("method").get<std::string>();
        rec.depth = r.at("depth").get<int>();
        rec.fold = r.at("fold").get<int>();
        rec.train_accuracy = r.at("train_accuracy").get<double>();
        rec.test_accuracy = r.at("test_accuracy").get<double>();
        rec.fit_seconds = r.at("fit_seconds").get<double>();
        rec.error = r.at("error").get<std::string>();
        report.records.push_back(std::move(rec));
    }
    return report;
}

namespace {

std::string format_cell(double v) {
    if (std::isnan(v)) return "-";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4f", v);
    return buf;
}

void append_accuracy_block(std::ostringstream& out, const CvReport& report, bool train) {
    out << (train ? "train accuracy\n" : "test accuracy\n");
    std::size_t name_width = 6;
    for (const auto& m : report.methods) name_width = std::max(name_width, m.size());
    out << std::string(name_width, ' ');
    for (const int d : report.depths) {
        char head[16];
        std::snprintf(head, sizeof head, "d%d", d);
        out << "  " << std::string(6 - std::min<std::size_t>(6, std::string(head).size()),
                                   ' ')
            << head;
    }
    out << "\n";
    for (const auto& m : report.methods) {
        out << m << std::string(name_width - m.size(), ' ');
        for (const int d : report.depths) {
            const std::string cell =
                format_cell(train ? report.mean_train(m, d) : report.mean_test(m, d));
            out << "  " << std::string(6 - std::min<std::size_t>(6, cell.size()), ' ')
                << cell;
        }
        out << "\n";
    }
}

}  // namespace

std::string report_text_tables(const CvReport& report) {
    std::ostringstream out;
    out << "dataset: " << report.dataset << "  folds: " << report.k
        << "  seed: " << report.seed << "\n";
    int failed = 0;
    for (const auto& r : report.records) failed += !r.error.empty();
    if (failed > 0) out << "failed cells: " << failed << "\n";
    append_accuracy_block(out, report, true);
    append_accuracy_block(out, report, false);
    return out.str();
}

std::string wintie_to_json(const WinTieTable& table) {
    json rows = json::array();
    for (const auto& r : table.rows)
        rows.push_back(json{{"method", r.method},
                            {"depth", r.depth},
                            {"wins", r.wins},
                            {"ties_for_best", r.ties_for_best},
                            {"instances", r.instances}});
    json doc{{"format_version", 1},
             {"rows", std::move(rows)},
             {"excluded_instances", table.excluded_instances}};
    return doc.dump(2) + "\n";
}

std::string wintie_text(const WinTieTable& table) {
    std::ostringstream out;
    std::size_t name_width = 6;
    for (const auto& r : table.rows) name_width = std::max(name_width, r.method.size());
    out << "method" << std::string(name_width - 6, ' ')
        << "  depth   wins   ties  total\n";
    for (const auto& r : table.rows) {
        char buf[64];
        std::snprintf(buf, sizeof buf, "  %5d  %5d  %5d  %5d\n", r.depth, r.wins,
                      r.ties_for_best, r.instances);
        out << r.method << std::string(name_width - r.method.size(), ' ') << buf;
    }
    if (table.excluded_instances > 0)
        out << "excluded instances: " << table.excluded_instances << "\n";
    return out.str();
}

BinaryDataset make_synthetic(std::int64_t n, std::int64_t p, std::uint64_t seed) {
    if (n < 2 || p < 1) throw std::invalid_argument("make_synthetic: need n >= 2, p >= 1");
    BinaryDataset ds;
    ds.n = n;
    ds.p = p;
    ds.n_classes = 2;
    ds.x.resize(static_cast<std::size_t>(n * p));
    ds.y.resize(static_cast<std::size_t>(n));
    for (std::int64_t j = 0; j < p; ++j) ds.feature_names.push_back("f" + std::to_string(j));
    ds.class_names = {"0", "1"};

    BitStream bits(seed);
    // Planted complete depth-3 tree: seven internal features, eight leaf labels.
    std::array<std::int64_t, 7> split{};
    for (auto& f : split) f = static_cast<std::int64_t>(bits.word() % p);
    std::array<int, 8> leaf_label{};
    for (auto& l : leaf_label) l = bits.next();

    for (std::int64_t i = 0; i < n; ++i) {
        for (std::int64_t j = 0; j < p; ++j)
            ds.x[static_cast<std::size_t>(i * p + j)] = bits.next();
        int at = 0;  // heap walk over the planted tree
        for (int level = 0; level < 3; ++level)
            at = 2 * at + 1 + ds.at(i, split[at]);
        int label = leaf_label[at - 7];
        if (bits.word() % 10 == 0) label = 1 - label;
        ds.y[i] = label;
    }
    // The validation contract wants every class present.
    bool seen0 = false, seen1 = false;
    for (auto v : ds.y) (v == 0 ? seen0 : seen1) = true;
    if (!seen0) ds.y[0] = 0;
    if (!seen1) ds.y[n - 1] = 1;
    ds.validate();
    return ds;
}

TimingBreakdown timing_bench(std::int64_t n, std::int64_t p, int depth, LossKind loss,
                             std::uint64_t seed, int threads) {
    const BinaryDataset ds = make_synthetic(n, p, seed);
    FitConfig cfg;
    cfg.d_max = depth;
    cfg.lookahead = 2;
    cfg.loss = loss;
    cfg.threads = threads;
    FitInfo info;
    const auto start = std::chrono::steady_clock::now();
    const DecisionTree tree = fit_tree(ds, cfg, &info);
    const double total =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    TimingBreakdown out;
    out.n = n;
    out.p = p;
    out.depth = depth;
    out.loss = loss;
    out.precompute_seconds = info.precompute_seconds;
    out.solve_seconds = info.solve_seconds;
    out.total_seconds = total;
    out.nodes_processed = info.nodes_processed;
    out.train_accuracy = evaluate_accuracy(tree, ds);
    return out;
}

}  // namespace rolltree
