#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rolltree/dataset.hpp"
#include "rolltree/fit.hpp"

namespace rolltree {

struct MethodSpec {
    std::string name;
    FitConfig config;  // d_max is overridden per evaluated depth
};

MethodSpec method_from_name(const std::string& name);

struct CvRecord {
    std::string method;
    int depth = 0;
    int fold = 0;
    double train_accuracy = 0.0;
    double test_accuracy = 0.0;
    double fit_seconds = 0.0;
    std::string error;  // empty on success
};

struct CvReport {
    std::string dataset;
    int k = 0;
    std::uint64_t seed = 0;
    std::vector<std::string> methods;
    std::vector<int> depths;
    std::vector<CvRecord> records;  // one per (method, depth, fold)

    const CvRecord* find(const std::string& method, int depth, int fold) const;
    double mean_train(const std::string& method, int depth) const;
    double mean_test(const std::string& method, int depth) const;
};

// Shared folds across every method and depth; failed cells are recorded with
// their error text and skipped in the means.
CvReport run_cv(const BinaryDataset& ds, const std::string& dataset_name,
                const std::vector<MethodSpec>& methods, const std::vector<int>& depths,
                int k, std::uint64_t seed);

struct WinTieRow {
    std::string method;
    int depth = 0;
    int wins = 0;           // strictly best test accuracy in a fold
    int ties_for_best = 0;  // shared best test accuracy
    int instances = 0;
};

struct WinTieTable {
    std::vector<WinTieRow> rows;
    int excluded_instances = 0;  // folds skipped because some method's cell failed
};

// Accuracies are rounded to 4 decimals before comparing, mirroring reported
// precision.
WinTieTable win_tie(const CvReport& report);

std::string report_to_json(const CvReport& report);
CvReport report_from_json(const std::string& text);
std::string report_text_tables(const CvReport& report);
std::string wintie_to_json(const WinTieTable& table);
std::string wintie_text(const WinTieTable& table);

// Synthetic load generator: fair-coin features, labels planted by a random
// depth-3 tree, then 10% of labels flipped.
BinaryDataset make_synthetic(std::int64_t n, std::int64_t p, std::uint64_t seed);

struct TimingBreakdown {
    std::int64_t n = 0;
    std::int64_t p = 0;
    int depth = 0;
    LossKind loss = LossKind::misclassification;
    double precompute_seconds = 0.0;
    double solve_seconds = 0.0;
    double total_seconds = 0.0;
    int nodes_processed = 0;
    double train_accuracy = 0.0;
};

TimingBreakdown timing_bench(std::int64_t n, std::int64_t p, int depth, LossKind loss,
                             std::uint64_t seed, int threads = 1);

}  // namespace rolltree
