#pragma once

#include <cstdint>
#include <vector>

#include "rolltree/depth2.hpp"
#include "rolltree/depth3.hpp"
#include "rolltree/tree.hpp"

namespace rolltree {

// How the tree is grown: process frontier nodes shallowest first, solve the
// lookahead-deep subproblem on the node's subset, install the whole solved
// subtree, and re-solve children later so only each processed node's own
// split is final. hybrid picks the loss from d_max (misclassification up to
// depth 5, gini beyond).
struct FitConfig {
    int d_max = 2;
    int lookahead = 2;  // 1, 2 or 3
    LossKind loss = LossKind::gini;
    SolverConfig solver;
    enum class Strategy { fixed, hybrid } strategy = Strategy::fixed;
    int threads = 1;
};

struct FitInfo {
    bool collect_misclass_trace = false;    // set before the fit to record the trace
    int nodes_processed = 0;
    int premature_terminations = 0;
    bool premature_at_root = false;
    int infeasible_closures = 0;
    double precompute_seconds = 0.0;
    double solve_seconds = 0.0;
    std::vector<std::int64_t> misclass_trace;  // committed errors after each install
};

DecisionTree fit_tree(const BinaryDataset& ds, const FitConfig& cfg, FitInfo* info = nullptr);
DecisionTree fit_tree(const BinaryDataset& ds, const std::vector<std::uint32_t>& subset,
                      const FitConfig& cfg, FitInfo* info = nullptr);

DecisionTree fit_hybrid(const BinaryDataset& ds, int d_max,
                        const SolverConfig& solver = {}, FitInfo* info = nullptr);

// Resolves the effective loss, applying the hybrid depth rule.
LossKind effective_loss(const FitConfig& cfg);

}  // namespace rolltree
