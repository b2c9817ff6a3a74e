#pragma once

#include <array>
#include <cstdint>
#include <optional>

#include "rolltree/loss.hpp"

namespace rolltree {

// Size limits on the candidate split structure. min_internal bounds the
// smaller side of the root split, min_leaf bounds every leaf. Zero disables a
// limit. allow_no_improvement is consumed by the rolling fitter: when set,
// subtrees that fail to beat the node's own leaf loss are still installed.
struct SolverConfig {
    std::int64_t min_internal = 0;
    std::int64_t min_leaf = 0;
    bool allow_no_improvement = false;
};

struct Depth2Solution {
    std::int64_t root_feature = -1;
    std::int64_t left_feature = -1;   // second split on the x_root = 0 side
    std::int64_t right_feature = -1;  // second split on the x_root = 1 side
    double objective = 0.0;
    std::array<double, 4> leaf_costs{};  // (0,0) (0,1) (1,0) (1,1)
};

// Exact minimizer over all depth-2 trees, by per-root-feature decomposition of
// the precomputed table. Returns nullopt when the size limits exclude every
// candidate. Ties resolve to the smallest root feature, then smallest left
// feature, then smallest right feature.
std::optional<Depth2Solution> solve_depth2(const LeafCostTable& table,
                                           const SolverConfig& cfg);

// Reference solver that recounts every candidate by routing datapoints
// directly; shares the tie-break. Used as the oracle for solve_depth2.
std::optional<Depth2Solution> brute_force_depth2(const BinaryDataset& ds,
                                                 const NodeSubset& subset,
                                                 LossKind kind, const SolverConfig& cfg,
                                                 std::int64_t norm_n);

// The selection constraint system for p features: one row choosing the first
// second-level split, one row choosing the other, and p rows coupling both
// choices to the same root feature.
struct ConstraintMatrix {
    enum class RowKind { select_left, select_right, couple };
    std::int64_t p = 0;
    std::int64_t rows = 0;
    std::int64_t cols = 0;  // 2 * p^2, left-pair block then right-pair block
    std::vector<RowKind> row_kind;
    std::vector<std::int8_t> a;  // dense, rows * cols

    std::int8_t at(std::int64_t r, std::int64_t c) const { return a[r * cols + c]; }
};

ConstraintMatrix build_constraint_matrix(std::int64_t p);

struct TuCheck {
    bool total_unimodular = false;
    std::vector<std::int64_t> partition_m1;  // row ids
    std::vector<std::int64_t> partition_m2;
    std::int64_t violating_column = -1;
};

// Verifies the sufficient conditions for total unimodularity (entries in
// {-1,0,1}, at most two nonzeros per column, and a row partition balancing
// every two-entry column), returning the witness partition.
TuCheck check_total_unimodularity(std::int64_t p);

}  // namespace rolltree
