#pragma once

#include <array>
#include <cstdint>
#include <optional>

#include "rolltree/depth2.hpp"
#include "rolltree/loss.hpp"

namespace rolltree {

struct Depth3Solution {
    std::int64_t root_feature = -1;
    std::int64_t left_feature = -1;             // level-2 split on x_root = 0
    std::int64_t right_feature = -1;            // level-2 split on x_root = 1
    std::array<std::int64_t, 4> leaf_features{};  // level-3 splits, (0,0) (0,1) (1,0) (1,1)
    double objective = 0.0;
};

// Exact minimizer over all depth-3 trees: each root feature splits the subset
// into halves that reduce to independent depth-2 subproblems, both normalized
// by the parent subset size so the halves' objectives add up. min_internal
// also applies to the root split (smaller half).
std::optional<Depth3Solution> solve_depth3(const BinaryDataset& ds, const NodeSubset& subset,
                                           LossKind kind, const SolverConfig& cfg,
                                           std::int64_t norm_n, int threads = 1);

// Routing-based reference solver over the full 7-feature candidate space with
// the shared tie-break. Unconstrained; refuses p beyond max_p.
Depth3Solution brute_force_depth3(const BinaryDataset& ds, const NodeSubset& subset,
                                  LossKind kind, std::int64_t norm_n,
                                  std::int64_t max_p = 6);

}  // namespace rolltree
