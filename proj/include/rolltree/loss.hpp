#pragma once

#include <cstdint>
#include <vector>

#include "rolltree/bitcols.hpp"
#include "rolltree/dataset.hpp"

namespace rolltree {

enum class LossKind { misclassification, gini };

const char* loss_name(LossKind kind);
LossKind loss_from_name(const std::string& name);

struct NodeSubset {
    std::vector<std::uint32_t> indices;  // ascending row ids
    int depth = 0;
};

NodeSubset full_subset(const BinaryDataset& ds);

struct RuleCounts {
    std::int64_t total = 0;
    std::vector<std::int64_t> per_class;
};

// Class histogram of the subset datapoints satisfying x_j = r AND x_k = s.
RuleCounts rule_counts(const BinaryDataset& ds, const NodeSubset& subset,
                       std::int64_t j, std::int64_t k, int r, int s);

RuleCounts count_classes(const BinaryDataset& ds, const std::vector<std::uint32_t>& indices);

// Majority class id, ties resolved toward the lowest id.
int majority_class(const RuleCounts& counts);
std::int64_t misclassified(const RuleCounts& counts);

// Normalized leaf loss. Empty counts cost zero under both losses.
double leaf_cost(const RuleCounts& counts, std::int64_t norm_n, LossKind kind);

// Every leaf cost c(j,k,r,s) for the two-level split pairs, with the side and
// pair counts the size filters need. Indexing: cost[(j*p+k)*4 + r*2 + s].
struct LeafCostTable {
    std::int64_t p = 0;
    std::int64_t norm_n = 0;
    std::int64_t subset_size = 0;
    LossKind kind = LossKind::misclassification;
    std::vector<double> cost;
    std::vector<std::int64_t> n_root;   // per j: subset count with x_j = 0
    std::vector<std::int64_t> n_pair0;  // per (j,k): count with x_j = 0 and x_k = 0
    std::vector<std::int64_t> n_pair1;  // per (j,l): count with x_j = 1 and x_l = 1

    double at(std::int64_t j, std::int64_t k, int r, int s) const {
        return cost[static_cast<std::size_t>((j * p + k) * 4 + r * 2 + s)];
    }
};

// The subset is packed into its own short bit columns first, so the cost of a
// table is proportional to the subset size, not the whole dataset.
LeafCostTable build_cost_table(const BinaryDataset& ds, const NodeSubset& subset,
                               LossKind kind, std::int64_t norm_n, int threads = 1);

}  // namespace rolltree
