#include "rolltree/depth3.hpp"

#include <algorithm>
#include <stdexcept>

namespace rolltree {

namespace {

// Depth-2 subproblem on one half, with the half's leaf costs normalized by
// the parent subset size so the two halves' objectives are addable.
struct HalfResult {
    bool feasible = false;
    std::int64_t feature = 0;
    std::int64_t leaf_a = 0;
    std::int64_t leaf_b = 0;
    double objective = 0.0;
};

HalfResult solve_half(const BinaryDataset& ds, const std::vector<std::uint32_t>& indices,
                      LossKind kind, const SolverConfig& cfg, std::int64_t norm_n,
                      int threads) {
    HalfResult res;
    if (indices.empty()) {
        // Degenerate empty half: zero cost, lexicographically first features.
        // Positive size minimums can never hold on an empty half.
        res.feasible = cfg.min_leaf <= 0 && cfg.min_internal <= 0;
        return res;
    }
    NodeSubset subset;
    subset.indices = indices;
    const auto table = build_cost_table(ds, subset, kind, norm_n, threads);
    const auto sol = solve_depth2(table, cfg);
    if (!sol) return res;
    res.feasible = true;
    res.feature = sol->root_feature;
    res.leaf_a = sol->left_feature;
    res.leaf_b = sol->right_feature;
    res.objective = sol->objective;
    return res;
}

}  // namespace

std::optional<Depth3Solution> solve_depth3(const BinaryDataset& ds, const NodeSubset& subset,
                                           LossKind kind, const SolverConfig& cfg,
                                           std::int64_t norm_n, int threads) {
    const std::int64_t n_sub = static_cast<std::int64_t>(subset.indices.size());
    if (n_sub == 0) throw std::invalid_argument("solve_depth3: empty subset");

    std::optional<Depth3Solution> best;
    std::vector<std::uint32_t> side0, side1;
    for (std::int64_t i = 0; i < ds.p; ++i) {
        side0.clear();
        side1.clear();
        for (auto row : subset.indices)
            (ds.at(row, i) ? side1 : side0).push_back(row);
        const auto n0 = static_cast<std::int64_t>(side0.size());
        if (cfg.min_internal > std::min(n0, n_sub - n0)) continue;

        const auto left = solve_half(ds, side0, kind, cfg, norm_n, threads);
        if (!left.feasible) continue;
        const auto right = solve_half(ds, side1, kind, cfg, norm_n, threads);
        if (!right.feasible) continue;

        const double objective = left.objective + right.objective;
        if (!best || objective < best->objective) {
            best = Depth3Solution{i, left.feature, right.feature,
                                  {left.leaf_a, left.leaf_b, right.leaf_a, right.leaf_b},
                                  objective};
        }
    }
    return best;
}

Depth3Solution brute_force_depth3(const BinaryDataset& ds, const NodeSubset& subset,
                                  LossKind kind, std::int64_t norm_n, std::int64_t max_p) {
    if (ds.p > max_p)
        throw std::invalid_argument("brute_force_depth3: p exceeds the enumeration bound");
    if (subset.indices.empty())
        throw std::invalid_argument("brute_force_depth3: empty subset");
    const std::int64_t p = ds.p;

    // The candidate space factors per root feature into the two halves, and
    // within a half into the level-2 feature and its two leaf splits, so the
    // scan walks the tuple positions in order and keeps first strict minima;
    // this reproduces the lexicographic tie-break over whole 7-tuples.
    struct HalfBest {
        std::int64_t feature = 0, leaf_a = 0, leaf_b = 0;
        double objective = 0.0;
        bool set = false;
    };
    auto best_half = [&](const std::vector<std::uint32_t>& half) {
        HalfBest best;
        if (half.empty()) {
            best.set = true;
            return best;
        }
        std::vector<std::uint32_t> h0, h1;
        for (std::int64_t j = 0; j < p; ++j) {
            h0.clear();
            h1.clear();
            for (auto row : half)
                (ds.at(row, j) ? h1 : h0).push_back(row);

            auto best_leaf_pair = [&](const std::vector<std::uint32_t>& quarter) {
                std::pair<std::int64_t, double> bestk{0, 0.0};
                bool set = false;
                for (std::int64_t k = 0; k < p; ++k) {
                    RuleCounts c0, c1;
                    c0.per_class.assign(ds.n_classes, 0);
                    c1.per_class.assign(ds.n_classes, 0);
                    for (auto row : quarter) {
                        auto& rc = ds.at(row, k) ? c1 : c0;
                        ++rc.per_class[ds.y[row]];
                        ++rc.total;
                    }
                    const double c = leaf_cost(c0, norm_n, kind) + leaf_cost(c1, norm_n, kind);
                    if (!set || c < bestk.second) {
                        bestk = {k, c};
                        set = true;
                    }
                }
                return bestk;
            };
            const auto a = best_leaf_pair(h0);
            const auto b = best_leaf_pair(h1);
            const double objective = a.second + b.second;
            if (!best.set || objective < best.objective) {
                best = {j, a.first, b.first, objective, true};
            }
        }
        return best;
    };

    Depth3Solution out;
    bool set = false;
    std::vector<std::uint32_t> side0, side1;
    for (std::int64_t i = 0; i < p; ++i) {
        side0.clear();
        side1.clear();
        for (auto row : subset.indices)
            (ds.at(row, i) ? side1 : side0).push_back(row);
        const auto left = best_half(side0);
        const auto right = best_half(side1);
        const double objective = left.objective + right.objective;
        if (!set || objective < out.objective) {
            out = {i, left.feature, right.feature,
                   {left.leaf_a, left.leaf_b, right.leaf_a, right.leaf_b}, objective};
            set = true;
        }
    }
    return out;
}

}  // namespace rolltree
