#include "rolltree/depth2.hpp"

#include <algorithm>
#include <stdexcept>

namespace rolltree {

namespace {

// One side of a candidate root split: the best second-level feature by leaf
// cost sum, scanning ascending so the first strict improvement wins ties.
struct SideBest {
    std::int64_t feature = -1;
    double cost = 0.0;
    double cost_a = 0.0;  // leaf with the second feature = 0 (left side) / = 1 kept apart
    double cost_b = 0.0;
};

}  // namespace

std::optional<Depth2Solution> solve_depth2(const LeafCostTable& table,
                                           const SolverConfig& cfg) {
    const std::int64_t p = table.p;
    const std::int64_t n_sub = table.subset_size;
    if (n_sub <= 0) throw std::invalid_argument("solve_depth2: empty table");

    std::optional<Depth2Solution> best;
    for (std::int64_t j = 0; j < p; ++j) {
        const std::int64_t nj = table.n_root[j];
        if (cfg.min_internal > std::min(nj, n_sub - nj)) continue;

        SideBest left, right;
        left.cost = right.cost = 0.0;
        for (std::int64_t k = 0; k < p; ++k) {
            const std::int64_t njk0 = table.n_pair0[j * p + k];
            if (cfg.min_leaf <= std::min(njk0, nj - njk0)) {
                const double c00 = table.at(j, k, 0, 0);
                const double c01 = table.at(j, k, 0, 1);
                const double c = c00 + c01;
                if (left.feature < 0 || c < left.cost) left = {k, c, c00, c01};
            }
            const std::int64_t njl1 = table.n_pair1[j * p + k];
            if (cfg.min_leaf <= std::min(njl1, (n_sub - nj) - njl1)) {
                const double c10 = table.at(j, k, 1, 0);
                const double c11 = table.at(j, k, 1, 1);
                const double c = c10 + c11;
                if (right.feature < 0 || c < right.cost) right = {k, c, c10, c11};
            }
        }
        if (left.feature < 0 || right.feature < 0) continue;

        const double objective = left.cost + right.cost;
        if (!best || objective < best->objective) {
            best = Depth2Solution{j, left.feature, right.feature, objective,
                                  {left.cost_a, left.cost_b, right.cost_a, right.cost_b}};
        }
    }
    return best;
}

std::optional<Depth2Solution> brute_force_depth2(const BinaryDataset& ds,
                                                 const NodeSubset& subset,
                                                 LossKind kind, const SolverConfig& cfg,
                                                 std::int64_t norm_n) {
    const std::int64_t p = ds.p;
    const std::int64_t n_sub = static_cast<std::int64_t>(subset.indices.size());
    if (n_sub == 0) throw std::invalid_argument("brute_force_depth2: empty subset");

    std::optional<Depth2Solution> best;
    std::vector<std::uint32_t> side0, side1;
    for (std::int64_t j = 0; j < p; ++j) {
        side0.clear();
        side1.clear();
        for (auto i : subset.indices)
            (ds.at(i, j) ? side1 : side0).push_back(i);
        const std::int64_t nj = static_cast<std::int64_t>(side0.size());
        if (cfg.min_internal > std::min(nj, n_sub - nj)) continue;

        SideBest left, right;
        for (std::int64_t k = 0; k < p; ++k) {
            RuleCounts c0, c1;
            c0.per_class.assign(ds.n_classes, 0);
            c1.per_class.assign(ds.n_classes, 0);
            for (auto i : side0) {
                auto& rc = ds.at(i, k) ? c1 : c0;
                ++rc.per_class[ds.y[i]];
                ++rc.total;
            }
            if (cfg.min_leaf <= std::min(c0.total, c1.total)) {
                const double ca = leaf_cost(c0, norm_n, kind);
                const double cb = leaf_cost(c1, norm_n, kind);
                const double c = ca + cb;
                if (left.feature < 0 || c < left.cost) left = {k, c, ca, cb};
            }

            c0.total = c1.total = 0;
            std::fill(c0.per_class.begin(), c0.per_class.end(), 0);
            std::fill(c1.per_class.begin(), c1.per_class.end(), 0);
            for (auto i : side1) {
                auto& rc = ds.at(i, k) ? c1 : c0;
                ++rc.per_class[ds.y[i]];
                ++rc.total;
            }
            if (cfg.min_leaf <= std::min(c1.total, c0.total)) {
                const double ca = leaf_cost(c0, norm_n, kind);
                const double cb = leaf_cost(c1, norm_n, kind);
                const double c = ca + cb;
                if (right.feature < 0 || c < right.cost) right = {k, c, ca, cb};
            }
        }
        if (left.feature < 0 || right.feature < 0) continue;

        const double objective = left.cost + right.cost;
        if (!best || objective < best->objective) {
            best = Depth2Solution{j, left.feature, right.feature, objective,
                                  {left.cost_a, left.cost_b, right.cost_a, right.cost_b}};
        }
    }
    return best;
}

ConstraintMatrix build_constraint_matrix(std::int64_t p) {
    if (p < 1) throw std::invalid_argument("build_constraint_matrix: p must be >= 1");
    ConstraintMatrix m;
    m.p = p;
    m.rows = 2 + p;
    m.cols = 2 * p * p;
    m.row_kind.resize(m.rows, ConstraintMatrix::RowKind::couple);
    m.row_kind[0] = ConstraintMatrix::RowKind::select_left;
    m.row_kind[1] = ConstraintMatrix::RowKind::select_right;
    m.a.assign(static_cast<std::size_t>(m.rows * m.cols), 0);
    for (std::int64_t j = 0; j < p; ++j) {
        for (std::int64_t k = 0; k < p; ++k) {
            const std::int64_t left_col = j * p + k;
            const std::int64_t right_col = p * p + j * p + k;
            m.a[0 * m.cols + left_col] = 1;
            m.a[1 * m.cols + right_col] = 1;
            m.a[(2 + j) * m.cols + left_col] = 1;
            m.a[(2 + j) * m.cols + right_col] = -1;
        }
    }
    return m;
}

TuCheck check_total_unimodularity(std::int64_t p) {
    const ConstraintMatrix m = build_constraint_matrix(p);
    TuCheck check;
    check.partition_m1 = {0};
    for (std::int64_t r = 1; r < m.rows; ++r) check.partition_m2.push_back(r);

    for (std::int64_t c = 0; c < m.cols; ++c) {
        int nonzeros = 0;
        std::int64_t sum_m1 = 0, sum_m2 = 0;
        for (std::int64_t r = 0; r < m.rows; ++r) {
            const std::int8_t v = m.at(r, c);
            if (v == 0) continue;
            if (v != 1 && v != -1) {
                check.violating_column = c;
                return check;
            }
            ++nonzeros;
            (r == 0 ? sum_m1 : sum_m2) += v;
        }
        if (nonzeros > 2 || (nonzeros == 2 && sum_m1 != sum_m2)) {
            check.violating_column = c;
            return check;
        }
    }
    check.total_unimodular = true;
    return check;
}

}  // namespace rolltree
