#include "rolltree/loss.hpp"

#include <numeric>
#include <stdexcept>
#include <thread>

namespace rolltree {

BitColumns build_bit_columns(const BinaryDataset& ds) {
    if (ds.y.empty())
        throw std::invalid_argument("build_bit_columns: dataset has no labels");
    BitColumns bc;
    bc.n_rows = ds.n;
    bc.p = ds.p;
    bc.n_classes = ds.n_classes;
    bc.words = (ds.n + 63) / 64;
    bc.col_bits.assign(static_cast<std::size_t>(bc.p * bc.words), 0);
    bc.class_bits.assign(static_cast<std::size_t>(bc.n_classes * bc.words), 0);
    for (std::int64_t i = 0; i < ds.n; ++i) {
        const std::uint64_t bit = 1ULL << (i & 63);
        const std::int64_t w = i >> 6;
        const std::uint8_t* row = ds.x.data() + i * ds.p;
        for (std::int64_t j = 0; j < ds.p; ++j)
            if (row[j]) bc.col_bits[static_cast<std::size_t>(j * bc.words + w)] |= bit;
        bc.class_bits[static_cast<std::size_t>(ds.y[i] * bc.words + w)] |= bit;
    }
    return bc;
}

std::vector<std::uint64_t> subset_mask(const BitColumns& bc,
                                       const std::vector<std::uint32_t>& indices) {
    std::vector<std::uint64_t> mask(static_cast<std::size_t>(bc.words), 0);
    for (auto i : indices) mask[i >> 6] |= 1ULL << (i & 63);
    return mask;
}

const char* loss_name(LossKind kind) {
    return kind == LossKind::gini ? "gini" : "misclassification";
}

LossKind loss_from_name(const std::string& name) {
    if (name == "gini") return LossKind::gini;
    if (name == "misclassification") return LossKind::misclassification;
    throw std::invalid_argument("unknown loss '" + name + "'");
}

NodeSubset full_subset(const BinaryDataset& ds) {
    NodeSubset subset;
    subset.indices.resize(ds.n);
    std::iota(subset.indices.begin(), subset.indices.end(), 0u);
    return subset;
}

RuleCounts rule_counts(const BinaryDataset& ds, const NodeSubset& subset,
                       std::int64_t j, std::int64_t k, int r, int s) {
    RuleCounts counts;
    counts.per_class.assign(ds.n_classes, 0);
    for (auto i : subset.indices) {
        if (ds.at(i, j) == r && ds.at(i, k) == s) {
            ++counts.per_class[ds.y[i]];
            ++counts.total;
        }
    }
    return counts;
}

RuleCounts count_classes(const BinaryDataset& ds, const std::vector<std::uint32_t>& indices) {
    RuleCounts counts;
    counts.per_class.assign(ds.n_classes, 0);
    for (auto i : indices) {
        ++counts.per_class[ds.y[i]];
        ++counts.total;
    }
    return counts;
}

int majority_class(const RuleCounts& counts) {
    int best = 0;
    for (std::size_t c = 1; c < counts.per_class.size(); ++c)
        if (counts.per_class[c] > counts.per_class[best]) best = static_cast<int>(c);
    return best;
}

std::int64_t misclassified(const RuleCounts& counts) {
    if (counts.total == 0) return 0;
    return counts.total - counts.per_class[majority_class(counts)];
}

double leaf_cost(const RuleCounts& counts, std::int64_t norm_n, LossKind kind) {
    if (norm_n <= 0) throw std::invalid_argument("leaf_cost: norm_n must be positive");
    if (counts.total == 0) return 0.0;
    if (kind == LossKind::misclassification) {
        return static_cast<double>(misclassified(counts)) / static_cast<double>(norm_n);
    }
    const double total = static_cast<double>(counts.total);
    double sum_sq = 0.0;
    for (auto c : counts.per_class) {
        const double frac = static_cast<double>(c) / total;
        sum_sq += frac * frac;
    }
    return (total / static_cast<double>(norm_n)) * (1.0 - sum_sq);
}

namespace {

// Repacks the subset rows into dense bit columns of their own, so every
// following popcount runs over ceil(|subset|/64) words.
BitColumns compact_columns(const BinaryDataset& ds,
                           const std::vector<std::uint32_t>& indices) {
    BitColumns bc;
    bc.n_rows = static_cast<std::int64_t>(indices.size());
    bc.p = ds.p;
    bc.n_classes = ds.n_classes;
    bc.words = (bc.n_rows + 63) / 64;
    bc.col_bits.assign(static_cast<std::size_t>(bc.p * bc.words), 0);
    bc.class_bits.assign(static_cast<std::size_t>(bc.n_classes * bc.words), 0);
    for (std::int64_t i = 0; i < bc.n_rows; ++i) {
        const std::uint64_t bit = 1ULL << (i & 63);
        const std::int64_t w = i >> 6;
        const std::uint8_t* row = ds.x.data() + static_cast<std::size_t>(indices[i]) * ds.p;
        for (std::int64_t j = 0; j < ds.p; ++j)
            if (row[j]) bc.col_bits[static_cast<std::size_t>(j * bc.words + w)] |= bit;
        bc.class_bits[static_cast<std::size_t>(ds.y[indices[i]] * bc.words + w)] |= bit;
    }
    return bc;
}

// Fills the table slice for root features [j_begin, j_end). For each (j, c)
// the subset splits into the class masks on each side of j; one AND+popcount
// against column k then yields all four (r, s) cells by subtraction.
void fill_cost_rows(const BitColumns& bc, LeafCostTable& table, std::int64_t j_begin,
                    std::int64_t j_end) {
    const std::int64_t words = bc.words;
    const std::int64_t p = bc.p;
    const int n_classes = bc.n_classes;

    std::vector<std::uint64_t> side0(static_cast<std::size_t>(n_classes * words));
    std::vector<std::uint64_t> side1(static_cast<std::size_t>(n_classes * words));
    std::vector<std::int64_t> side0_total(n_classes), side1_total(n_classes);
    RuleCounts cell[4];
    for (auto& rc : cell) rc.per_class.assign(n_classes, 0);

    for (std::int64_t j = j_begin; j < j_end; ++j) {
        const std::uint64_t* colj = bc.col(j);
        std::int64_t nj0 = 0;
        for (int c = 0; c < n_classes; ++c) {
            const std::uint64_t* cls = bc.cls(c);
            std::uint64_t* s0 = side0.data() + c * words;
            std::uint64_t* s1 = side1.data() + c * words;
            std::int64_t t0 = 0, t1 = 0;
            for (std::int64_t w = 0; w < words; ++w) {
                s1[w] = cls[w] & colj[w];
                s0[w] = cls[w] & ~colj[w];
                t0 += std::popcount(s0[w]);
                t1 += std::popcount(s1[w]);
            }
            side0_total[c] = t0;
            side1_total[c] = t1;
            nj0 += t0;
        }
        table.n_root[j] = nj0;

        for (std::int64_t k = 0; k < p; ++k) {
            const std::uint64_t* colk = bc.col(k);
            for (auto& rc : cell) {
                rc.total = 0;
                std::fill(rc.per_class.begin(), rc.per_class.end(), 0);
            }
            for (int c = 0; c < n_classes; ++c) {
                const std::int64_t c01 = popcount_and(side0.data() + c * words, colk, words);
                const std::int64_t c11 = popcount_and(side1.data() + c * words, colk, words);
                cell[0].per_class[c] = side0_total[c] - c01;
                cell[1].per_class[c] = c01;
                cell[2].per_class[c] = side1_total[c] - c11;
                cell[3].per_class[c] = c11;
            }
            for (auto& rc : cell)
                for (auto v : rc.per_class) rc.total += v;

            table.n_pair0[j * p + k] = cell[0].total;
            table.n_pair1[j * p + k] = cell[3].total;
            double* out = table.cost.data() + (j * p + k) * 4;
            for (int idx = 0; idx < 4; ++idx)
                out[idx] = leaf_cost(cell[idx], table.norm_n, table.kind);
        }
    }
}

}  // namespace

LeafCostTable build_cost_table(const BinaryDataset& ds, const NodeSubset& subset,
                               LossKind kind, std::int64_t norm_n, int threads) {
    if (subset.indices.empty())
        throw std::invalid_argument("build_cost_table: empty subset");
    if (norm_n <= 0) throw std::invalid_argument("build_cost_table: norm_n must be positive");
    if (ds.y.empty()) throw std::invalid_argument("build_cost_table: dataset has no labels");

    const BitColumns bc = compact_columns(ds, subset.indices);

    LeafCostTable table;
    table.p = bc.p;
    table.norm_n = norm_n;
    table.subset_size = bc.n_rows;
    table.kind = kind;
    table.cost.assign(static_cast<std::size_t>(bc.p * bc.p * 4), 0.0);
    table.n_root.assign(static_cast<std::size_t>(bc.p), 0);
    table.n_pair0.assign(static_cast<std::size_t>(bc.p * bc.p), 0);
    table.n_pair1.assign(static_cast<std::size_t>(bc.p * bc.p), 0);

    if (threads <= 1 || bc.p < 4) {
        fill_cost_rows(bc, table, 0, bc.p);
        return table;
    }
    const int workers = static_cast<int>(std::min<std::int64_t>(threads, bc.p));
    std::vector<std::thread> pool;
    for (int t = 0; t < workers; ++t) {
        const std::int64_t begin = bc.p * t / workers;
        const std::int64_t end = bc.p * (t + 1) / workers;
        pool.emplace_back(fill_cost_rows, std::cref(bc), std::ref(table), begin, end);
    }
    for (auto& th : pool) th.join();
    return table;
}

}  // namespace rolltree
