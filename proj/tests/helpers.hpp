#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "rolltree/dataset.hpp"
#include "rolltree/loss.hpp"

namespace testutil {

// The four-datapoint demo set with its three binary features kept as plain
// 0/1 columns, skipping the one-hot expansion. Classes: A = 0, B = 1.
inline rolltree::BinaryDataset toy_p3() {
    rolltree::BinaryDataset ds;
    ds.n = 4;
    ds.p = 3;
    ds.n_classes = 2;
    ds.x = {1, 0, 1,
            1, 0, 0,
            0, 0, 1,
            1, 1, 1};
    ds.y = {0, 1, 1, 1};
    ds.feature_names = {"x1", "x2", "x3"};
    ds.class_names = {"A", "B"};
    ds.validate();
    return ds;
}

// Seeded random instance with every class forced present.
inline rolltree::BinaryDataset random_dataset(std::int64_t n, std::int64_t p,
                                              int n_classes, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    rolltree::BinaryDataset ds;
    ds.n = n;
    ds.p = p;
    ds.n_classes = n_classes;
    ds.x.resize(static_cast<std::size_t>(n * p));
    ds.y.resize(static_cast<std::size_t>(n));
    for (auto& v : ds.x) v = static_cast<std::uint8_t>(rng() % 2);
    for (auto& v : ds.y) v = static_cast<std::int32_t>(rng() % n_classes);
    for (int c = 0; c < n_classes && c < n; ++c) ds.y[c] = c;
    for (std::int64_t j = 0; j < p; ++j)
        ds.feature_names.push_back("f" + std::to_string(j));
    for (int c = 0; c < n_classes; ++c) ds.class_names.push_back(std::to_string(c));
    ds.validate();
    return ds;
}

inline rolltree::NodeSubset subset_of(std::vector<std::uint32_t> indices) {
    rolltree::NodeSubset subset;
    subset.indices = std::move(indices);
    return subset;
}

inline std::vector<std::uint32_t> all_rows(const rolltree::BinaryDataset& ds) {
    std::vector<std::uint32_t> rows(static_cast<std::size_t>(ds.n));
    for (std::int64_t i = 0; i < ds.n; ++i) rows[i] = static_cast<std::uint32_t>(i);
    return rows;
}

}  // namespace testutil
