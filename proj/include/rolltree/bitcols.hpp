#pragma once

#include <bit>
#include <cstdint>
#include <vector>

#include "rolltree/dataset.hpp"

namespace rolltree {

// Column-wise packed bit representation of a BinaryDataset plus one bitmask
// per class. All counting in the cost precompute reduces to AND + popcount
// over 64-bit words.
struct BitColumns {
    std::int64_t n_rows = 0;
    std::int64_t words = 0;  // words per column
    std::int64_t p = 0;
    int n_classes = 0;
    std::vector<std::uint64_t> col_bits;    // p * words
    std::vector<std::uint64_t> class_bits;  // n_classes * words

    const std::uint64_t* col(std::int64_t j) const { return col_bits.data() + j * words; }
    const std::uint64_t* cls(int c) const { return class_bits.data() + c * words; }
};

BitColumns build_bit_columns(const BinaryDataset& ds);

std::vector<std::uint64_t> subset_mask(const BitColumns& bc,
                                       const std::vector<std::uint32_t>& indices);

inline std::int64_t popcount_words(const std::uint64_t* a, std::int64_t words) {
    std::int64_t total = 0;
    for (std::int64_t w = 0; w < words; ++w) total += std::popcount(a[w]);
    return total;
}

inline std::int64_t popcount_and(const std::uint64_t* a, const std::uint64_t* b,
                                 std::int64_t words) {
    std::int64_t total = 0;
    for (std::int64_t w = 0; w < words; ++w) total += std::popcount(a[w] & b[w]);
    return total;
}

}  // namespace rolltree
