#pragma once

#include <cstdint>

#include "rolltree/dataset.hpp"

namespace rolltree {

// Four-datapoint demo set with three binary features and classes A/B.
RawDataset toy_dataset();

// All 958 legal final boards of noughts and crosses with x moving first; the
// class is whether x made three in a row.
RawDataset tictactoe_dataset();

// Rule-labeled datasets over the 432-point product domain a1..a6 with domain
// sizes 3,3,2,3,4,2. Problem 1: (a1 == a2) or (a5 == 1). Problem 2: exactly
// two attributes equal 1. The full domain is emitted once, plus a seeded
// duplicate sample of the historical training-set size (124 or 169).
RawDataset monks_dataset(int problem, std::uint64_t seed = 1);

}  // namespace rolltree
