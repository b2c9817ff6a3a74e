#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rolltree/dataset.hpp"
#include "rolltree/loss.hpp"

namespace rolltree {

// Arena node. Internal nodes route x[split_feature] = 0 left and 1 right;
// leaves carry the training class histogram and the majority label.
struct TreeNode {
    std::int32_t split_feature = -1;  // -1 marks a leaf
    std::int32_t left = -1;
    std::int32_t right = -1;
    std::int32_t depth = 0;
    std::int32_t label = -1;
    std::vector<std::int64_t> class_counts;

    bool is_leaf() const { return split_feature < 0; }
};

struct DecisionTree {
    std::vector<TreeNode> nodes;  // node 0 is the root, ids breadth-first
    std::int64_t n_features = 0;
    std::vector<std::string> feature_names;
    std::vector<std::string> class_names;
    std::optional<BinarizationSchema> schema;

    int depth() const;
    std::int64_t leaf_count() const;
};

int predict(const DecisionTree& tree, const std::vector<std::uint8_t>& x);
int predict_row(const DecisionTree& tree, const BinaryDataset& ds, std::int64_t row);

// Fraction of subset rows whose predicted label matches y. An empty subset
// evaluates to 1.0 with a warning on stderr.
double evaluate_accuracy(const DecisionTree& tree, const BinaryDataset& ds,
                         const std::vector<std::uint32_t>& subset);
double evaluate_accuracy(const DecisionTree& tree, const BinaryDataset& ds);

std::int64_t count_misclassified(const DecisionTree& tree, const BinaryDataset& ds,
                                 const std::vector<std::uint32_t>& subset);

std::string tree_to_json(const DecisionTree& tree);
DecisionTree tree_from_json(const std::string& text);

}  // namespace rolltree
