#include <stdexcept>
#include <string>
#include <vector>

#include "doctest.h"
#include "helpers.hpp"
#include "rolltree/datasets.hpp"
#include "rolltree/fit.hpp"
#include "rolltree/tree.hpp"

using namespace rolltree;

namespace {

// Root split on f1; its zero side holds a leaf, its one side splits on f0.
DecisionTree handmade_tree() {
    DecisionTree tree;
    tree.n_features = 2;
    tree.feature_names = {"f0", "f1"};
    tree.class_names = {"no", "yes"};
    TreeNode root;
    root.split_feature = 1;
    root.left = 1;
    root.right = 2;
    TreeNode left;
    left.depth = 1;
    left.label = 0;
    left.class_counts = {3, 1};
    TreeNode inner;
    inner.split_feature = 0;
    inner.left = 3;
    inner.right = 4;
    inner.depth = 1;
    TreeNode a;
    a.depth = 2;
    a.label = 1;
    a.class_counts = {0, 2};
    TreeNode b;
    b.depth = 2;
    b.label = 0;
    b.class_counts = {2, 0};
    tree.nodes = {root, left, inner, a, b};
    return tree;
}

}  // namespace

TEST_CASE("prediction routes zero left and one right") {
    const DecisionTree tree = handmade_tree();
    CHECK(tree.depth() == 2);
    CHECK(tree.leaf_count() == 3);
    CHECK(predict(tree, {0, 0}) == 0);
    CHECK(predict(tree, {1, 0}) == 0);
    CHECK(predict(tree, {0, 1}) == 1);
    CHECK(predict(tree, {1, 1}) == 0);
    CHECK_THROWS_AS(predict(tree, {0, 1, 1}), std::invalid_argument);
}

TEST_CASE("accuracy evaluation counts subset mismatches") {
    const DecisionTree tree = handmade_tree();
    BinaryDataset ds;
    ds.n = 4;
    ds.p = 2;
    ds.n_classes = 2;
    ds.x = {0, 0, 1, 0, 0, 1, 1, 1};
    ds.y = {0, 0, 1, 1};
    ds.feature_names = {"f0", "f1"};
    ds.class_names = {"no", "yes"};
    CHECK(count_misclassified(tree, ds, {0, 1, 2, 3}) == 1);
    CHECK(evaluate_accuracy(tree, ds) == 0.75);
    CHECK(evaluate_accuracy(tree, ds, {0, 1, 2}) == 1.0);
    CHECK(evaluate_accuracy(tree, ds, {}) == 1.0);
}

TEST_CASE("trees round trip through json with predictions intact") {
    const BinaryDataset ds = testutil::toy_p3();
    FitConfig cfg;
    cfg.d_max = 3;
    cfg.lookahead = 2;
    cfg.loss = LossKind::gini;
    const DecisionTree tree = fit_tree(ds, cfg);
    const std::string text = tree_to_json(tree);
    const DecisionTree back = tree_from_json(text);
    CHECK(back.feature_names == tree.feature_names);
    CHECK(back.class_names == tree.class_names);
    CHECK(back.depth() == tree.depth());
    CHECK(back.leaf_count() == tree.leaf_count());
    CHECK(!back.schema);
    for (std::int64_t i = 0; i < ds.n; ++i)
        CHECK(predict_row(back, ds, i) == predict_row(tree, ds, i));
    // Serialization is deterministic.
    CHECK(tree_to_json(back) == text);
}

TEST_CASE("a stored schema survives the json round trip") {
    const auto [ds, schema] = binarize(toy_dataset());
    FitConfig cfg;
    cfg.d_max = 3;
    DecisionTree tree = fit_tree(ds, cfg);
    tree.schema = schema;
    const DecisionTree back = tree_from_json(tree_to_json(tree));
    REQUIRE(back.schema);
    CHECK(back.schema->total_columns == schema.total_columns);
    const BinaryDataset again = apply_schema(*back.schema, toy_dataset());
    CHECK(again.x == ds.x);
}

TEST_CASE("malformed tree documents are rejected") {
    const std::string good = tree_to_json(handmade_tree());

    SUBCASE("future format version") {
        std::string text = good;
        const auto at = text.find("\"format_version\": 1");
        REQUIRE(at != std::string::npos);
        text.replace(at, 19, "\"format_version\": 9");
        CHECK_THROWS_AS(tree_from_json(text), std::runtime_error);
    }
    SUBCASE("unknown leaf label") {
        std::string text = good;
        const auto at = text.find("\"label\": \"yes\"");
        REQUIRE(at != std::string::npos);
        text.replace(at, 14, "\"label\": \"maybe\"");
        CHECK_THROWS_AS(tree_from_json(text), std::runtime_error);
    }
    SUBCASE("unknown split feature") {
        std::string text = good;
        const auto at = text.find("\"split\": \"f0\"");
        REQUIRE(at != std::string::npos);
        text.replace(at, 13, "\"split\": \"f9\"");
        CHECK_THROWS_AS(tree_from_json(text), std::runtime_error);
    }
    SUBCASE("not json at all") {
        CHECK_THROWS(tree_from_json("not a tree"));
    }
}

TEST_CASE("structural validation walks the whole arena") {
    DecisionTree tree = handmade_tree();

    SUBCASE("a node referenced twice") {
        tree.nodes[2].left = 3;
        tree.nodes[2].right = 3;
        CHECK_THROWS_AS(tree_from_json(tree_to_json(tree)), std::runtime_error);
    }
    SUBCASE("a child link out of range") {
        tree.nodes[2].right = 9;
        CHECK_THROWS_AS(tree_from_json(tree_to_json(tree)), std::runtime_error);
    }
}

TEST_CASE("fitted leaves carry their class histograms and majority labels") {
    const BinaryDataset ds = testutil::toy_p3();
    FitConfig cfg;
    cfg.d_max = 3;
    const DecisionTree tree = fit_tree(ds, cfg);
    for (const auto& node : tree.nodes) {
        if (!node.is_leaf()) continue;
        REQUIRE(node.class_counts.size() == 2);
        std::int64_t best = node.class_counts[node.label];
        for (auto c : node.class_counts) CHECK(best >= c);
    }
    // Leaf histograms add up to the training set's.
    std::vector<std::int64_t> sums(2, 0);
    for (const auto& node : tree.nodes)
        if (node.is_leaf())
            for (std::size_t c = 0; c < sums.size(); ++c)
                sums[c] += node.class_counts[c];
    CHECK(sums == std::vector<std::int64_t>{1, 3});
}
