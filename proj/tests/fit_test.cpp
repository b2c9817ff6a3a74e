#include <array>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "helpers.hpp"
#include "rolltree/datasets.hpp"
#include "rolltree/fit.hpp"

using namespace rolltree;

namespace {

std::vector<int> predictions(const DecisionTree& tree, const BinaryDataset& ds) {
    std::vector<int> out;
    for (std::int64_t i = 0; i < ds.n; ++i) out.push_back(predict_row(tree, ds, i));
    return out;
}

std::int32_t leaf_of(const DecisionTree& tree, const BinaryDataset& ds, std::int64_t row) {
    std::int32_t at = 0;
    while (!tree.nodes[at].is_leaf()) {
        const auto& node = tree.nodes[at];
        at = ds.at(row, node.split_feature) ? node.right : node.left;
    }
    return at;
}

// Training loss of the committed tree: sum of leaf costs over routed rows.
double tree_loss(const DecisionTree& tree, const BinaryDataset& ds, LossKind kind) {
    std::map<std::int32_t, RuleCounts> buckets;
    for (std::int64_t i = 0; i < ds.n; ++i) {
        RuleCounts& c = buckets[leaf_of(tree, ds, i)];
        if (c.per_class.empty()) c.per_class.assign(ds.n_classes, 0);
        ++c.per_class[ds.y[i]];
        ++c.total;
    }
    double total = 0.0;
    for (const auto& [id, counts] : buckets) total += leaf_cost(counts, ds.n, kind);
    return total;
}

FitConfig config_for(const char* method, int d_max) {
    FitConfig cfg;
    cfg.d_max = d_max;
    if (std::string(method) == "cart") cfg.lookahead = 1;
    if (std::string(method) == "rst3") cfg.lookahead = 3;
    return cfg;
}

}  // namespace

TEST_CASE("two-step gini at depth 2 commits the demo set's exact optimum") {
    const BinaryDataset ds = testutil::toy_p3();
    FitConfig cfg;
    cfg.d_max = 2;
    cfg.loss = LossKind::gini;
    FitInfo info;
    const DecisionTree tree = fit_tree(ds, cfg, &info);
    CHECK(tree.depth() == 2);
    CHECK(tree.leaf_count() == 3);
    CHECK(tree.nodes[0].split_feature == 0);
    CHECK(evaluate_accuracy(tree, ds) == 0.75);
    CHECK(predictions(tree, ds) == std::vector<int>{0, 0, 1, 1});
    CHECK(info.nodes_processed == 1);
    CHECK(info.premature_terminations == 0);
}

TEST_CASE("two-step gini at depth 3 separates the demo set perfectly") {
    const BinaryDataset ds = testutil::toy_p3();
    FitConfig cfg;
    cfg.d_max = 3;
    cfg.loss = LossKind::gini;
    FitInfo info;
    const DecisionTree tree = fit_tree(ds, cfg, &info);
    CHECK(evaluate_accuracy(tree, ds) == 1.0);
    CHECK(tree.depth() == 3);
    CHECK(tree.leaf_count() == 4);
    CHECK(tree.nodes[0].split_feature == 0);
    CHECK(info.nodes_processed == 2);
    CHECK(info.premature_at_root == false);
}

TEST_CASE("misclassification closes the demo set's root prematurely") {
    const BinaryDataset ds = testutil::toy_p3();
    for (const int d_max : {2, 3}) {
        FitConfig cfg;
        cfg.d_max = d_max;
        cfg.loss = LossKind::misclassification;
        FitInfo info;
        const DecisionTree tree = fit_tree(ds, cfg, &info);
        REQUIRE(tree.nodes.size() == 1);
        CHECK(tree.nodes[0].label == 1);
        CHECK(tree.nodes[0].class_counts == std::vector<std::int64_t>{1, 3});
        CHECK(evaluate_accuracy(tree, ds) == 0.75);
        CHECK(info.premature_terminations == 1);
        CHECK(info.premature_at_root);
        CHECK(info.nodes_processed == 1);
    }
}

TEST_CASE("three-step lookahead sees past the premature stop") {
    const BinaryDataset ds = testutil::toy_p3();
    FitConfig cfg = config_for("rst3", 3);
    cfg.loss = LossKind::misclassification;
    FitInfo info;
    const DecisionTree tree = fit_tree(ds, cfg, &info);
    CHECK(evaluate_accuracy(tree, ds) == 1.0);
    CHECK(tree.depth() == 3);
    CHECK(info.premature_terminations == 0);
    CHECK(info.nodes_processed == 1);
}

TEST_CASE("allowing no-improvement subtrees disables the premature stop") {
    const BinaryDataset ds = testutil::toy_p3();
    FitConfig cfg;
    cfg.d_max = 2;
    cfg.loss = LossKind::misclassification;
    cfg.solver.allow_no_improvement = true;
    FitInfo info;
    const DecisionTree tree = fit_tree(ds, cfg, &info);
    // The winning candidate repeats the root feature at both second-level
    // splits, so the empty sides collapse and a real depth-1 split remains.
    CHECK(tree.depth() == 1);
    CHECK(tree.nodes.size() == 3);
    CHECK(info.premature_terminations == 0);
    CHECK(evaluate_accuracy(tree, ds) == 0.75);
}

TEST_CASE("one-step gini grows the classic greedy tree on the one-hot demo set") {
    const auto [ds, schema] = binarize(toy_dataset());
    (void)schema;
    FitConfig cfg = config_for("cart", 2);
    cfg.loss = LossKind::gini;
    const DecisionTree tree = fit_tree(ds, cfg);
    CHECK(tree.depth() == 2);
    CHECK(tree.leaf_count() == 3);
    CHECK(tree.nodes[0].split_feature == 0);
    CHECK(tree.nodes[1].split_feature == 2);
    CHECK(predictions(tree, ds) == std::vector<int>{0, 0, 1, 1});
    CHECK(evaluate_accuracy(tree, ds) == 0.75);
}

TEST_CASE("one-step misclassification also stops at the demo set's root") {
    const auto [ds, schema] = binarize(toy_dataset());
    (void)schema;
    FitConfig cfg = config_for("cart", 2);
    cfg.loss = LossKind::misclassification;
    FitInfo info;
    const DecisionTree tree = fit_tree(ds, cfg, &info);
    CHECK(tree.nodes.size() == 1);
    CHECK(info.premature_at_root);
}

TEST_CASE("a depth-2 fit is exactly one committed subproblem optimum") {
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        const BinaryDataset ds =
            testutil::random_dataset(40, 6, 2 + static_cast<int>(seed % 2), seed * 7);
        const NodeSubset all = full_subset(ds);
        const RuleCounts root = count_classes(ds, all.indices);
        for (const LossKind kind : {LossKind::gini, LossKind::misclassification}) {
            const LeafCostTable table = build_cost_table(ds, all, kind, ds.n);
            const auto sol = solve_depth2(table, SolverConfig{});
            REQUIRE(sol);

            FitConfig cfg;
            cfg.d_max = 2;
            cfg.loss = kind;
            const DecisionTree tree = fit_tree(ds, cfg);

            std::array<RuleCounts, 4> cells;
            std::int64_t shape_wrong = 0;
            for (int r = 0; r < 2; ++r) {
                for (int s = 0; s < 2; ++s) {
                    const std::int64_t second =
                        r ? sol->right_feature : sol->left_feature;
                    cells[r * 2 + s] =
                        rule_counts(ds, all, sol->root_feature, second, r, s);
                    shape_wrong += misclassified(cells[r * 2 + s]);
                }
            }
            const bool premature = kind == LossKind::misclassification &&
                                   shape_wrong >= misclassified(root);
            for (std::int64_t i = 0; i < ds.n; ++i) {
                int expect;
                if (premature) {
                    expect = majority_class(root);
                } else {
                    const int r = ds.at(i, sol->root_feature);
                    const std::int64_t second =
                        r ? sol->right_feature : sol->left_feature;
                    const int s = ds.at(i, second);
                    expect = majority_class(cells[r * 2 + s]);
                }
                CHECK(predict_row(tree, ds, i) == expect);
            }
        }
    }
}

TEST_CASE("grown trees respect the depth budget") {
    for (std::uint64_t seed = 1; seed <= 4; ++seed) {
        const BinaryDataset ds = testutil::random_dataset(60, 5, 2, 200 + seed);
        for (const char* method : {"cart", "rst", "rst3"}) {
            for (int d_max = 1; d_max <= 4; ++d_max) {
                FitConfig cfg = config_for(method, d_max);
                const DecisionTree tree = fit_tree(ds, cfg);
                CHECK(tree.depth() <= d_max);
            }
        }
    }
}

TEST_CASE("fits are deterministic and independent of the thread count") {
    const BinaryDataset ds = testutil::random_dataset(120, 8, 2, 33);
    FitConfig cfg;
    cfg.d_max = 4;
    cfg.loss = LossKind::gini;
    const std::string once = tree_to_json(fit_tree(ds, cfg));
    CHECK(tree_to_json(fit_tree(ds, cfg)) == once);
    cfg.threads = 4;
    CHECK(tree_to_json(fit_tree(ds, cfg)) == once);
}

TEST_CASE("committed training errors never increase along a misclassification fit") {
    for (const int lookahead : {1, 2}) {
        const BinaryDataset ds = testutil::random_dataset(150, 8, 2, 91);
        FitConfig cfg;
        cfg.d_max = 6;
        cfg.lookahead = lookahead;
        cfg.loss = LossKind::misclassification;
        FitInfo info;
        info.collect_misclass_trace = true;
        const DecisionTree tree = fit_tree(ds, cfg, &info);
        REQUIRE(static_cast<int>(info.misclass_trace.size()) == info.nodes_processed);
        REQUIRE(!info.misclass_trace.empty());
        for (std::size_t i = 1; i < info.misclass_trace.size(); ++i)
            CHECK(info.misclass_trace[i] <= info.misclass_trace[i - 1]);
        CHECK(info.misclass_trace.back() ==
              count_misclassified(tree, ds, testutil::all_rows(ds)));
    }
}

TEST_CASE("exact depth-2 misclassification never trains worse than greedy") {
    for (std::uint64_t seed = 1; seed <= 8; ++seed) {
        const BinaryDataset ds = testutil::random_dataset(120, 8, 2, 300 + seed);
        FitConfig exact;
        exact.d_max = 2;
        exact.loss = LossKind::misclassification;
        FitConfig greedy = exact;
        greedy.lookahead = 1;
        const auto rows = testutil::all_rows(ds);
        CHECK(count_misclassified(fit_tree(ds, exact), ds, rows) <=
              count_misclassified(fit_tree(ds, greedy), ds, rows));
    }
}

TEST_CASE("exact depth-2 gini never commits a worse gini loss than greedy") {
    for (std::uint64_t seed = 1; seed <= 8; ++seed) {
        const BinaryDataset ds = testutil::random_dataset(120, 8, 2, 400 + seed);
        FitConfig exact;
        exact.d_max = 2;
        exact.loss = LossKind::gini;
        FitConfig greedy = exact;
        greedy.lookahead = 1;
        const double exact_loss = tree_loss(fit_tree(ds, exact), ds, LossKind::gini);
        const double greedy_loss = tree_loss(fit_tree(ds, greedy), ds, LossKind::gini);
        CHECK(exact_loss <= greedy_loss + 1e-12);
    }
}

TEST_CASE("the hybrid strategy switches loss at depth six") {
    FitConfig cfg;
    cfg.strategy = FitConfig::Strategy::hybrid;
    cfg.loss = LossKind::gini;  // ignored by the hybrid rule
    for (int d = 1; d <= 5; ++d) {
        cfg.d_max = d;
        CHECK(effective_loss(cfg) == LossKind::misclassification);
    }
    for (int d = 6; d <= 9; ++d) {
        cfg.d_max = d;
        CHECK(effective_loss(cfg) == LossKind::gini);
    }
    FitConfig fixed;
    fixed.d_max = 8;
    fixed.loss = LossKind::misclassification;
    CHECK(effective_loss(fixed) == LossKind::misclassification);

    const BinaryDataset ds = testutil::random_dataset(80, 6, 2, 4);
    FitConfig shallow;
    shallow.d_max = 5;
    shallow.loss = LossKind::misclassification;
    CHECK(tree_to_json(fit_hybrid(ds, 5)) == tree_to_json(fit_tree(ds, shallow)));
    FitConfig deep;
    deep.d_max = 6;
    deep.loss = LossKind::gini;
    CHECK(tree_to_json(fit_hybrid(ds, 6)) == tree_to_json(fit_tree(ds, deep)));
}

TEST_CASE("a pure training subset is a single leaf") {
    const BinaryDataset ds = testutil::toy_p3();
    FitConfig cfg;
    cfg.d_max = 3;
    const DecisionTree tree = fit_tree(ds, {1, 2}, cfg);
    REQUIRE(tree.nodes.size() == 1);
    CHECK(tree.nodes[0].label == 1);
    CHECK(tree.nodes[0].class_counts == std::vector<std::int64_t>{0, 2});
}

TEST_CASE("a subset fit only sees its own rows") {
    const BinaryDataset ds = testutil::toy_p3();
    FitConfig cfg;
    cfg.d_max = 3;
    cfg.loss = LossKind::gini;
    const DecisionTree tree = fit_tree(ds, {0, 1, 2}, cfg);
    std::vector<std::int64_t> sums(2, 0);
    for (const auto& node : tree.nodes)
        if (node.is_leaf())
            for (std::size_t c = 0; c < sums.size(); ++c)
                sums[c] += node.class_counts[c];
    CHECK(sums == std::vector<std::int64_t>{1, 2});
}

TEST_CASE("an infeasible root solve closes the tree as a leaf") {
    const BinaryDataset ds = testutil::toy_p3();
    FitConfig cfg;
    cfg.d_max = 2;
    cfg.loss = LossKind::gini;
    cfg.solver.min_leaf = 3;
    FitInfo info;
    const DecisionTree tree = fit_tree(ds, cfg, &info);
    CHECK(tree.nodes.size() == 1);
    CHECK(info.infeasible_closures == 1);
    CHECK(info.premature_terminations == 0);
}

TEST_CASE("configuration validation rejects unusable settings") {
    const BinaryDataset ds = testutil::toy_p3();
    FitConfig cfg;
    cfg.d_max = 0;
    CHECK_THROWS_AS(fit_tree(ds, cfg), std::invalid_argument);
    cfg = FitConfig{};
    cfg.lookahead = 4;
    CHECK_THROWS_AS(fit_tree(ds, cfg), std::invalid_argument);
    cfg = FitConfig{};
    cfg.threads = 0;
    CHECK_THROWS_AS(fit_tree(ds, cfg), std::invalid_argument);
    cfg = FitConfig{};
    cfg.strategy = FitConfig::Strategy::hybrid;
    cfg.lookahead = 1;
    CHECK_THROWS_AS(fit_tree(ds, cfg), std::invalid_argument);
    cfg = FitConfig{};
    CHECK_THROWS_AS(fit_tree(ds, std::vector<std::uint32_t>{}, cfg),
                    std::invalid_argument);
    BinaryDataset unlabeled = ds;
    unlabeled.y.clear();
    CHECK_THROWS_AS(fit_tree(unlabeled, cfg), std::invalid_argument);
}

TEST_CASE("nodes and depths are breadth-first after finalization") {
    const BinaryDataset ds = testutil::random_dataset(200, 7, 2, 55);
    FitConfig cfg;
    cfg.d_max = 5;
    cfg.loss = LossKind::gini;
    const DecisionTree tree = fit_tree(ds, cfg);
    for (std::size_t id = 0; id < tree.nodes.size(); ++id) {
        const auto& node = tree.nodes[id];
        if (node.is_leaf()) continue;
        CHECK(node.left > static_cast<std::int32_t>(id));
        CHECK(node.right == node.left + 1);
        CHECK(tree.nodes[node.left].depth == node.depth + 1);
        CHECK(tree.nodes[node.right].depth == node.depth + 1);
    }
    for (std::size_t id = 1; id < tree.nodes.size(); ++id)
        CHECK(tree.nodes[id].depth >= tree.nodes[id - 1].depth);
}
