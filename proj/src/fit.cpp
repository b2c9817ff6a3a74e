#include "rolltree/fit.hpp"

#include <algorithm>
#include <chrono>
#include <map>
#include <memory>
#include <set>
#include <stdexcept>

namespace rolltree {

LossKind effective_loss(const FitConfig& cfg) {
    if (cfg.strategy == FitConfig::Strategy::hybrid)
        return cfg.d_max <= 5 ? LossKind::misclassification : LossKind::gini;
    return cfg.loss;
}

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

// Solved subtree shape prior to installation; feature -1 marks a leaf.
struct Shape {
    std::int64_t feature = -1;
    std::unique_ptr<Shape> left;
    std::unique_ptr<Shape> right;
};

Shape leaf_shape() { return {}; }

Shape split_shape(std::int64_t f, Shape l, Shape r) {
    Shape s;
    s.feature = f;
    s.left = std::make_unique<Shape>(std::move(l));
    s.right = std::make_unique<Shape>(std::move(r));
    return s;
}

Shape shape_from(const Depth2Solution& sol) {
    return split_shape(sol.root_feature,
                       split_shape(sol.left_feature, leaf_shape(), leaf_shape()),
                       split_shape(sol.right_feature, leaf_shape(), leaf_shape()));
}

Shape shape_from(const Depth3Solution& sol) {
    return split_shape(
        sol.root_feature,
        split_shape(sol.left_feature,
                    split_shape(sol.leaf_features[0], leaf_shape(), leaf_shape()),
                    split_shape(sol.leaf_features[1], leaf_shape(), leaf_shape())),
        split_shape(sol.right_feature,
                    split_shape(sol.leaf_features[2], leaf_shape(), leaf_shape()),
                    split_shape(sol.leaf_features[3], leaf_shape(), leaf_shape())));
}

std::int64_t shape_misclassified(const BinaryDataset& ds, const Shape& shape,
                                 const std::vector<std::uint32_t>& indices) {
    if (shape.feature < 0) return misclassified(count_classes(ds, indices));
    std::vector<std::uint32_t> side0, side1;
    for (auto i : indices)
        (ds.at(i, shape.feature) ? side1 : side0).push_back(i);
    return shape_misclassified(ds, *shape.left, side0) +
           shape_misclassified(ds, *shape.right, side1);
}

struct Installed {
    std::int32_t id = -1;
    bool is_leaf = false;
    bool has_misclassified_leaf = false;
};

TreeNode make_leaf_node(int label, std::vector<std::int64_t> counts, int depth) {
    TreeNode node;
    node.depth = depth;
    node.label = label;
    node.class_counts = std::move(counts);
    return node;
}

// Appends the shape's nodes for this subset. Empty subsets become leaves with
// the parent's majority label, and a split whose two children are leaves with
// all datapoints on one side folds into a single leaf (the routing is
// identical either way, including for unseen data).
Installed install_shape(std::vector<TreeNode>& arena, const BinaryDataset& ds,
                        const Shape& shape, const std::vector<std::uint32_t>& subset,
                        int depth, int parent_majority) {
    Installed out;
    if (subset.empty()) {
        arena.push_back(make_leaf_node(parent_majority,
                                       std::vector<std::int64_t>(ds.n_classes, 0), depth));
        out.id = static_cast<std::int32_t>(arena.size() - 1);
        out.is_leaf = true;
        return out;
    }
    const RuleCounts counts = count_classes(ds, subset);
    const int label = majority_class(counts);
    if (shape.feature < 0) {
        arena.push_back(make_leaf_node(label, counts.per_class, depth));
        out.id = static_cast<std::int32_t>(arena.size() - 1);
        out.is_leaf = true;
        out.has_misclassified_leaf = misclassified(counts) > 0;
        return out;
    }

    std::vector<std::uint32_t> side0, side1;
    for (auto i : subset)
        (ds.at(i, shape.feature) ? side1 : side0).push_back(i);
    const Installed left = install_shape(arena, ds, *shape.left, side0, depth + 1, label);
    const Installed right = install_shape(arena, ds, *shape.right, side1, depth + 1, label);

    if (left.is_leaf && right.is_leaf && (side0.empty() || side1.empty())) {
        arena.pop_back();
        arena.pop_back();
        arena.push_back(make_leaf_node(label, counts.per_class, depth));
        out.id = static_cast<std::int32_t>(arena.size() - 1);
        out.is_leaf = true;
        out.has_misclassified_leaf = misclassified(counts) > 0;
        return out;
    }

    TreeNode node;
    node.split_feature = static_cast<std::int32_t>(shape.feature);
    node.left = left.id;
    node.right = right.id;
    node.depth = depth;
    arena.push_back(std::move(node));
    out.id = static_cast<std::int32_t>(arena.size() - 1);
    out.has_misclassified_leaf =
        left.has_misclassified_leaf || right.has_misclassified_leaf;
    return out;
}

std::int64_t arena_misclassified(const std::vector<TreeNode>& arena, const BinaryDataset& ds,
                                 const std::vector<std::uint32_t>& subset) {
    std::int64_t wrong = 0;
    for (auto i : subset) {
        std::int32_t at = 0;
        while (!arena[at].is_leaf())
            at = ds.at(i, arena[at].split_feature) ? arena[at].right : arena[at].left;
        wrong += arena[at].label != ds.y[i];
    }
    return wrong;
}

// Best single split by summed child leaf costs; min_leaf applies to both
// children. Scans ascending so ties keep the smallest feature.
struct Depth1Solution {
    std::int64_t feature = -1;
};

std::optional<Depth1Solution> solve_depth1(const BinaryDataset& ds, const BitColumns& bc,
                                           const std::vector<std::uint32_t>& subset,
                                           LossKind kind, const SolverConfig& cfg,
                                           std::int64_t norm_n) {
    const auto smask = subset_mask(bc, subset);
    const int n_classes = ds.n_classes;
    std::vector<std::uint64_t> class_in(static_cast<std::size_t>(n_classes * bc.words));
    std::vector<std::int64_t> class_total(n_classes);
    for (int c = 0; c < n_classes; ++c) {
        std::uint64_t* dst = class_in.data() + c * bc.words;
        const std::uint64_t* cls = bc.cls(c);
        std::int64_t total = 0;
        for (std::int64_t w = 0; w < bc.words; ++w) {
            dst[w] = smask[w] & cls[w];
            total += std::popcount(dst[w]);
        }
        class_total[c] = total;
    }

    std::optional<Depth1Solution> best;
    double best_cost = 0.0;
    RuleCounts c0, c1;
    c0.per_class.assign(n_classes, 0);
    c1.per_class.assign(n_classes, 0);
    for (std::int64_t j = 0; j < ds.p; ++j) {
        c0.total = c1.total = 0;
        for (int c = 0; c < n_classes; ++c) {
            const std::int64_t on = popcount_and(class_in.data() + c * bc.words, bc.col(j),
                                                 bc.words);
            c1.per_class[c] = on;
            c0.per_class[c] = class_total[c] - on;
            c1.total += on;
            c0.total += class_total[c] - on;
        }
        if (cfg.min_leaf > std::min(c0.total, c1.total)) continue;
        const double cost = leaf_cost(c0, norm_n, kind) + leaf_cost(c1, norm_n, kind);
        if (!best || cost < best_cost) {
            best = Depth1Solution{j};
            best_cost = cost;
        }
    }
    return best;
}

struct FrontierEntry {
    std::vector<std::uint32_t> subset;
};

void validate_config(const FitConfig& cfg) {
    if (cfg.d_max < 1) throw std::invalid_argument("fit: d_max must be >= 1");
    if (cfg.lookahead < 1 || cfg.lookahead > 3)
        throw std::invalid_argument("fit: lookahead must be 1, 2 or 3");
    if (cfg.threads < 1) throw std::invalid_argument("fit: threads must be >= 1");
    if (cfg.strategy == FitConfig::Strategy::hybrid && cfg.lookahead != 2)
        throw std::invalid_argument("fit: the hybrid strategy requires lookahead 2");
}

DecisionTree finalize_tree(std::vector<TreeNode> arena, const BinaryDataset& ds) {
    // Compact to breadth-first ids, dropping nodes orphaned by re-solves.
    std::vector<TreeNode> compact;
    std::vector<std::pair<std::int32_t, std::int32_t>> queue{{0, 0}};  // (old id, depth)
    for (std::size_t head = 0; head < queue.size(); ++head) {
        const auto [old_id, depth] = queue[head];
        TreeNode node = arena[old_id];
        node.depth = depth;
        if (!node.is_leaf()) {
            queue.emplace_back(node.left, depth + 1);
            queue.emplace_back(node.right, depth + 1);
            node.left = static_cast<std::int32_t>(queue.size()) - 2;
            node.right = static_cast<std::int32_t>(queue.size()) - 1;
        }
        compact.push_back(std::move(node));
    }

    DecisionTree tree;
    tree.nodes = std::move(compact);
    tree.n_features = ds.p;
    tree.feature_names = ds.feature_names;
    tree.class_names = ds.class_names;
    return tree;
}

}  // namespace

DecisionTree fit_tree(const BinaryDataset& ds, const std::vector<std::uint32_t>& subset,
                      const FitConfig& cfg, FitInfo* info) {
    validate_config(cfg);
    if (subset.empty()) throw std::invalid_argument("fit: empty training subset");
    if (ds.y.empty()) throw std::invalid_argument("fit: dataset has no labels");
    const LossKind loss = effective_loss(cfg);

    std::vector<TreeNode> arena;
    const RuleCounts root_counts = count_classes(ds, subset);
    arena.push_back(make_leaf_node(majority_class(root_counts), root_counts.per_class, 0));

    if (misclassified(root_counts) == 0) return finalize_tree(std::move(arena), ds);

    // Only the single-split scan wants whole-dataset bit columns; the deeper
    // solvers pack each subset themselves.
    BitColumns bc;
    if (cfg.lookahead == 1 || cfg.d_max == 1) bc = build_bit_columns(ds);
    std::set<std::pair<int, std::int32_t>> order;  // (depth, node id)
    std::map<std::int32_t, FrontierEntry> entries;
    order.insert({0, 0});
    entries[0] = FrontierEntry{subset};

    while (!order.empty()) {
        const auto [depth, id] = *order.begin();
        // Nodes are popped shallowest first, so once the depth budget stops
        // covering a full lookahead the loop is done; only the root may run
        // with a truncated lookahead, when d_max itself is smaller.
        if (depth + cfg.lookahead > cfg.d_max && !(id == 0 && depth == 0)) break;
        order.erase(order.begin());
        FrontierEntry entry = std::move(entries.at(id));
        entries.erase(id);
        const int lookahead = std::min(cfg.lookahead, cfg.d_max - depth);
        const auto norm_n = static_cast<std::int64_t>(entry.subset.size());
        const RuleCounts counts = count_classes(ds, entry.subset);
        if (info) ++info->nodes_processed;

        NodeSubset node_subset;
        node_subset.indices = entry.subset;
        node_subset.depth = depth;

        std::optional<Shape> shape;
        const auto solve_start = Clock::now();
        if (lookahead == 1) {
            const auto sol = solve_depth1(ds, bc, entry.subset, loss, cfg.solver, norm_n);
            if (sol) shape = split_shape(sol->feature, leaf_shape(), leaf_shape());
            if (info) info->solve_seconds += seconds_since(solve_start);
        } else if (lookahead == 2) {
            const auto table = build_cost_table(ds, node_subset, loss, norm_n, cfg.threads);
            const auto mid = Clock::now();
            const auto sol = solve_depth2(table, cfg.solver);
            if (sol) shape = shape_from(*sol);
            if (info) {
                info->precompute_seconds += std::chrono::duration<double>(mid - solve_start).count();
                info->solve_seconds += seconds_since(mid);
            }
        } else {
            const auto sol = solve_depth3(ds, node_subset, loss, cfg.solver, norm_n,
                                          cfg.threads);
            if (sol) shape = shape_from(*sol);
            if (info) info->solve_seconds += seconds_since(solve_start);
        }

        bool close_as_leaf = false;
        if (!shape) {
            close_as_leaf = true;
            if (info) ++info->infeasible_closures;
        } else if (loss == LossKind::misclassification && !cfg.solver.allow_no_improvement) {
            // Premature termination: a subtree that cannot beat the node's own
            // leaf error adds depth for nothing, so the node closes. Compared
            // on integer error counts to keep the decision exact.
            const auto subtree_wrong = shape_misclassified(ds, *shape, entry.subset);
            if (subtree_wrong >= misclassified(counts)) {
                close_as_leaf = true;
                if (info) {
                    ++info->premature_terminations;
                    if (id == 0) info->premature_at_root = true;
                }
            }
        }

        if (close_as_leaf) {
            arena[id] = make_leaf_node(majority_class(counts), counts.per_class, depth);
        } else {
            std::vector<std::uint32_t> side0, side1;
            for (auto i : entry.subset)
                (ds.at(i, shape->feature) ? side1 : side0).push_back(i);
            const int label = majority_class(counts);
            const Installed left =
                install_shape(arena, ds, *shape->left, side0, depth + 1, label);
            const Installed right =
                install_shape(arena, ds, *shape->right, side1, depth + 1, label);

            if (left.is_leaf && right.is_leaf && (side0.empty() || side1.empty())) {
                arena.pop_back();
                arena.pop_back();
                arena[id] = make_leaf_node(label, counts.per_class, depth);
            } else {
                TreeNode node;
                node.split_feature = static_cast<std::int32_t>(shape->feature);
                node.left = left.id;
                node.right = right.id;
                node.depth = depth;
                arena[id] = std::move(node);
                if (left.has_misclassified_leaf) {
                    order.insert({depth + 1, left.id});
                    entries[left.id] = FrontierEntry{std::move(side0)};
                }
                if (right.has_misclassified_leaf) {
                    order.insert({depth + 1, right.id});
                    entries[right.id] = FrontierEntry{std::move(side1)};
                }
            }
        }

        if (info && info->collect_misclass_trace)
            info->misclass_trace.push_back(arena_misclassified(arena, ds, subset));
    }

    return finalize_tree(std::move(arena), ds);
}

DecisionTree fit_tree(const BinaryDataset& ds, const FitConfig& cfg, FitInfo* info) {
    std::vector<std::uint32_t> all(ds.n);
    for (std::int64_t i = 0; i < ds.n; ++i) all[i] = static_cast<std::uint32_t>(i);
    return fit_tree(ds, all, cfg, info);
}

DecisionTree fit_hybrid(const BinaryDataset& ds, int d_max, const SolverConfig& solver,
                        FitInfo* info) {
    FitConfig cfg;
    cfg.d_max = d_max;
    cfg.lookahead = 2;
    cfg.strategy = FitConfig::Strategy::hybrid;
    cfg.solver = solver;
    return fit_tree(ds, cfg, info);
}

}  // namespace rolltree
