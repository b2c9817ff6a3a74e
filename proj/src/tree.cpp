#include "rolltree/tree.hpp"

#include <algorithm>
#include <iostream>
#include <stdexcept>

#include "json.hpp"

namespace rolltree {

int DecisionTree::depth() const {
    int deepest = 0;
    for (const auto& node : nodes) deepest = std::max(deepest, static_cast<int>(node.depth));
    return deepest;
}

std::int64_t DecisionTree::leaf_count() const {
    std::int64_t leaves = 0;
    for (const auto& node : nodes) leaves += node.is_leaf();
    return leaves;
}

int predict(const DecisionTree& tree, const std::vector<std::uint8_t>& x) {
    if (static_cast<std::int64_t>(x.size()) != tree.n_features)
        throw std::invalid_argument("predict: feature vector length mismatch");
    if (tree.nodes.empty()) throw std::invalid_argument("predict: empty tree");
    std::int32_t at = 0;
    while (!tree.nodes[at].is_leaf()) {
        const auto& node = tree.nodes[at];
        at = x[node.split_feature] ? node.right : node.left;
    }
    return tree.nodes[at].label;
}

int predict_row(const DecisionTree& tree, const BinaryDataset& ds, std::int64_t row) {
    if (ds.p != tree.n_features)
        throw std::invalid_argument("predict_row: feature count mismatch");
    std::int32_t at = 0;
    while (!tree.nodes[at].is_leaf()) {
        const auto& node = tree.nodes[at];
        at = ds.at(row, node.split_feature) ? node.right : node.left;
    }
    return tree.nodes[at].label;
}

std::int64_t count_misclassified(const DecisionTree& tree, const BinaryDataset& ds,
                                 const std::vector<std::uint32_t>& subset) {
    std::int64_t wrong = 0;
    for (auto i : subset)
        wrong += predict_row(tree, ds, i) != ds.y[i];
    return wrong;
}

double evaluate_accuracy(const DecisionTree& tree, const BinaryDataset& ds,
                         const std::vector<std::uint32_t>& subset) {
    if (subset.empty()) {
        std::cerr << "warning: evaluating accuracy on an empty subset, defining it as 1.0\n";
        return 1.0;
    }
    const auto wrong = count_misclassified(tree, ds, subset);
    return 1.0 - static_cast<double>(wrong) / static_cast<double>(subset.size());
}

double evaluate_accuracy(const DecisionTree& tree, const BinaryDataset& ds) {
    std::vector<std::uint32_t> all(ds.n);
    for (std::int64_t i = 0; i < ds.n; ++i) all[i] = static_cast<std::uint32_t>(i);
    return evaluate_accuracy(tree, ds, all);
}

namespace {

using nlohmann::json;

}  // namespace

std::string tree_to_json(const DecisionTree& tree) {
    json j;
    j["format_version"] = 1;
    j["classes"] = tree.class_names;
    j["features"] = tree.feature_names;
    if (tree.schema)
        j["schema"] = json::parse(schema_to_json(*tree.schema));
    else
        j["schema"] = nullptr;
    j["nodes"] = json::array();
    for (std::size_t id = 0; id < tree.nodes.size(); ++id) {
        const auto& node = tree.nodes[id];
        json nj;
        nj["id"] = id;
        nj["depth"] = node.depth;
        if (node.is_leaf()) {
            nj["kind"] = "leaf";
            nj["label"] = tree.class_names[node.label];
            nj["class_counts"] = node.class_counts;
        } else {
            nj["kind"] = "internal";
            nj["split"] = tree.feature_names[node.split_feature];
            nj["children"] = {node.left, node.right};
        }
        j["nodes"].push_back(std::move(nj));
    }
    return j.dump(2);
}

DecisionTree tree_from_json(const std::string& text) {
    json j = json::parse(text);
    if (!j.contains("format_version") || j["format_version"].get<int>() != 1)
        throw std::runtime_error("tree: unsupported format version");
    DecisionTree tree;
    tree.class_names = j.at("classes").get<std::vector<std::string>>();
    tree.feature_names = j.at("features").get<std::vector<std::string>>();
    tree.n_features = static_cast<std::int64_t>(tree.feature_names.size());
    if (!j.at("schema").is_null())
        tree.schema = schema_from_json(j.at("schema").dump());

    const auto& nodes = j.at("nodes");
    if (nodes.empty()) throw std::runtime_error("tree: no nodes");
    tree.nodes.resize(nodes.size());
    for (const auto& nj : nodes) {
        const auto id = nj.at("id").get<std::size_t>();
        if (id >= tree.nodes.size()) throw std::runtime_error("tree: node id out of range");
        TreeNode node;
        node.depth = nj.at("depth").get<std::int32_t>();
        const std::string kind = nj.at("kind").get<std::string>();
        if (kind == "leaf") {
            const std::string label = nj.at("label").get<std::string>();
            const auto it = std::find(tree.class_names.begin(), tree.class_names.end(), label);
            if (it == tree.class_names.end())
                throw std::runtime_error("tree: unknown class label '" + label + "'");
            node.label = static_cast<std::int32_t>(it - tree.class_names.begin());
            node.class_counts = nj.at("class_counts").get<std::vector<std::int64_t>>();
            if (node.class_counts.size() != tree.class_names.size())
                throw std::runtime_error("tree: class count vector length mismatch");
        } else if (kind == "internal") {
            const std::string split = nj.at("split").get<std::string>();
            const auto it = std::find(tree.feature_names.begin(), tree.feature_names.end(),
                                      split);
            if (it == tree.feature_names.end())
                throw std::runtime_error("tree: unknown split feature '" + split + "'");
            node.split_feature = static_cast<std::int32_t>(it - tree.feature_names.begin());
            const auto children = nj.at("children").get<std::vector<std::int32_t>>();
            if (children.size() != 2) throw std::runtime_error("tree: internal node needs two children");
            node.left = children[0];
            node.right = children[1];
        } else {
            throw std::runtime_error("tree: unknown node kind '" + kind + "'");
        }
        tree.nodes[id] = std::move(node);
    }

    // Structural validation: every non-root node reachable exactly once from
    // the root, child links in range.
    std::vector<int> seen(tree.nodes.size(), 0);
    std::vector<std::int32_t> stack{0};
    seen[0] = 1;
    while (!stack.empty()) {
        const auto at = stack.back();
        stack.pop_back();
        const auto& node = tree.nodes[at];
        if (node.is_leaf()) continue;
        for (auto child : {node.left, node.right}) {
            if (child < 0 || child >= static_cast<std::int32_t>(tree.nodes.size()))
                throw std::runtime_error("tree: child id out of range");
            if (seen[child]++)
                throw std::runtime_error("tree: node referenced twice");
            stack.push_back(child);
        }
    }
    for (auto s : seen)
        if (!s) throw std::runtime_error("tree: unreachable node");
    return tree;
}

}  // namespace rolltree
