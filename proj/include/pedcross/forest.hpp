#pragma once

#include <cstdint>
#include <vector>

#include "pedcross/features.hpp"
#include "pedcross/mlp.hpp"  // Task

namespace pedcross {

// Internal nodes carry (feature, threshold, children); leaves carry a value:
// a class-probability vector [P(0), P(1)] for classification, the target
// mean for regression. feature == -1 marks a leaf.
struct TreeNode {
    std::int32_t feature = -1;
    double threshold = 0.0;
    std::int32_t left = -1;
    std::int32_t right = -1;
    std::vector<double> value;

    bool operator==(const TreeNode&) const = default;
};

struct TreeModel {
    std::vector<TreeNode> nodes;  // nodes[0] is the root

    bool operator==(const TreeModel&) const = default;
};

struct ForestParams {
    std::vector<TreeModel> trees;
    // Accumulated impurity decrease per column (unnormalized), filled during
    // training so importances survive serialization.
    std::vector<double> impurity_importance;

    bool operator==(const ForestParams&) const = default;
};

struct ForestConfig {
    int n_estimators = 100;
    int max_depth = 5;
    int min_samples_leaf = 1;
    std::uint64_t seed = 0;
};

// Bagged trees: bootstrap sample of size n per tree, Gini impurity
// (classification) or variance (regression) splits, ceil(sqrt(d)) /
// ceil(d/3) candidate features per split. Tree t draws from stream
// seed + t, so per-tree training is order-independent.
ForestParams forest_train(const Matrix& X, const std::vector<double>& y, Task task,
                          const ForestConfig& config);

double tree_predict(const TreeModel& tree, const double* row, Task task);

// Classification: mean of per-tree leaf P(class 1); regression: mean of
// per-tree leaf means.
std::vector<double> forest_predict(const ForestParams& forest, const Matrix& X, Task task);

int tree_depth(const TreeModel& tree);

}  // namespace pedcross
