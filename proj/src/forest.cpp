#include "pedcross/forest.hpp"

#include <algorithm>
#include <cmath>

#include "pedcross/errors.hpp"
#include "pedcross/rng.hpp"

namespace pedcross {

namespace {

struct SplitChoice {
    bool found = false;
    std::size_t feature = 0;
    double threshold = 0.0;
    double child_cost = 0.0;  // n_l*imp_l + n_r*imp_r, lower is better
};

double node_impurity(const std::vector<std::size_t>& samples, const std::vector<double>& y,
                     Task task) {
    const double n = static_cast<double>(samples.size());
    if (task == Task::classify) {
        double c1 = 0.0;
        for (std::size_t i : samples) c1 += y[i];
        const double p1 = c1 / n;
        const double p0 = 1.0 - p1;
        return 1.0 - p0 * p0 - p1 * p1;  // Gini
    }
    double sum = 0.0, ss = 0.0;
    for (std::size_t i : samples) {
        sum += y[i];
        ss += y[i] * y[i];
    }
    const double mean = sum / n;
    return std::max(0.0, ss / n - mean * mean);  // variance
}

class TreeBuilder {
  public:
    TreeBuilder(const Matrix& X, const std::vector<double>& y, Task task,
                const ForestConfig& config, Rng& rng, std::vector<double>& importance)
        : X_(X), y_(y), task_(task), config_(config), rng_(rng), importance_(importance) {
        mtry_ = task == Task::classify
                    ? static_cast<std::size_t>(
                          std::ceil(std::sqrt(static_cast<double>(X.cols()))))
                    : static_cast<std::size_t>(
                          std::ceil(static_cast<double>(X.cols()) / 3.0));
        mtry_ = std::min(std::max<std::size_t>(mtry_, 1), X.cols());
    }

    TreeModel build(std::vector<std::size_t> samples) {
        TreeModel tree;
        grow(tree, std::move(samples), 0);
        return tree;
    }

  private:
    std::int32_t grow(TreeModel& tree, std::vector<std::size_t> samples, int depth) {
        const std::int32_t id = static_cast<std::int32_t>(tree.nodes.size());
        tree.nodes.emplace_back();

        const double imp = node_impurity(samples, y_, task_);
        const bool can_split = depth < config_.max_depth &&
                               samples.size() >= 2 * static_cast<std::size_t>(
                                                      config_.min_samples_leaf) &&
                               imp > 0.0;

        SplitChoice split;
        if (can_split) split = best_split(samples, imp);

        if (!split.found) {
            tree.nodes[id] = make_leaf(samples);
            return id;
        }

        std::vector<std::size_t> left, right;
        for (std::size_t i : samples) {
            (X_.at(i, split.feature) <= split.threshold ? left : right).push_back(i);
        }

        importance_[split.feature] +=
            static_cast<double>(samples.size()) * imp - split.child_cost;

        tree.nodes[id].feature = static_cast<std::int32_t>(split.feature);
        tree.nodes[id].threshold = split.threshold;
        samples.clear();
        samples.shrink_to_fit();
        const std::int32_t l = grow(tree, std::move(left), depth + 1);
        const std::int32_t r = grow(tree, std::move(right), depth + 1);
        tree.nodes[id].left = l;
        tree.nodes[id].right = r;
        return id;
    }

    TreeNode make_leaf(const std::vector<std::size_t>& samples) const {
        TreeNode leaf;
        const double n = static_cast<double>(samples.size());
        if (task_ == Task::classify) {
            double c1 = 0.0;
            for (std::size_t i : samples) c1 += y_[i];
            leaf.value = {(n - c1) / n, c1 / n};
        } else {
            double sum = 0.0;
            for (std::size_t i : samples) sum += y_[i];
            leaf.value = {sum / n};
        }
        return leaf;
    }

    // Candidate features are a random draw of mtry columns, evaluated in
    // ascending column order so that equal-gain ties resolve to the lowest
    // column index, then to the lowest threshold.
    SplitChoice best_split(const std::vector<std::size_t>& samples, double imp_node) {
        std::vector<std::size_t> features(X_.cols());
        for (std::size_t j = 0; j < features.size(); ++j) features[j] = j;
        for (std::size_t k = 0; k < mtry_; ++k) {
            const std::size_t pick = k + rng_.uniform_below(features.size() - k);
            std::swap(features[k], features[pick]);
        }
        features.resize(mtry_);
        std::sort(features.begin(), features.end());

        const double n = static_cast<double>(samples.size());
        const double total_cost = n * imp_node;

        SplitChoice best;
        std::vector<std::pair<double, double>> vals;  // (x, y) sorted by x
        vals.reserve(samples.size());

        for (std::size_t j : features) {
            vals.clear();
            for (std::size_t i : samples) vals.emplace_back(X_.at(i, j), y_[i]);
            std::sort(vals.begin(), vals.end(),
                      [](const auto& a, const auto& b) { return a.first < b.first; });
            if (vals.front().first == vals.back().first) continue;

            double lsum = 0.0, lss = 0.0;
            double rsum = 0.0, rss = 0.0;
            for (const auto& [x, t] : vals) {
                rsum += t;
                rss += t * t;
            }

            const std::size_t min_leaf = static_cast<std::size_t>(config_.min_samples_leaf);
            for (std::size_t k = 0; k + 1 < vals.size(); ++k) {
                lsum += vals[k].second;
                lss += vals[k].second * vals[k].second;
                rsum -= vals[k].second;
                rss -= vals[k].second * vals[k].second;
                if (vals[k].first == vals[k + 1].first) continue;
                const std::size_t nl = k + 1;
                const std::size_t nr = vals.size() - nl;
                if (nl < min_leaf || nr < min_leaf) continue;

                double cost;
                if (task_ == Task::classify) {
                    const double dl = static_cast<double>(nl);
                    const double dr = static_cast<double>(nr);
                    const double pl = lsum / dl;
                    const double pr = rsum / dr;
                    cost = dl * (1.0 - pl * pl - (1.0 - pl) * (1.0 - pl)) +
                           dr * (1.0 - pr * pr - (1.0 - pr) * (1.0 - pr));
                } else {
                    const double dl = static_cast<double>(nl);
                    const double dr = static_cast<double>(nr);
                    cost = std::max(0.0, lss - lsum * lsum / dl) +
                           std::max(0.0, rss - rsum * rsum / dr);
                }
                if (cost >= total_cost) continue;  // no impurity decrease
                if (!best.found || cost < best.child_cost) {
                    best.found = true;
                    best.feature = j;
                    best.threshold = vals[k].first + 0.5 * (vals[k + 1].first - vals[k].first);
                    best.child_cost = cost;
                }
            }
        }
        return best;
    }

    const Matrix& X_;
    const std::vector<double>& y_;
    Task task_;
    const ForestConfig& config_;
    Rng& rng_;
    std::vector<double>& importance_;
    std::size_t mtry_;
};

}  // namespace

ForestParams forest_train(const Matrix& X, const std::vector<double>& y, Task task,
                          const ForestConfig& config) {
    if (X.rows() == 0) throw TrainingError("forest_train: empty data");
    if (X.rows() != y.size()) throw ShapeError("forest_train: row/target count mismatch");
    if (config.n_estimators < 1) throw ConfigError("n_estimators must be >= 1");
    if (config.max_depth < 1) throw ConfigError("max_depth must be >= 1");

    ForestParams forest;
    forest.impurity_importance.assign(X.cols(), 0.0);
    forest.trees.reserve(static_cast<std::size_t>(config.n_estimators));

    const std::size_t n = X.rows();
    for (int t = 0; t < config.n_estimators; ++t) {
        Rng rng(config.seed + static_cast<std::uint64_t>(t));
        std::vector<std::size_t> bootstrap(n);
        for (std::size_t i = 0; i < n; ++i) bootstrap[i] = rng.uniform_below(n);
        TreeBuilder builder(X, y, task, config, rng, forest.impurity_importance);
        forest.trees.push_back(builder.build(std::move(bootstrap)));
    }
    return forest;
}

double tree_predict(const TreeModel& tree, const double* row, Task task) {
    const TreeNode* node = &tree.nodes[0];
    while (node->feature >= 0) {
        node = row[node->feature] <= node->threshold ? &tree.nodes[node->left]
                                                     : &tree.nodes[node->right];
    }
    return task == Task::classify ? node->value[1] : node->value[0];
}

std::vector<double> forest_predict(const ForestParams& forest, const Matrix& X, Task task) {
    std::vector<double> out(X.rows(), 0.0);
    const double m = static_cast<double>(forest.trees.size());
    for (std::size_t i = 0; i < X.rows(); ++i) {
        double acc = 0.0;
        for (const TreeModel& tree : forest.trees) acc += tree_predict(tree, X.row(i), task);
        out[i] = acc / m;
    }
    return out;
}

namespace {
int depth_below(const TreeModel& tree, std::int32_t id) {
    const TreeNode& n = tree.nodes[id];
    if (n.feature < 0) return 0;
    return 1 + std::max(depth_below(tree, n.left), depth_below(tree, n.right));
}
}  // namespace

int tree_depth(const TreeModel& tree) { return depth_below(tree, 0); }

}  // namespace pedcross
