#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

namespace conproc {

// Node of a finite scenario tree. p is the branch probability conditional
// on the parent (1 at the root). s is the account value at the node.
struct TreeNode {
    std::int64_t id = 0;
    int k = 0;
    std::int64_t parent = -1;  // -1 marks the root
    double p = 1.0;
    double s = 1.0;
};

// Recombination is not exploited; the default budget caps explicit trees.
inline constexpr std::size_t kDefaultNodeBudget = std::size_t{1} << 22;

// Depth beyond which path probabilities accumulate in log space.
inline constexpr int kLogProbDepth = 30;

// Values of an epoch-measurable function, aligned with epoch_nodes(epoch).
struct NodeFunction {
    int epoch = 0;
    std::vector<double> values;
};

class ScenarioTree {
public:
    // Validates topology: one root at epoch 0, parents one epoch up,
    // leaves exactly at the horizon, child probabilities summing to one,
    // strictly positive account values.
    ScenarioTree(std::vector<TreeNode> nodes, int horizon);

    int horizon() const noexcept { return horizon_; }
    std::size_t size() const noexcept { return nodes_.size(); }

    const TreeNode& node(std::size_t index) const { return nodes_[index]; }
    std::size_t index_of(std::int64_t id) const;  // throws input_error
    std::size_t parent_index(std::size_t index) const;  // root throws input_error
    const std::vector<std::size_t>& children(std::size_t index) const {
        return children_[index];
    }
    // Storage indices of the epoch-k slice, in stable storage order.
    const std::vector<std::size_t>& epoch_nodes(int k) const;
    // Position of a node within its epoch slice.
    std::size_t epoch_offset(std::size_t index) const { return epoch_offset_[index]; }

    // Probability of the root path to the node. Computed in log space
    // beyond kLogProbDepth.
    double path_probability(std::size_t index) const;
    double log_path_probability(std::size_t index) const;

private:
    std::vector<TreeNode> nodes_;
    int horizon_ = 0;
    std::unordered_map<std::int64_t, std::size_t> index_;
    std::vector<std::vector<std::size_t>> children_;
    std::vector<std::vector<std::size_t>> by_epoch_;
    std::vector<std::size_t> epoch_offset_;
};

// Full binomial tree: each node branches to s*u1 (probability p) and s*u2.
// Throws capacity_error before allocating if 2^(K+1) - 1 exceeds the budget.
ScenarioTree build_binomial(double s0, double u1, double u2, double p, int horizon,
                            std::size_t node_budget = kDefaultNodeBudget);

// E[x | epoch-1 node], one value per parent of the slice carrying x.
NodeFunction cond_expectation(const ScenarioTree& tree, const NodeFunction& x);

// Smallest child value whose conditional mass reaches alpha, per parent.
// alpha in (0, 1]; the quantile is always an attained child value.
NodeFunction cond_quantile(const ScenarioTree& tree, const NodeFunction& x,
                           double alpha);

std::string tree_to_json(const ScenarioTree& tree);
ScenarioTree tree_from_json(const std::string& text);

}  // namespace conproc
