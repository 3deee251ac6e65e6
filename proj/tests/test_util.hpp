#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "conproc/phpp.hpp"
#include "conproc/tree.hpp"

namespace testutil {

struct Rng {
    std::mt19937_64 gen;
    explicit Rng(std::uint64_t seed) : gen(seed) {}

    double uniform(double lo, double hi) {
        return std::uniform_real_distribution<double>(lo, hi)(gen);
    }
    int uniform_int(int lo, int hi) {
        return std::uniform_int_distribution<int>(lo, hi)(gen);
    }
};

// Random tree with horizon in [min_epochs, max_epochs], between 1 and
// max_branch children per node, normalised branch probabilities and
// value moves within a factor of the parent.
inline conproc::ScenarioTree random_tree(Rng& rng, int min_epochs, int max_epochs,
                                         int max_branch) {
    const int K = rng.uniform_int(min_epochs, max_epochs);
    std::vector<conproc::TreeNode> nodes;
    nodes.push_back(conproc::TreeNode{0, 0, -1, 1.0, rng.uniform(50.0, 20000.0)});
    std::size_t level_begin = 0;
    for (int k = 0; k < K; ++k) {
        const std::size_t level_end = nodes.size();
        for (std::size_t i = level_begin; i < level_end; ++i) {
            const int branches = rng.uniform_int(1, max_branch);
            std::vector<double> w(branches);
            double total = 0.0;
            for (double& v : w) {
                v = rng.uniform(0.1, 1.0);
                total += v;
            }
            for (int b = 0; b < branches; ++b) {
                nodes.push_back(conproc::TreeNode{
                    static_cast<std::int64_t>(nodes.size()), k + 1, nodes[i].id,
                    branches == 1 ? 1.0 : w[static_cast<std::size_t>(b)] / total,
                    nodes[i].s * rng.uniform(0.5, 1.6)});
            }
        }
        level_begin = level_end;
    }
    return conproc::ScenarioTree(std::move(nodes), K);
}

// Random projection family mixing expectation and quantile steps, with a
// constant or per-leaf terminal fraction.
inline conproc::PHPPSpec random_spec(Rng& rng, const conproc::ScenarioTree& tree) {
    conproc::PHPPSpec spec;
    for (int k = 0; k < tree.horizon(); ++k) {
        if (rng.uniform_int(0, 1) == 0)
            spec.steps.emplace_back(
                conproc::ConditionalExpectationOp{rng.uniform(0.8, 1.0)});
        else
            spec.steps.emplace_back(
                conproc::ConditionalQuantileOp{rng.uniform(0.05, 0.95)});
    }
    if (rng.uniform_int(0, 1) == 0) {
        spec.terminal.value = rng.uniform(0.05, 1.0);
    } else {
        std::vector<double> d(tree.epoch_nodes(tree.horizon()).size());
        for (double& v : d) v = rng.uniform(0.05, 1.0);
        spec.terminal.value = std::move(d);
    }
    return spec;
}

// Every root-to-leaf path as a list of node indices, epoch by epoch.
inline std::vector<std::vector<std::size_t>> all_paths(const conproc::ScenarioTree& tree) {
    std::vector<std::vector<std::size_t>> paths;
    std::vector<std::size_t> current;
    const std::size_t root = tree.epoch_nodes(0).front();
    auto walk = [&](auto&& self, std::size_t node) -> void {
        current.push_back(node);
        if (tree.children(node).empty())
            paths.push_back(current);
        else
            for (std::size_t c : tree.children(node)) self(self, c);
        current.pop_back();
    };
    walk(walk, root);
    return paths;
}

}  // namespace testutil
