#include "conproc/tree.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_map>
#include <utility>

#include <json.hpp>

#include "conproc/errors.hpp"

namespace conproc {

namespace {

constexpr double kProbSumTol = 1e-12;
// Slack when accumulating child mass against alpha; keeps the quantile on
// the intended atom when probabilities carry rounding noise.
constexpr double kQuantileSlack = 1e-12;

}  // namespace

ScenarioTree::ScenarioTree(std::vector<TreeNode> nodes, int horizon)
    : nodes_(std::move(nodes)), horizon_(horizon) {
    if (horizon_ < 0) throw input_error("horizon must be nonnegative");
    if (nodes_.empty()) throw input_error("tree must have at least one node");

    std::unordered_map<std::int64_t, std::size_t> index;
    index.reserve(nodes_.size());
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
        if (!index.emplace(nodes_[i].id, i).second)
            throw input_error("duplicate node id " + std::to_string(nodes_[i].id));
    }

    children_.assign(nodes_.size(), {});
    by_epoch_.assign(static_cast<std::size_t>(horizon_) + 1, {});
    epoch_offset_.assign(nodes_.size(), 0);

    std::size_t roots = 0;
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
        const TreeNode& n = nodes_[i];
        if (n.k < 0 || n.k > horizon_)
            throw input_error("node " + std::to_string(n.id) + " has epoch " +
                              std::to_string(n.k) + " outside [0, " +
                              std::to_string(horizon_) + "]");
        if (!(n.s > 0.0))
            throw domain_error("node " + std::to_string(n.id) +
                               " has non-positive account value");
        if (!(n.p >= 0.0 && n.p <= 1.0))
            throw input_error("node " + std::to_string(n.id) +
                              " has branch probability outside [0, 1]");
        if (n.parent < 0) {
            ++roots;
            if (n.k != 0)
                throw input_error("root node " + std::to_string(n.id) +
                                  " must sit at epoch 0");
            if (std::abs(n.p - 1.0) > kProbSumTol)
                throw input_error("root branch probability must be 1");
        } else {
            auto it = index.find(n.parent);
            if (it == index.end())
                throw input_error("node " + std::to_string(n.id) +
                                  " references unknown parent " +
                                  std::to_string(n.parent));
            const TreeNode& par = nodes_[it->second];
            if (n.k != par.k + 1)
                throw input_error("node " + std::to_string(n.id) +
                                  " must sit one epoch below its parent");
            children_[it->second].push_back(i);
        }
        by_epoch_[static_cast<std::size_t>(n.k)].push_back(i);
        epoch_offset_[i] = by_epoch_[static_cast<std::size_t>(n.k)].size() - 1;
    }
    if (roots != 1)
        throw input_error("tree must have exactly one root, found " +
                          std::to_string(roots));

    for (std::size_t i = 0; i < nodes_.size(); ++i) {
        const TreeNode& n = nodes_[i];
        if (n.k == horizon_) {
            if (!children_[i].empty())
                throw input_error("node " + std::to_string(n.id) +
                                  " at the horizon must be a leaf");
        } else {
            if (children_[i].empty())
                throw input_error("node " + std::to_string(n.id) +
                                  " before the horizon must have children");
            double mass = 0.0;
            for (std::size_t c : children_[i]) mass += nodes_[c].p;
            if (std::abs(mass - 1.0) > kProbSumTol)
                throw input_error("child probabilities of node " +
                                  std::to_string(n.id) + " sum to " +
                                  std::to_string(mass));
        }
    }

    index_ = std::move(index);
}

std::size_t ScenarioTree::index_of(std::int64_t id) const {
    auto it = index_.find(id);
    if (it == index_.end())
        throw input_error("unknown node id " + std::to_string(id));
    return it->second;
}

std::size_t ScenarioTree::parent_index(std::size_t index) const {
    const TreeNode& n = nodes_.at(index);
    if (n.parent < 0) throw input_error("root node has no parent");
    return index_of(n.parent);
}

const std::vector<std::size_t>& ScenarioTree::epoch_nodes(int k) const {
    if (k < 0 || k > horizon_)
        throw input_error("epoch " + std::to_string(k) + " outside [0, " +
                          std::to_string(horizon_) + "]");
    return by_epoch_[static_cast<std::size_t>(k)];
}

double ScenarioTree::path_probability(std::size_t index) const {
    const TreeNode* n = &nodes_.at(index);
    if (n->k > kLogProbDepth) return std::exp(log_path_probability(index));
    double p = n->p;
    while (n->parent >= 0) {
        n = &nodes_[index_of(n->parent)];
        p *= n->p;
    }
    return p;
}

double ScenarioTree::log_path_probability(std::size_t index) const {
    const TreeNode* n = &nodes_.at(index);
    double lp = std::log(n->p);
    while (n->parent >= 0) {
        n = &nodes_[index_of(n->parent)];
        lp += std::log(n->p);
    }
    return lp;
}

ScenarioTree build_binomial(double s0, double u1, double u2, double p, int horizon,
                            std::size_t node_budget) {
    if (!(s0 > 0.0)) throw domain_error("initial account value must be positive");
    if (!(u1 > 0.0 && u2 > 0.0)) throw domain_error("growth factors must be positive");
    if (!(p >= 0.0 && p <= 1.0)) throw domain_error("branch probability outside [0, 1]");
    if (horizon < 0) throw input_error("horizon must be nonnegative");

    // 2^(K+1) - 1 nodes; refuse before allocating anything.
    if (horizon >= 62 ||
        (std::size_t{1} << (horizon + 1)) - 1 > node_budget)
        throw capacity_error("binomial tree with horizon " + std::to_string(horizon) +
                             " exceeds the node budget of " +
                             std::to_string(node_budget) + " nodes");

    const std::size_t count = (std::size_t{1} << (horizon + 1)) - 1;
    std::vector<TreeNode> nodes;
    nodes.reserve(count);
    nodes.push_back(TreeNode{0, 0, -1, 1.0, s0});
    std::size_t level_begin = 0;
    for (int k = 0; k < horizon; ++k) {
        const std::size_t level_end = nodes.size();
        for (std::size_t i = level_begin; i < level_end; ++i) {
            const double s = nodes[i].s;
            const std::int64_t id = static_cast<std::int64_t>(nodes.size());
            nodes.push_back(TreeNode{id, k + 1, nodes[i].id, p, s * u1});
            nodes.push_back(TreeNode{id + 1, k + 1, nodes[i].id, 1.0 - p, s * u2});
        }
        level_begin = level_end;
    }
    return ScenarioTree(std::move(nodes), horizon);
}

namespace {

void check_slice(const ScenarioTree& tree, const NodeFunction& x) {
    if (x.epoch < 1 || x.epoch > tree.horizon())
        throw input_error("conditioning requires an epoch in [1, horizon], got " +
                          std::to_string(x.epoch));
    if (x.values.size() != tree.epoch_nodes(x.epoch).size())
        throw input_error("slice carries " + std::to_string(x.values.size()) +
                          " values for " +
                          std::to_string(tree.epoch_nodes(x.epoch).size()) +
                          " nodes at epoch " + std::to_string(x.epoch));
}

}  // namespace

NodeFunction cond_expectation(const ScenarioTree& tree, const NodeFunction& x) {
    check_slice(tree, x);
    const auto& parents = tree.epoch_nodes(x.epoch - 1);
    NodeFunction out;
    out.epoch = x.epoch - 1;
    out.values.resize(parents.size());
    for (std::size_t i = 0; i < parents.size(); ++i) {
        double acc = 0.0;
        for (std::size_t c : tree.children(parents[i]))
            acc += tree.node(c).p * x.values[tree.epoch_offset(c)];
        out.values[i] = acc;
    }
    return out;
}

NodeFunction cond_quantile(const ScenarioTree& tree, const NodeFunction& x,
                           double alpha) {
    check_slice(tree, x);
    if (!(alpha > 0.0 && alpha <= 1.0))
        throw input_error("quantile level must lie in (0, 1]");
    const auto& parents = tree.epoch_nodes(x.epoch - 1);
    NodeFunction out;
    out.epoch = x.epoch - 1;
    out.values.resize(parents.size());
    std::vector<std::pair<double, double>> atoms;  // (value, probability)
    for (std::size_t i = 0; i < parents.size(); ++i) {
        atoms.clear();
        for (std::size_t c : tree.children(parents[i]))
            atoms.emplace_back(x.values[tree.epoch_offset(c)], tree.node(c).p);
        std::sort(atoms.begin(), atoms.end());
        double cum = 0.0;
        double q = atoms.back().first;
        for (const auto& [value, prob] : atoms) {
            cum += prob;
            if (cum >= alpha - kQuantileSlack) {
                q = value;
                break;
            }
        }
        out.values[i] = q;
    }
    return out;
}

std::string tree_to_json(const ScenarioTree& tree) {
    nlohmann::json j;
    j["K"] = tree.horizon();
    nlohmann::json nodes = nlohmann::json::array();
    for (std::size_t i = 0; i < tree.size(); ++i) {
        const TreeNode& n = tree.node(i);
        nlohmann::json jn;
        jn["id"] = n.id;
        jn["k"] = n.k;
        if (n.parent < 0)
            jn["parent"] = nullptr;
        else
            jn["parent"] = n.parent;
        jn["p"] = n.p;
        jn["s"] = n.s;
        nodes.push_back(std::move(jn));
    }
    j["nodes"] = std::move(nodes);
    return j.dump(2);
}

ScenarioTree tree_from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw input_error(std::string("invalid tree JSON: ") + e.what());
    }
    try {
        const int horizon = j.at("K").get<int>();
        std::vector<TreeNode> nodes;
        nodes.reserve(j.at("nodes").size());
        for (const auto& jn : j.at("nodes")) {
            TreeNode n;
            n.id = jn.at("id").get<std::int64_t>();
            n.k = jn.at("k").get<int>();
            const auto& par = jn.at("parent");
            n.parent = par.is_null() ? -1 : par.get<std::int64_t>();
            n.p = jn.at("p").get<double>();
            n.s = jn.at("s").get<double>();
            nodes.push_back(n);
        }
        return ScenarioTree(std::move(nodes), horizon);
    } catch (const nlohmann::json::exception& e) {
        throw input_error(std::string("invalid tree JSON: ") + e.what());
    }
}

}  // namespace conproc
