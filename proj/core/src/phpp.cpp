#include "conproc/phpp.hpp"

#include <cmath>
#include <limits>
#include <ostream>
#include <string>

#include <json.hpp>

#include "conproc/account.hpp"
#include "conproc/errors.hpp"
#include "detail.hpp"

namespace conproc {

namespace {

constexpr double kTerminalTol = 1e-12;
constexpr double kProjectionRelTol = 1e-9;

std::vector<double> terminal_by_leaf(const ScenarioTree& tree,
                                     const TerminalFraction& terminal) {
    const auto& leaves = tree.epoch_nodes(tree.horizon());
    std::vector<double> d(leaves.size());
    if (const double* c = std::get_if<double>(&terminal.value)) {
        if (!(*c >= 0.0 && *c <= 1.0))
            throw input_error("terminal fraction outside [0, 1]");
        d.assign(leaves.size(), *c);
    } else {
        const auto& v = std::get<std::vector<double>>(terminal.value);
        if (v.size() != leaves.size())
            throw input_error("terminal fraction carries " + std::to_string(v.size()) +
                              " values for " + std::to_string(leaves.size()) +
                              " horizon nodes");
        for (double e : v)
            if (!(e >= 0.0 && e <= 1.0))
                throw input_error("terminal fraction outside [0, 1]");
        d = v;
    }
    return d;
}

void check_solution_shape(const ScenarioTree& tree, const ConsumptionSolution& sol) {
    if (sol.x.size() != tree.size() || sol.z.size() != tree.size() ||
        sol.a.size() != tree.size())
        throw input_error("solution arrays must carry one value per tree node");
}

}  // namespace

NodeFunction apply_operator(const ScenarioTree& tree, const StepOperator& op,
                            const NodeFunction& next) {
    if (const auto* e = std::get_if<ConditionalExpectationOp>(&op)) {
        if (!(e->c > 0.0))
            throw domain_error("projection scale must be positive");
        NodeFunction out = cond_expectation(tree, next);
        for (double& v : out.values) v *= e->c;
        return out;
    }
    if (const auto* q = std::get_if<ConditionalQuantileOp>(&op)) {
        return cond_quantile(tree, next, q->alpha);
    }
    const auto& r = std::get<ScaledExpectationRatioOp>(op);
    const auto& parents = tree.epoch_nodes(next.epoch - 1);
    const auto& slice = tree.epoch_nodes(next.epoch);
    if (r.x_current.size() != parents.size() || r.x_next.size() != slice.size())
        throw input_error("ratio operator slices do not match the tree epochs");
    NodeFunction num = cond_expectation(tree, next);
    NodeFunction den = cond_expectation(tree, NodeFunction{next.epoch, r.x_next});
    NodeFunction out;
    out.epoch = next.epoch - 1;
    out.values.resize(parents.size());
    for (std::size_t i = 0; i < parents.size(); ++i) {
        if (!(den.values[i] > 0.0))
            throw domain_error("ratio operator needs a positive expected target at node " +
                               std::to_string(tree.node(parents[i]).id));
        out.values[i] = r.x_current[i] * num.values[i] / den.values[i];
    }
    return out;
}

ConsumptionSolution solve(const ScenarioTree& tree, const PHPPSpec& spec) {
    const int K = tree.horizon();
    if (spec.steps.size() != static_cast<std::size_t>(K))
        throw input_error("spec carries " + std::to_string(spec.steps.size()) +
                          " step operators for horizon " + std::to_string(K));

    ConsumptionSolution sol;
    sol.x.assign(tree.size(), 0.0);
    sol.z.assign(tree.size(), 0.0);
    sol.a.assign(tree.size(), 0.0);

    const std::vector<double> d = terminal_by_leaf(tree, spec.terminal);
    const auto& leaves = tree.epoch_nodes(K);
    for (std::size_t i = 0; i < leaves.size(); ++i) sol.z[leaves[i]] = d[i];

    // Backward: z at the parent from the projected consumption-value ratio.
    for (int k = K; k >= 1; --k) {
        const auto& slice = tree.epoch_nodes(k);
        NodeFunction target;
        target.epoch = k;
        target.values.resize(slice.size());
        for (std::size_t i = 0; i < slice.size(); ++i)
            target.values[i] = sol.z[slice[i]] * tree.node(slice[i]).s;
        const NodeFunction proj =
            apply_operator(tree, spec.steps[static_cast<std::size_t>(k - 1)], target);
        const auto& parents = tree.epoch_nodes(k - 1);
        for (std::size_t i = 0; i < parents.size(); ++i) {
            const double v = proj.values[i];
            sol.z[parents[i]] = v / (tree.node(parents[i]).s + v);
        }
    }

    // Forward: account recursion along every branch.
    const std::size_t root = tree.epoch_nodes(0).front();
    sol.a[root] = tree.node(root).s;
    for (int k = 0; k <= K; ++k) {
        for (std::size_t f : tree.epoch_nodes(k)) {
            sol.x[f] = sol.z[f] * sol.a[f];
            for (std::size_t c : tree.children(f))
                sol.a[c] = (sol.a[f] - sol.x[f]) * tree.node(c).s / tree.node(f).s;
        }
    }
    return sol;
}

VerifyReport verify(const ScenarioTree& tree, const PHPPSpec& spec,
                    const ConsumptionSolution& sol) {
    check_solution_shape(tree, sol);
    const int K = tree.horizon();
    if (spec.steps.size() != static_cast<std::size_t>(K))
        throw input_error("spec carries " + std::to_string(spec.steps.size()) +
                          " step operators for horizon " + std::to_string(K));

    VerifyReport report;
    const double s0 = tree.node(tree.epoch_nodes(0).front()).s;
    const double abs_tol = kRegularityTol * s0;
    auto flag = [&](std::size_t i, const char* kind, double magnitude,
                    std::string detail) {
        report.violations.push_back(
            Violation{tree.node(i).id, kind, magnitude, std::move(detail)});
    };

    for (std::size_t i = 0; i < tree.size(); ++i) {
        const int k = tree.node(i).k;
        if (!(sol.a[i] > 0.0))
            flag(i, "positivity", -sol.a[i], "account not strictly positive");
        if (sol.z[i] < 0.0 || sol.z[i] > 1.0 || (k < K && sol.z[i] >= 1.0))
            flag(i, "range", sol.z[i], "relative rate outside its range");
        if (sol.x[i] < -abs_tol || sol.x[i] > sol.a[i] + abs_tol)
            flag(i, "regularity",
                 std::max(-sol.x[i], sol.x[i] - sol.a[i]),
                 "consumption leaves [0, A]");
        const double drift = std::abs(sol.x[i] - sol.z[i] * sol.a[i]);
        if (drift > abs_tol)
            flag(i, "consistency", drift, "x does not equal z * a");
    }

    const std::vector<double> d = terminal_by_leaf(tree, spec.terminal);
    const auto& leaves = tree.epoch_nodes(K);
    for (std::size_t i = 0; i < leaves.size(); ++i) {
        const double drift = std::abs(sol.z[leaves[i]] - d[i]);
        if (drift > kTerminalTol)
            flag(leaves[i], "terminal", drift, "terminal fraction not met");
    }

    for (int k = 1; k <= K; ++k) {
        const auto& slice = tree.epoch_nodes(k);
        NodeFunction target;
        target.epoch = k;
        target.values.resize(slice.size());
        for (std::size_t i = 0; i < slice.size(); ++i)
            target.values[i] = sol.x[slice[i]];
        const NodeFunction proj =
            apply_operator(tree, spec.steps[static_cast<std::size_t>(k - 1)], target);
        const auto& parents = tree.epoch_nodes(k - 1);
        for (std::size_t i = 0; i < parents.size(); ++i) {
            const double tol = kProjectionRelTol *
                               std::max(sol.a[parents[i]], std::numeric_limits<double>::min());
            const double drift = std::abs(proj.values[i] - sol.x[parents[i]]);
            if (drift > tol)
                flag(parents[i], "projection", drift,
                     "projected consumption misses the current rate at epoch " +
                         std::to_string(k - 1));
        }
    }
    return report;
}

PHPPSpec phpp_from_process(const ScenarioTree& tree, std::span<const double> x_by_node) {
    if (x_by_node.size() != tree.size())
        throw input_error("consumption process must carry one value per tree node");
    const int K = tree.horizon();
    const double s0 = tree.node(tree.epoch_nodes(0).front()).s;
    const double abs_tol = kRegularityTol * s0;

    std::vector<double> a(tree.size(), 0.0);
    const std::size_t root = tree.epoch_nodes(0).front();
    a[root] = tree.node(root).s;
    for (int k = 0; k <= K; ++k) {
        for (std::size_t f : tree.epoch_nodes(k)) {
            const double x = x_by_node[f];
            if (k < K) {
                if (!(x > 0.0))
                    throw non_extractable_error(
                        "consumption vanishes before the horizon at node " +
                        std::to_string(tree.node(f).id));
                if (!(x < a[f]))
                    throw non_extractable_error(
                        "consumption exhausts the account before the horizon at node " +
                        std::to_string(tree.node(f).id));
                for (std::size_t c : tree.children(f))
                    a[c] = (a[f] - x) * tree.node(c).s / tree.node(f).s;
            } else {
                if (!(x > 0.0))
                    throw non_extractable_error(
                        "consumption vanishes at the horizon at node " +
                        std::to_string(tree.node(f).id));
                if (x > a[f] + abs_tol)
                    throw regularity_error(
                        "consumption exceeds the account at the horizon at node " +
                        std::to_string(tree.node(f).id));
            }
        }
    }

    PHPPSpec spec;
    spec.steps.reserve(static_cast<std::size_t>(K));
    for (int k = 0; k < K; ++k) {
        ScaledExpectationRatioOp op;
        for (std::size_t f : tree.epoch_nodes(k)) op.x_current.push_back(x_by_node[f]);
        for (std::size_t c : tree.epoch_nodes(k + 1)) op.x_next.push_back(x_by_node[c]);
        spec.steps.emplace_back(std::move(op));
    }
    std::vector<double> d;
    for (std::size_t l : tree.epoch_nodes(K))
        d.push_back(std::min(x_by_node[l] / a[l], 1.0));
    spec.terminal.value = std::move(d);
    return spec;
}

std::string phpp_spec_to_json(const PHPPSpec& spec) {
    nlohmann::json j;
    nlohmann::json steps = nlohmann::json::array();
    for (const StepOperator& op : spec.steps) {
        nlohmann::json js;
        if (const auto* e = std::get_if<ConditionalExpectationOp>(&op)) {
            js["kind"] = "expectation";
            js["c"] = e->c;
        } else if (const auto* q = std::get_if<ConditionalQuantileOp>(&op)) {
            js["kind"] = "quantile";
            js["alpha"] = q->alpha;
        } else {
            const auto& r = std::get<ScaledExpectationRatioOp>(op);
            js["kind"] = "ratio";
            js["x_current"] = r.x_current;
            js["x_next"] = r.x_next;
        }
        steps.push_back(std::move(js));
    }
    j["steps"] = std::move(steps);
    if (const double* c = std::get_if<double>(&spec.terminal.value))
        j["terminal"] = nlohmann::json{{"d", *c}};
    else
        j["terminal"] = nlohmann::json{
            {"leaf_values", std::get<std::vector<double>>(spec.terminal.value)}};
    return j.dump(2);
}

PHPPSpec phpp_spec_from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw input_error(std::string("invalid spec JSON: ") + e.what());
    }
    try {
        PHPPSpec spec;
        for (const auto& js : j.at("steps")) {
            const std::string kind = js.at("kind").get<std::string>();
            if (kind == "expectation") {
                spec.steps.emplace_back(ConditionalExpectationOp{js.at("c").get<double>()});
            } else if (kind == "quantile") {
                spec.steps.emplace_back(ConditionalQuantileOp{js.at("alpha").get<double>()});
            } else if (kind == "ratio") {
                ScaledExpectationRatioOp op;
                op.x_current = js.at("x_current").get<std::vector<double>>();
                op.x_next = js.at("x_next").get<std::vector<double>>();
                spec.steps.emplace_back(std::move(op));
            } else {
                throw input_error("unknown step operator kind '" + kind + "'");
            }
        }
        const auto& jt = j.at("terminal");
        if (jt.contains("d"))
            spec.terminal.value = jt.at("d").get<double>();
        else
            spec.terminal.value = jt.at("leaf_values").get<std::vector<double>>();
        return spec;
    } catch (const nlohmann::json::exception& e) {
        throw input_error(std::string("invalid spec JSON: ") + e.what());
    }
}

void write_solution_csv(std::ostream& os, const ScenarioTree& tree,
                        const ConsumptionSolution& sol) {
    check_solution_shape(tree, sol);
    os << "node_id,k,prob,s,z,x,a\n";
    for (std::size_t i = 0; i < tree.size(); ++i) {
        const TreeNode& n = tree.node(i);
        os << n.id << ',' << n.k << ',' << detail::fmt_g17(tree.path_probability(i))
           << ',' << detail::fmt_g17(n.s) << ',' << detail::fmt_g17(sol.z[i]) << ','
           << detail::fmt_g17(sol.x[i]) << ',' << detail::fmt_g17(sol.a[i]) << '\n';
    }
}

}  // namespace conproc
