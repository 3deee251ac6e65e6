#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "conproc/tree.hpp"

namespace conproc {

// psi(Y) = c * E[Y | current epoch]. c = 1 projects a martingale target;
// c < 1 a supermartingale-style haircut.
struct ConditionalExpectationOp {
    double c = 1.0;
};

// psi(Y) = conditional alpha-quantile of Y over the children.
struct ConditionalQuantileOp {
    double alpha = 0.5;
};

// psi(Y) = x_current * E[Y | current] / E[x_next | current]. The ratio
// family every strictly regular consumption process induces.
struct ScaledExpectationRatioOp {
    std::vector<double> x_current;  // aligned with epoch_nodes(k)
    std::vector<double> x_next;     // aligned with epoch_nodes(k + 1)
};

using StepOperator = std::variant<ConditionalExpectationOp, ConditionalQuantileOp,
                                  ScaledExpectationRatioOp>;

// Fraction of the account consumed at the horizon: a constant in [0, 1]
// or one value per horizon node.
struct TerminalFraction {
    std::variant<double, std::vector<double>> value = 1.0;
};

// One step operator per epoch 0..K-1 plus the terminal fraction.
struct PHPPSpec {
    std::vector<StepOperator> steps;
    TerminalFraction terminal;
};

// Nodewise solution, aligned with tree storage order. Satisfies
// x = z * a, a > 0, z in [0, 1) before the horizon and [0, 1] at it.
struct ConsumptionSolution {
    std::vector<double> x;
    std::vector<double> z;
    std::vector<double> a;
};

struct Violation {
    std::int64_t node_id = -1;
    std::string kind;      // projection | terminal | regularity | positivity | range | consistency
    double magnitude = 0;  // size of the breach, in the check's own scale
    std::string detail;
};

struct VerifyReport {
    std::vector<Violation> violations;
    bool passed() const { return violations.empty(); }
};

// Applies the epoch-k operator to a slice of values at epoch k+1,
// producing the projected slice at epoch k.
NodeFunction apply_operator(const ScenarioTree& tree, const StepOperator& op,
                            const NodeFunction& next);

// Backward pass for the relative rates, forward pass for the account.
// steps.size() must equal the horizon.
ConsumptionSolution solve(const ScenarioTree& tree, const PHPPSpec& spec);

// Re-derives every defining identity of a solution and reports breaches:
// projection x_k = psi_k(x_{k+1}), the terminal fraction, regularity,
// account positivity, rate ranges, and x = z * a consistency.
VerifyReport verify(const ScenarioTree& tree, const PHPPSpec& spec,
                    const ConsumptionSolution& sol);

// Recovers a projection family from a nodewise consumption process via the
// scaled-expectation-ratio construction. Requires 0 < x < a strictly
// before the horizon and x > 0 at it.
PHPPSpec phpp_from_process(const ScenarioTree& tree, std::span<const double> x_by_node);

std::string phpp_spec_to_json(const PHPPSpec& spec);
PHPPSpec phpp_spec_from_json(const std::string& text);

// Columns: node_id,k,prob,s,z,x,a. Full double precision.
void write_solution_csv(std::ostream& os, const ScenarioTree& tree,
                        const ConsumptionSolution& sol);

}  // namespace conproc
