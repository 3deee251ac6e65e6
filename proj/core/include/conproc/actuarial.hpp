#pragma once

#include <iosfwd>
#include <span>
#include <vector>

#include "conproc/iid.hpp"
#include "conproc/phpp.hpp"
#include "conproc/simulate.hpp"
#include "conproc/tree.hpp"

namespace conproc {

// Price of an annuity-certain of 1 per period, payable in advance for n
// periods, at effective rate i.
double annuity_certain_due(double i, int n);

// Life-annuity-due price at the age the remaining fund annuitises.
struct AnnuityBasis {
    double life_annuity_factor = 0.0;
};

// Drawdown: consume from a pension fund for `horizon` periods, then buy
// an annuity with the fraction d of the remaining fund. Consumption
// follows the scaled conditional-expectation family with scale c.
struct DrawdownPlan {
    GrowthModel model = FixedRate{0.04};
    double c = 1.0;
    double d = 1.0;
    int horizon = 1;
    double s0 = 10000.0;
};

struct DrawdownQuote {
    double x0 = 0.0;               // level of the first consumption rate
    double expected_annuity = 0.0; // expected annual annuity bought at the horizon
};

DrawdownQuote drawdown_initial_rate(const DrawdownPlan& plan,
                                    const AnnuityBasis& basis);

struct DrawdownLimitSolution {
    double d = 0.0;
    DrawdownQuote quote;
};

// Finds d with x0(d) matching the consumption limit, by bisection on the
// monotone map d -> x0(d). Throws infeasible_limit_error (carrying the
// fully-annuitised rate) when no d in [0, 1] can reach the limit.
DrawdownLimitSolution drawdown_solve_limit(const DrawdownPlan& plan,
                                           const AnnuityBasis& basis, double limit);

// Closed with-profits fund: N_k survivors each holding an endowment with
// sum assured SA, plus free assets B per initial policy invested in a
// risky account R. assurance_factors[k] prices one unit of sum assured
// at epoch k for the remaining term.
struct BonusFund {
    double sum_assured = 0.0;
    double free_assets = 0.0;
    std::vector<double> survivors;
    std::vector<double> assurance_factors;
};

struct BonusRow {
    int k = 0;
    double survivors = 0.0;  // N_k
    double liability = 0.0;  // F_k = SA * N_k * assurance factor
    double rate = 0.0;       // declared bonus rate b_k
    double cash = 0.0;       // F_k * b_k taken from the R investment
    double residual = 0.0;   // F_k * (A_k - b_k), assets left after declaring
};

// Projection constants of the artificial account N_0 * B * R_k / F_k when
// the bonus target is c times the conditional mean and R has i.i.d.
// growth with the given one-period mean.
ProjectionConstants bonus_constants(const BonusFund& fund, double c,
                                    double mean_growth, double terminal_d);

// Deterministic-rate schedule along one realised path of R (R_0 = 1).
std::vector<BonusRow> bonus_schedule(const BonusFund& fund,
                                     std::span<const double> r_path,
                                     const ProjectionConstants& pc);

// General projection family on a scenario tree of R (root value 1).
// cash and residual are aligned with the artificial tree's storage order.
struct BonusTreeResult {
    ScenarioTree tree;  // artificial account tree
    ConsumptionSolution solution;
    std::vector<double> cash;
    std::vector<double> residual;
};

BonusTreeResult bonus_schedule_tree(const BonusFund& fund, const ScenarioTree& r_tree,
                                    const PHPPSpec& spec);

// Columns: k,N,F,b,cash,residual. Full double precision.
void write_bonus_csv(std::ostream& os, const std::vector<BonusRow>& rows);

// CSV with columns age,annuity_due_factor; returns the factor at the age.
double life_annuity_factor_from_csv(std::istream& is, int age);

// CSV with columns k,assurance_factor for k contiguous from 0.
std::vector<double> assurance_factors_from_csv(std::istream& is);

}  // namespace conproc
