#include <cmath>
#include <fstream>
#include <sstream>
#include <vector>

#include <doctest.h>

#include "conproc/account.hpp"
#include "conproc/actuarial.hpp"
#include "conproc/errors.hpp"
#include "test_util.hpp"

using namespace conproc;

namespace {

BonusFund flat_fund(int horizon) {
    BonusFund fund;
    fund.sum_assured = 1000.0;
    fund.free_assets = 50.0;
    for (int k = 0; k <= horizon; ++k) {
        fund.survivors.push_back(100.0 * std::pow(0.98, k));
        fund.assurance_factors.push_back(std::pow(1.04, -(horizon - k)));
    }
    return fund;
}

}  // namespace

TEST_SUITE("actuarial") {

TEST_CASE("annuity-certain prices") {
    CHECK(std::abs(annuity_certain_due(0.04, 11) - 9.110895779355028) <= 1e-12);
    CHECK(annuity_certain_due(0.0, 7) == 7.0);
    CHECK(annuity_certain_due(0.04, 0) == 0.0);
    CHECK(annuity_certain_due(0.04, 1) == 1.0);
    CHECK_THROWS_AS(annuity_certain_due(0.04, -1), input_error);
    CHECK_THROWS_AS(annuity_certain_due(-1.0, 5), domain_error);
}

TEST_CASE("drawdown quote for a fixed-rate fund") {
    DrawdownPlan plan;
    plan.model = FixedRate{0.04};
    plan.c = 1.0;
    plan.d = 1.0;
    plan.horizon = 10;
    plan.s0 = 10000.0;
    const AnnuityBasis basis{13.666};

    const DrawdownQuote q = drawdown_initial_rate(plan, basis);
    CHECK(std::abs(q.x0 - 1097.5869159495437) <= 1e-9);
    // Fully annuitised level drawdown prices like an 11-year annuity-certain.
    const double oracle = 10000.0 / annuity_certain_due(0.04, 11);
    CHECK(std::abs(q.x0 - oracle) <= 1e-10 * oracle);
    CHECK(std::abs(q.expected_annuity - q.x0 / 13.666) <= 1e-12 * q.expected_annuity);

    // Deterministic growth keeps the consumption level along the path.
    ProjectionConstants pc;
    pc.a.assign(10, 1.04);
    pc.a_terminal = 1.0;
    std::vector<double> s(11);
    for (int k = 0; k <= 10; ++k) s[k] = 10000.0 * std::pow(1.04, k);
    const ClosedFormPath path = x_closed_form(pc, s);
    for (int k = 0; k <= 10; ++k)
        CHECK(std::abs(path.x[k] - q.x0) <= 1e-9 * q.x0);
}

TEST_CASE("drawdown quote responds to the terminal fraction") {
    DrawdownPlan plan;
    plan.model = FixedRate{0.04};
    plan.horizon = 10;
    const AnnuityBasis basis{13.666};

    plan.d = 0.3;
    const double low = drawdown_initial_rate(plan, basis).x0;
    plan.d = 0.7;
    const double mid = drawdown_initial_rate(plan, basis).x0;
    plan.d = 1.0;
    const double high = drawdown_initial_rate(plan, basis).x0;
    CHECK(low < mid);
    CHECK(mid < high);

    plan.d = 0.0;
    CHECK_THROWS_AS(drawdown_initial_rate(plan, basis), degenerate_plan_error);
}

TEST_CASE("drawdown quote under risky growth matches the coefficient route") {
    DrawdownPlan plan;
    plan.model = LogNormal{0.02, 0.1};
    plan.c = 0.98;
    plan.d = 0.6;
    plan.horizon = 8;
    plan.s0 = 25000.0;
    const AnnuityBasis basis{12.0};

    const DrawdownQuote q = drawdown_initial_rate(plan, basis);
    ProjectionConstants pc;
    pc.a.assign(8, 0.98 * std::exp(0.02 + 0.5 * 0.1 * 0.1));
    pc.a_terminal = 0.6;
    const double oracle = closed_form_coefficients(pc).x_over_s[0] * 25000.0;
    CHECK(std::abs(q.x0 - oracle) <= 1e-12 * oracle);
}

TEST_CASE("plan validation") {
    DrawdownPlan plan;
    const AnnuityBasis basis{13.666};
    plan.c = 0.0;
    CHECK_THROWS_AS(drawdown_initial_rate(plan, basis), input_error);
    plan = DrawdownPlan{};
    plan.d = 1.5;
    CHECK_THROWS_AS(drawdown_initial_rate(plan, basis), input_error);
    plan = DrawdownPlan{};
    plan.horizon = 0;
    CHECK_THROWS_AS(drawdown_initial_rate(plan, basis), input_error);
    plan = DrawdownPlan{};
    plan.s0 = 0.0;
    CHECK_THROWS_AS(drawdown_initial_rate(plan, basis), input_error);
    plan = DrawdownPlan{};
    CHECK_THROWS_AS(drawdown_initial_rate(plan, AnnuityBasis{0.0}), input_error);
}

TEST_CASE("solving for the terminal fraction hits a consumption limit") {
    DrawdownPlan plan;
    plan.model = FixedRate{0.04};
    plan.horizon = 10;
    const AnnuityBasis basis{13.666};

    plan.d = 0.37;
    const double target = drawdown_initial_rate(plan, basis).x0;
    plan.d = 1.0;

    const DrawdownLimitSolution sol = drawdown_solve_limit(plan, basis, target);
    CHECK(std::abs(sol.quote.x0 - target) <= 1e-9 * target);
    CHECK(std::abs(sol.d - 0.37) <= 1e-6);
    CHECK(std::abs(sol.quote.expected_annuity -
                   sol.quote.x0 / (sol.d * 13.666)) <=
          1e-12 * sol.quote.expected_annuity);

    const double full = drawdown_initial_rate(plan, basis).x0;
    const DrawdownLimitSolution at_full = drawdown_solve_limit(plan, basis, full);
    CHECK(std::abs(at_full.d - 1.0) <= 1e-6);

    try {
        drawdown_solve_limit(plan, basis, full + 1.0);
        FAIL("an unreachable limit should throw");
    } catch (const infeasible_limit_error& e) {
        CHECK(e.x0_at_full == full);
    }
    CHECK_THROWS_AS(drawdown_solve_limit(plan, basis, 0.0), infeasible_limit_error);
    CHECK_THROWS_AS(drawdown_solve_limit(plan, basis, -5.0), infeasible_limit_error);
}

TEST_CASE("bonus schedule along a deterministic investment path") {
    const int horizon = 5;
    const BonusFund fund = flat_fund(horizon);
    const ProjectionConstants pc = bonus_constants(fund, 1.0, 1.06, 1.0);
    REQUIRE(pc.a.size() == static_cast<std::size_t>(horizon));

    std::vector<double> r(horizon + 1);
    for (int k = 0; k <= horizon; ++k) r[k] = std::pow(1.06, k);
    const std::vector<BonusRow> rows = bonus_schedule(fund, r, pc);
    REQUIRE(rows.size() == static_cast<std::size_t>(horizon) + 1);

    const double scale = fund.survivors[0] * fund.free_assets;
    SUBCASE("rates stay within the regular band and exhaust at the horizon") {
        for (const BonusRow& row : rows) {
            CHECK(row.rate >= 0.0);
            CHECK(row.cash >= 0.0);
            CHECK(row.residual >= 0.0);
            CHECK(std::abs(row.cash - row.liability * row.rate) <=
                  1e-12 * std::max(1.0, row.cash));
        }
        CHECK(rows.back().residual == 0.0);
    }
    SUBCASE("cash rolled forward at the investment return balances the fund") {
        double rolled = 0.0;
        for (int k = 0; k <= horizon; ++k)
            rolled += rows[k].cash * (r[horizon] / r[k]);
        rolled += rows.back().residual;
        const double endowment = scale * r[horizon];
        CHECK(std::abs(rolled - endowment) <= 1e-9 * endowment);
    }
    SUBCASE("both the artificial and the real account are regular") {
        std::vector<double> art_s(horizon + 1), art_x(horizon + 1);
        std::vector<double> real_s(horizon + 1), real_x(horizon + 1);
        for (int k = 0; k <= horizon; ++k) {
            art_s[k] = scale * r[k] / rows[k].liability;
            art_x[k] = rows[k].rate;
            real_s[k] = scale * r[k];
            real_x[k] = rows[k].cash;
        }
        CHECK(is_regular(art_s, art_x));
        CHECK(is_regular(real_s, real_x));
    }
}

TEST_CASE("bonus schedule on a scenario tree of investment returns") {
    const int horizon = 3;
    const BonusFund fund = flat_fund(horizon);
    const ScenarioTree r_tree = build_binomial(1.0, 0.96, 1.10, 0.5, horizon);

    PHPPSpec spec;
    spec.steps.assign(static_cast<std::size_t>(horizon),
                      ConditionalExpectationOp{0.98});
    spec.terminal.value = 1.0;

    const BonusTreeResult result = bonus_schedule_tree(fund, r_tree, spec);
    CHECK(verify(result.tree, spec, result.solution).passed());

    const double scale = fund.survivors[0] * fund.free_assets;
    for (const std::vector<std::size_t>& path : testutil::all_paths(r_tree)) {
        const std::size_t leaf = path.back();
        const double r_end = r_tree.node(leaf).s;
        double rolled = 0.0;
        for (std::size_t idx : path)
            rolled += result.cash[idx] * (r_end / r_tree.node(idx).s);
        rolled += result.residual[leaf];
        const double endowment = scale * r_end;
        CHECK(std::abs(rolled - endowment) <= 1e-9 * endowment);
        CHECK(result.residual[leaf] == 0.0);  // terminal fraction one
    }
    for (std::size_t i = 0; i < result.tree.size(); ++i) {
        CHECK(result.cash[i] >= 0.0);
        CHECK(result.residual[i] >= 0.0);
    }
}

TEST_CASE("bonus input validation") {
    const BonusFund fund = flat_fund(3);
    const ProjectionConstants pc = bonus_constants(fund, 1.0, 1.06, 1.0);
    std::vector<double> r{1.0, 1.05, 1.1, 1.2};

    BonusFund bad = fund;
    bad.sum_assured = 0.0;
    CHECK_THROWS_AS(bonus_schedule(bad, r, pc), input_error);
    bad = fund;
    bad.survivors[2] = 0.0;
    CHECK_THROWS_AS(bonus_schedule(bad, r, pc), input_error);
    bad = fund;
    bad.assurance_factors[1] = 1.5;
    CHECK_THROWS_AS(bonus_schedule(bad, r, pc), input_error);
    bad = fund;
    bad.survivors.pop_back();
    CHECK_THROWS_AS(bonus_schedule(bad, r, pc), input_error);
    CHECK_THROWS_AS(bonus_constants(bad, 1.0, 1.06, 1.0), input_error);

    std::vector<double> off{1.1, 1.05, 1.1, 1.2};
    CHECK_THROWS_AS(bonus_schedule(fund, off, pc), input_error);
    std::vector<double> neg{1.0, -1.05, 1.1, 1.2};
    CHECK_THROWS_AS(bonus_schedule(fund, neg, pc), domain_error);
    std::vector<double> tiny{1.0, 1.05};
    CHECK_THROWS_AS(bonus_schedule(fund, tiny, pc), input_error);

    CHECK_THROWS_AS(bonus_constants(fund, 0.0, 1.06, 1.0), input_error);
    CHECK_THROWS_AS(bonus_constants(fund, 1.0, 0.0, 1.0), input_error);
    CHECK_THROWS_AS(bonus_constants(fund, 1.0, 1.06, 1.5), input_error);
}

TEST_CASE("bonus CSV layout") {
    const BonusFund fund = flat_fund(2);
    const ProjectionConstants pc = bonus_constants(fund, 1.0, 1.06, 1.0);
    std::vector<double> r{1.0, 1.06, 1.1236};
    std::ostringstream os;
    write_bonus_csv(os, bonus_schedule(fund, r, pc));
    const std::string text = os.str();
    CHECK(text.rfind("k,N,F,b,cash,residual\n", 0) == 0);
    std::size_t lines = 0;
    for (char ch : text) lines += ch == '\n';
    CHECK(lines == 4);
}

TEST_CASE("bonus CSV matches the frozen golden file") {
    const int horizon = 5;
    const BonusFund fund = flat_fund(horizon);
    const ProjectionConstants pc = bonus_constants(fund, 1.0, 1.06, 1.0);
    std::vector<double> r(horizon + 1);
    for (int k = 0; k <= horizon; ++k) r[k] = std::pow(1.06, k);
    std::ostringstream os;
    write_bonus_csv(os, bonus_schedule(fund, r, pc));

    std::ifstream golden(std::string(CONPROC_GOLDEN_DIR) + "/bonus_flat.csv");
    REQUIRE(golden.good());
    std::ostringstream expected;
    expected << golden.rdbuf();
    CHECK(os.str() == expected.str());
}

TEST_CASE("annuity table lookup") {
    std::istringstream table("age,annuity_due_factor\n64,14.1\n65,13.666\n66,13.2\n");
    CHECK(life_annuity_factor_from_csv(table, 65) == 13.666);

    std::istringstream missing("age,factor\n64,14.1\n");
    CHECK_THROWS_AS(life_annuity_factor_from_csv(missing, 70), input_error);

    std::istringstream malformed("age,factor\n64,14.1\nsixty-five,what\n");
    CHECK_THROWS_AS(life_annuity_factor_from_csv(malformed, 65), input_error);

    std::istringstream headerless("64,14.1\n65,13.666\n");
    CHECK(life_annuity_factor_from_csv(headerless, 64) == 14.1);

    std::istringstream negative("age,factor\n65,-1.0\n");
    CHECK_THROWS_AS(life_annuity_factor_from_csv(negative, 65), input_error);
}

TEST_CASE("assurance table parsing") {
    std::istringstream table("k,assurance_factor\n0,0.82\n1,0.88\n2,1.0\n");
    CHECK(assurance_factors_from_csv(table) ==
          std::vector<double>{0.82, 0.88, 1.0});

    std::istringstream gap("k,factor\n0,0.82\n2,0.88\n");
    CHECK_THROWS_AS(assurance_factors_from_csv(gap), input_error);

    std::istringstream empty("");
    CHECK_THROWS_AS(assurance_factors_from_csv(empty), input_error);

    std::istringstream malformed("k,factor\n0,0.82\none,0.9\n");
    CHECK_THROWS_AS(assurance_factors_from_csv(malformed), input_error);
}

}  // TEST_SUITE
