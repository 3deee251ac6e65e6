// Command line front end: solve projection families on scenario trees,
// simulate i.i.d. growth models, probe perpetual plans, and quote the two
// actuarial applications.
//
// Exit codes: 0 success, 1 verification failure, 2 malformed input,
// 3 infeasible request.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "conproc/account.hpp"
#include "conproc/actuarial.hpp"
#include "conproc/errors.hpp"
#include "conproc/iid.hpp"
#include "conproc/phpp.hpp"
#include "conproc/simulate.hpp"
#include "conproc/tree.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitVerification = 1;
constexpr int kExitInput = 2;
constexpr int kExitInfeasible = 3;

std::string load_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw conproc::input_error("cannot read file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void save_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw conproc::input_error("cannot write file '" + path + "'");
    out << content;
}

std::vector<double> parse_list(const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string field;
    while (std::getline(ss, field, ',')) {
        try {
            std::size_t pos = 0;
            out.push_back(std::stod(field, &pos));
            if (pos != field.size())
                throw conproc::input_error("trailing characters in list entry '" + field + "'");
        } catch (const conproc::input_error&) {
            throw;
        } catch (...) {
            throw conproc::input_error("cannot parse list entry '" + field + "'");
        }
    }
    if (out.empty()) throw conproc::input_error("empty value list");
    return out;
}

// --- tree-solve ------------------------------------------------------------

struct TreeSolveArgs {
    std::string tree_file;
    std::vector<double> binomial;  // s0 u1 u2 p
    int horizon = -1;
    std::string spec_file;
    std::optional<double> expectation_c;
    std::optional<double> quantile_alpha;
    double terminal_d = 1.0;
    std::string out_file;
    std::string check_file;
};

conproc::ScenarioTree make_tree(const TreeSolveArgs& args) {
    if (!args.tree_file.empty() && !args.binomial.empty())
        throw conproc::input_error("--tree and --binomial exclude each other");
    if (!args.tree_file.empty()) return conproc::tree_from_json(load_file(args.tree_file));
    if (args.binomial.empty())
        throw conproc::input_error("one of --tree or --binomial is required");
    if (args.horizon < 0)
        throw conproc::input_error("--binomial requires --K");
    return conproc::build_binomial(args.binomial[0], args.binomial[1], args.binomial[2],
                                   args.binomial[3], args.horizon);
}

conproc::PHPPSpec make_spec(const TreeSolveArgs& args, const conproc::ScenarioTree& tree) {
    if (!args.spec_file.empty()) {
        if (args.expectation_c || args.quantile_alpha)
            throw conproc::input_error("--spec excludes --expectation-c and --quantile-alpha");
        return conproc::phpp_spec_from_json(load_file(args.spec_file));
    }
    if (args.expectation_c && args.quantile_alpha)
        throw conproc::input_error("--expectation-c and --quantile-alpha exclude each other");
    conproc::PHPPSpec spec;
    const std::size_t steps = static_cast<std::size_t>(tree.horizon());
    if (args.expectation_c) {
        spec.steps.assign(steps, conproc::ConditionalExpectationOp{*args.expectation_c});
    } else if (args.quantile_alpha) {
        spec.steps.assign(steps, conproc::ConditionalQuantileOp{*args.quantile_alpha});
    } else {
        throw conproc::input_error(
            "one of --spec, --expectation-c or --quantile-alpha is required");
    }
    spec.terminal.value = args.terminal_d;
    return spec;
}

conproc::ConsumptionSolution read_solution_csv(const std::string& text,
                                               const conproc::ScenarioTree& tree) {
    conproc::ConsumptionSolution sol;
    sol.x.assign(tree.size(), 0.0);
    sol.z.assign(tree.size(), 0.0);
    sol.a.assign(tree.size(), 0.0);
    std::stringstream ss(text);
    std::string line;
    std::size_t rows = 0;
    bool header = true;
    while (std::getline(ss, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (header) {
            header = false;
            continue;
        }
        std::stringstream ls(line);
        std::string field;
        std::vector<std::string> fields;
        while (std::getline(ls, field, ',')) fields.push_back(field);
        if (fields.size() != 7)
            throw conproc::input_error("solution row needs 7 columns: " + line);
        try {
            const std::size_t i = tree.index_of(std::stoll(fields[0]));
            sol.z[i] = std::stod(fields[4]);
            sol.x[i] = std::stod(fields[5]);
            sol.a[i] = std::stod(fields[6]);
        } catch (const conproc::input_error&) {
            throw;
        } catch (...) {
            throw conproc::input_error("cannot parse solution row: " + line);
        }
        ++rows;
    }
    if (rows != tree.size())
        throw conproc::input_error("solution carries " + std::to_string(rows) +
                                   " rows for " + std::to_string(tree.size()) + " nodes");
    return sol;
}

int report_verification(const conproc::ScenarioTree& tree,
                        const conproc::VerifyReport& report) {
    if (report.passed()) {
        std::printf("verification: clean (%zu nodes)\n", tree.size());
        return kExitOk;
    }
    std::printf("verification: %zu violation(s)\n", report.violations.size());
    const std::size_t shown = std::min<std::size_t>(report.violations.size(), 5);
    for (std::size_t i = 0; i < shown; ++i) {
        const conproc::Violation& v = report.violations[i];
        std::printf("  node %lld [%s] %.3e %s\n", static_cast<long long>(v.node_id),
                    v.kind.c_str(), v.magnitude, v.detail.c_str());
    }
    return kExitVerification;
}

int run_tree_solve(const TreeSolveArgs& args) {
    const conproc::ScenarioTree tree = make_tree(args);
    const conproc::PHPPSpec spec = make_spec(args, tree);

    if (!args.check_file.empty()) {
        const conproc::ConsumptionSolution sol =
            read_solution_csv(load_file(args.check_file), tree);
        return report_verification(tree, conproc::verify(tree, spec, sol));
    }

    const conproc::ConsumptionSolution sol = conproc::solve(tree, spec);
    const std::size_t root = tree.epoch_nodes(0).front();
    std::printf("X0 = %.2f\n", sol.x[root]);
    if (!args.out_file.empty()) {
        std::ostringstream os;
        conproc::write_solution_csv(os, tree, sol);
        save_file(args.out_file, os.str());
    }
    return report_verification(tree, conproc::verify(tree, spec, sol));
}

// --- model flags shared by simulate and drawdown ----------------------------

struct ModelArgs {
    std::vector<double> gbm;       // mu sigma
    std::vector<double> binomial;  // u1 u2 p
    std::optional<double> fixed_rate;
};

conproc::GrowthModel make_model(const ModelArgs& args) {
    const int given = (!args.gbm.empty()) + (!args.binomial.empty()) +
                      static_cast<int>(args.fixed_rate.has_value());
    if (given != 1)
        throw conproc::input_error(
            "exactly one of --gbm, --binomial or --fixed-rate is required");
    if (!args.gbm.empty()) return conproc::LogNormal{args.gbm[0], args.gbm[1]};
    if (!args.binomial.empty())
        return conproc::TwoPoint{args.binomial[0], args.binomial[1], args.binomial[2]};
    return conproc::FixedRate{*args.fixed_rate};
}

// --- simulate ----------------------------------------------------------------

struct SimulateArgs {
    ModelArgs model;
    std::optional<double> alpha;
    std::optional<double> expectation_c;
    double terminal_d = 1.0;
    int horizon = -1;
    std::size_t n_paths = 1000;
    std::uint64_t seed = conproc::kDefaultSeed;
    double s0 = 10000.0;
    std::string out_file;
    std::string summary_file;
};

int run_simulate(const SimulateArgs& args) {
    const conproc::GrowthModel model = make_model(args.model);
    if (args.horizon < 1) throw conproc::input_error("--K must be at least 1");
    if (args.alpha.has_value() == args.expectation_c.has_value())
        throw conproc::input_error("exactly one of --alpha or --expectation-c is required");

    const double a = args.alpha
                         ? conproc::quantile_growth_constant(model, *args.alpha)
                         : *args.expectation_c * conproc::mean_growth_constant(model);
    conproc::ProjectionConstants pc;
    pc.a.assign(static_cast<std::size_t>(args.horizon), a);
    pc.a_terminal = args.terminal_d;

    const conproc::SimulatedPaths paths =
        conproc::simulate_paths(model, args.s0, args.horizon, args.n_paths, args.seed);
    const conproc::SimulatedConsumption consumption = conproc::consume_paths(paths, pc);
    const conproc::PathsSummary summary = conproc::summarize_paths(paths, consumption);

    std::printf("a = %.6f\n", a);
    std::printf("X0 = %.2f\n", consumption.x[0]);
    std::printf("increase frequency = %.4f\n", summary.x_increase_frequency);

    if (!args.out_file.empty()) {
        std::ostringstream os;
        conproc::write_paths_csv(os, paths, consumption);
        save_file(args.out_file, os.str());
    }
    if (!args.summary_file.empty())
        save_file(args.summary_file, conproc::summary_to_json(summary) + "\n");
    return kExitOk;
}

// --- perpetual ----------------------------------------------------------------

struct PerpetualArgs {
    std::optional<double> a_const;
    std::string a_cycle;
    std::size_t probe = conproc::kDefaultPerpetualProbe;
    std::optional<double> z0;
    std::size_t take = 10;
};

int run_perpetual(const PerpetualArgs& args) {
    if (args.a_const.has_value() == !args.a_cycle.empty())
        throw conproc::input_error("exactly one of --a or --a-cycle is required");

    conproc::ASequence seq;
    conproc::PerpetualBound bound{};
    if (args.a_const) {
        const double a = *args.a_const;
        seq = [a](std::size_t) { return a; };
        bound = conproc::perpetual_z0_max(a);
    } else {
        const std::vector<double> cycle = parse_list(args.a_cycle);
        seq = [cycle](std::size_t k) { return cycle[k % cycle.size()]; };
        bound = conproc::perpetual_z0_max(seq, args.probe);
    }
    std::printf("z0_max = %.6f (%s)\n", bound.z0_max,
                bound.attained ? "attained" : "not attained");

    if (args.z0) {
        conproc::PerpetualZSequence plan(seq, *args.z0);
        for (std::size_t k = 0; k < args.take; ++k)
            std::printf("z[%zu] = %.9f\n", k, plan.next());
    }
    return kExitOk;
}

// --- drawdown ----------------------------------------------------------------

struct DrawdownArgs {
    ModelArgs model;
    double c = 1.0;
    int horizon = -1;
    double s0 = 10000.0;
    std::optional<double> annuity_factor;
    std::string life_table;
    std::optional<int> age;
    std::optional<double> d;
    std::optional<double> limit;
};

int run_drawdown(const DrawdownArgs& args) {
    conproc::DrawdownPlan plan;
    plan.model = make_model(args.model);
    plan.c = args.c;
    plan.horizon = args.horizon;
    plan.s0 = args.s0;

    conproc::AnnuityBasis basis;
    if (args.annuity_factor && !args.life_table.empty())
        throw conproc::input_error("--annuity-factor and --life-table exclude each other");
    if (args.annuity_factor) {
        basis.life_annuity_factor = *args.annuity_factor;
    } else if (!args.life_table.empty()) {
        if (!args.age)
            throw conproc::input_error("--life-table requires --age (age at the start)");
        std::istringstream is(load_file(args.life_table));
        basis.life_annuity_factor =
            conproc::life_annuity_factor_from_csv(is, *args.age + args.horizon);
    } else {
        throw conproc::input_error("one of --annuity-factor or --life-table is required");
    }

    if (args.d.has_value() == args.limit.has_value())
        throw conproc::input_error("exactly one of --d or --limit is required");

    if (args.d) {
        plan.d = *args.d;
        const conproc::DrawdownQuote quote = conproc::drawdown_initial_rate(plan, basis);
        std::printf("X0 = %.2f\n", quote.x0);
        std::printf("expected annuity = %.2f\n", quote.expected_annuity);
    } else {
        const conproc::DrawdownLimitSolution sol =
            conproc::drawdown_solve_limit(plan, basis, *args.limit);
        std::printf("d = %.6f\n", sol.d);
        std::printf("X0 = %.2f\n", sol.quote.x0);
        std::printf("expected annuity = %.2f\n", sol.quote.expected_annuity);
    }
    return kExitOk;
}

// --- bonus ----------------------------------------------------------------

struct BonusArgs {
    double sum_assured = 0.0;
    double free_assets = 0.0;
    std::string survivors;
    std::string factors;
    std::string factors_file;
    std::optional<double> fixed_rate;
    std::string r_path;
    std::optional<double> mean_growth;
    double expectation_c = 1.0;
    double terminal_d = 1.0;
    std::string out_file;
};

int run_bonus(const BonusArgs& args) {
    conproc::BonusFund fund;
    fund.sum_assured = args.sum_assured;
    fund.free_assets = args.free_assets;
    fund.survivors = parse_list(args.survivors);

    if (args.factors.empty() == args.factors_file.empty())
        throw conproc::input_error("exactly one of --factors or --factors-file is required");
    if (!args.factors.empty()) {
        fund.assurance_factors = parse_list(args.factors);
    } else {
        std::istringstream is(load_file(args.factors_file));
        fund.assurance_factors = conproc::assurance_factors_from_csv(is);
    }

    const std::size_t epochs = fund.survivors.size();
    std::vector<double> r_path;
    double mean_growth = 0.0;
    if (args.fixed_rate && args.r_path.empty()) {
        r_path.resize(epochs);
        r_path[0] = 1.0;
        for (std::size_t k = 1; k < epochs; ++k)
            r_path[k] = r_path[k - 1] * (1.0 + *args.fixed_rate);
        mean_growth = 1.0 + *args.fixed_rate;
    } else if (!args.r_path.empty() && !args.fixed_rate) {
        r_path = parse_list(args.r_path);
        if (!args.mean_growth)
            throw conproc::input_error("--r-path requires --mean-growth");
        mean_growth = *args.mean_growth;
    } else {
        throw conproc::input_error("exactly one of --fixed-rate or --r-path is required");
    }

    const conproc::ProjectionConstants pc = conproc::bonus_constants(
        fund, args.expectation_c, mean_growth, args.terminal_d);
    const std::vector<conproc::BonusRow> rows =
        conproc::bonus_schedule(fund, r_path, pc);

    std::printf("%3s %12s %16s %10s %14s %16s\n", "k", "N", "F", "b", "cash",
                "residual");
    for (const conproc::BonusRow& r : rows)
        std::printf("%3d %12.2f %16.2f %10.6f %14.2f %16.2f\n", r.k, r.survivors,
                    r.liability, r.rate, r.cash, r.residual);

    if (!args.out_file.empty()) {
        std::ostringstream os;
        conproc::write_bonus_csv(os, rows);
        save_file(args.out_file, os.str());
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Regular consumption processes for stochastic money accounts"};
    app.require_subcommand(1);
    app.set_config("--config");

    TreeSolveArgs ts;
    CLI::App* tree_solve = app.add_subcommand(
        "tree-solve", "Solve a projection family on a scenario tree");
    tree_solve->add_option("--tree", ts.tree_file, "Scenario tree JSON file");
    tree_solve->add_option("--binomial", ts.binomial, "S0 U1 U2 P")->expected(4);
    tree_solve->add_option("--K", ts.horizon, "Horizon for --binomial");
    tree_solve->add_option("--spec", ts.spec_file, "Projection family JSON file");
    tree_solve->add_option("--expectation-c", ts.expectation_c,
                           "Scaled conditional expectation at every epoch");
    tree_solve->add_option("--quantile-alpha", ts.quantile_alpha,
                           "Conditional quantile at every epoch");
    tree_solve->add_option("--terminal-d", ts.terminal_d,
                           "Terminal consumption fraction (default 1)");
    tree_solve->add_option("--out", ts.out_file, "Solution CSV output path");
    tree_solve->add_option("--check", ts.check_file,
                           "Verify an existing solution CSV instead of solving");

    SimulateArgs sim;
    CLI::App* simulate = app.add_subcommand(
        "simulate", "Simulate growth paths and the closed-form consumption");
    simulate->add_option("--gbm", sim.model.gbm, "MU SIGMA")->expected(2);
    simulate->add_option("--binomial", sim.model.binomial, "U1 U2 P")->expected(3);
    simulate->add_option("--fixed-rate", sim.model.fixed_rate, "Deterministic rate I");
    simulate->add_option("--alpha", sim.alpha, "Quantile level for the growth constant");
    simulate->add_option("--expectation-c", sim.expectation_c,
                         "Scale on the mean growth constant");
    simulate->add_option("--terminal-d", sim.terminal_d,
                         "Terminal consumption fraction (default 1)");
    simulate->add_option("--K", sim.horizon, "Horizon");
    simulate->add_option("--n-paths", sim.n_paths, "Number of paths (default 1000)");
    simulate->add_option("--seed", sim.seed, "Stream seed (default 12345)");
    simulate->add_option("--s0", sim.s0, "Initial account value (default 10000)");
    simulate->add_option("--out", sim.out_file, "Paths CSV output path");
    simulate->add_option("--summary", sim.summary_file, "Summary JSON output path");

    PerpetualArgs per;
    CLI::App* perpetual = app.add_subcommand(
        "perpetual", "Feasibility bound and rates of a perpetual plan");
    perpetual->add_option("--a", per.a_const, "Constant growth constant");
    perpetual->add_option("--a-cycle", per.a_cycle,
                          "Comma list of growth constants, repeated cyclically");
    perpetual->add_option("--probe", per.probe,
                          "Epochs scanned for the bound (default 10000)");
    perpetual->add_option("--z0", per.z0, "Start rate to roll forward");
    perpetual->add_option("--take", per.take, "Rates printed with --z0 (default 10)");

    DrawdownArgs dd;
    CLI::App* drawdown = app.add_subcommand(
        "drawdown", "Quote a drawdown plan that annuitises at the horizon");
    drawdown->add_option("--gbm", dd.model.gbm, "MU SIGMA")->expected(2);
    drawdown->add_option("--binomial", dd.model.binomial, "U1 U2 P")->expected(3);
    drawdown->add_option("--fixed-rate", dd.model.fixed_rate, "Deterministic rate I");
    drawdown->add_option("--c", dd.c, "Projection scale in (0, 1] (default 1)");
    drawdown->add_option("--K", dd.horizon, "Periods until annuitisation");
    drawdown->add_option("--s0", dd.s0, "Initial fund (default 10000)");
    drawdown->add_option("--annuity-factor", dd.annuity_factor,
                         "Life annuity-due factor at annuitisation");
    drawdown->add_option("--life-table", dd.life_table,
                         "CSV with columns age,annuity_due_factor");
    drawdown->add_option("--age", dd.age, "Age at the start of the plan");
    drawdown->add_option("--d", dd.d, "Terminal fraction annuitised");
    drawdown->add_option("--limit", dd.limit, "Solve for d hitting this X0");

    BonusArgs bo;
    CLI::App* bonus = app.add_subcommand(
        "bonus", "Smooth bonus schedule for a closed with-profits fund");
    bonus->add_option("--sum-assured", bo.sum_assured, "Sum assured per policy")
        ->required();
    bonus->add_option("--free-assets", bo.free_assets,
                      "Free assets per initial policy")
        ->required();
    bonus->add_option("--survivors", bo.survivors, "Comma list N_0..N_K")->required();
    bonus->add_option("--factors", bo.factors, "Comma list of assurance factors");
    bonus->add_option("--factors-file", bo.factors_file,
                      "CSV with columns k,assurance_factor");
    bonus->add_option("--fixed-rate", bo.fixed_rate,
                      "Deterministic investment rate for R");
    bonus->add_option("--r-path", bo.r_path, "Comma list of realised R values, R_0 = 1");
    bonus->add_option("--mean-growth", bo.mean_growth,
                      "One-period mean growth of R (with --r-path)");
    bonus->add_option("--expectation-c", bo.expectation_c,
                      "Scale on the conditional mean (default 1)");
    bonus->add_option("--terminal-d", bo.terminal_d,
                      "Terminal consumption fraction (default 1)");
    bonus->add_option("--out", bo.out_file, "Bonus CSV output path");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);
        std::cerr << e.what() << "\n";
        return kExitInput;
    }

    try {
        if (tree_solve->parsed()) return run_tree_solve(ts);
        if (simulate->parsed()) return run_simulate(sim);
        if (perpetual->parsed()) return run_perpetual(per);
        if (drawdown->parsed()) return run_drawdown(dd);
        if (bonus->parsed()) return run_bonus(bo);
        std::cerr << "no subcommand given\n";
        return kExitInput;
    } catch (const conproc::feasibility_error& e) {
        std::cerr << "infeasible: " << e.what() << "\n";
        return kExitInfeasible;
    } catch (const conproc::infeasible_limit_error& e) {
        std::cerr << "infeasible: " << e.what() << "\n";
        return kExitInfeasible;
    } catch (const conproc::degenerate_plan_error& e) {
        std::cerr << "infeasible: " << e.what() << "\n";
        return kExitInfeasible;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInput;
    }
}
