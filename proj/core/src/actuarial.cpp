#include "conproc/actuarial.hpp"

#include <cctype>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>

#include "conproc/account.hpp"
#include "conproc/errors.hpp"
#include "detail.hpp"

namespace conproc {

double annuity_certain_due(double i, int n) {
    if (n < 0) throw input_error("annuity term must be nonnegative");
    if (!(i > -1.0)) throw domain_error("effective rate must exceed -1");
    if (i == 0.0) return static_cast<double>(n);
    const double v = 1.0 / (1.0 + i);
    return (1.0 - std::pow(v, n)) / (1.0 - v);
}

namespace {

void check_plan(const DrawdownPlan& plan, const AnnuityBasis& basis) {
    validate(plan.model);
    if (!(plan.c > 0.0 && plan.c <= 1.0))
        throw input_error("projection scale must lie in (0, 1]");
    if (!(plan.d >= 0.0 && plan.d <= 1.0))
        throw input_error("terminal fraction outside [0, 1]");
    if (plan.horizon < 1) throw input_error("drawdown horizon must be at least 1");
    if (!(plan.s0 > 0.0)) throw input_error("initial fund must be positive");
    if (!(basis.life_annuity_factor > 0.0))
        throw input_error("life annuity factor must be positive");
}

double initial_rate_at(const DrawdownPlan& plan, double d) {
    ProjectionConstants pc;
    pc.a.assign(static_cast<std::size_t>(plan.horizon),
                plan.c * mean_growth_constant(plan.model));
    pc.a_terminal = d;
    return closed_form_coefficients(pc).x_over_s[0] * plan.s0;
}

}  // namespace

DrawdownQuote drawdown_initial_rate(const DrawdownPlan& plan,
                                    const AnnuityBasis& basis) {
    check_plan(plan, basis);
    if (plan.d == 0.0)
        throw degenerate_plan_error(
            "terminal fraction zero annuitises nothing; the expected annuity is undefined");
    DrawdownQuote q;
    q.x0 = initial_rate_at(plan, plan.d);
    q.expected_annuity = q.x0 / (plan.d * basis.life_annuity_factor);
    return q;
}

DrawdownLimitSolution drawdown_solve_limit(const DrawdownPlan& plan,
                                           const AnnuityBasis& basis, double limit) {
    check_plan(plan, basis);
    const double x0_full = initial_rate_at(plan, 1.0);
    if (!(limit > 0.0))
        throw infeasible_limit_error("consumption limit must be positive", x0_full);
    if (limit > x0_full * (1.0 + 1e-12))
        throw infeasible_limit_error(
            "consumption limit exceeds the rate of a fully annuitised plan (" +
                detail::fmt_g17(x0_full) + ")",
            x0_full);

    // x0(d) increases in d; bisect until the rate matches the limit.
    double lo = 0.0, hi = 1.0, mid = 1.0, x0 = x0_full;
    for (int it = 0; it < 200; ++it) {
        mid = 0.5 * (lo + hi);
        x0 = initial_rate_at(plan, mid);
        if (std::abs(x0 - limit) <= 1e-9 * limit) break;
        (x0 < limit ? lo : hi) = mid;
    }
    DrawdownLimitSolution sol;
    sol.d = mid;
    sol.quote.x0 = x0;
    sol.quote.expected_annuity = x0 / (mid * basis.life_annuity_factor);
    return sol;
}

namespace {

void check_fund(const BonusFund& fund, std::size_t epochs) {
    if (!(fund.sum_assured > 0.0)) throw input_error("sum assured must be positive");
    if (!(fund.free_assets > 0.0)) throw input_error("free assets must be positive");
    if (fund.survivors.size() != epochs || fund.assurance_factors.size() != epochs)
        throw input_error("survivors and assurance factors must cover every epoch");
    for (std::size_t k = 0; k < epochs; ++k) {
        if (!(fund.survivors[k] > 0.0))
            throw input_error("survivor count must stay positive at epoch " +
                              std::to_string(k));
        if (!(fund.assurance_factors[k] > 0.0 && fund.assurance_factors[k] <= 1.0))
            throw input_error("assurance factor outside (0, 1] at epoch " +
                              std::to_string(k));
    }
}

double liability_at(const BonusFund& fund, std::size_t k) {
    return fund.sum_assured * fund.survivors[k] * fund.assurance_factors[k];
}

}  // namespace

ProjectionConstants bonus_constants(const BonusFund& fund, double c,
                                    double mean_growth, double terminal_d) {
    if (fund.survivors.empty())
        throw input_error("fund must cover at least one epoch");
    check_fund(fund, fund.survivors.size());
    if (!(c > 0.0)) throw input_error("projection scale must be positive");
    if (!(mean_growth > 0.0)) throw input_error("mean growth must be positive");
    if (!(terminal_d >= 0.0 && terminal_d <= 1.0))
        throw input_error("terminal fraction outside [0, 1]");
    const std::size_t K = fund.survivors.size() - 1;
    ProjectionConstants pc;
    pc.a.resize(K);
    for (std::size_t k = 0; k < K; ++k)
        pc.a[k] = c * mean_growth * liability_at(fund, k) / liability_at(fund, k + 1);
    pc.a_terminal = terminal_d;
    return pc;
}

std::vector<BonusRow> bonus_schedule(const BonusFund& fund,
                                     std::span<const double> r_path,
                                     const ProjectionConstants& pc) {
    if (r_path.empty()) throw input_error("the investment path must cover epoch 0");
    check_fund(fund, r_path.size());
    if (pc.a.size() + 1 != r_path.size())
        throw input_error("projection constants cover horizon " +
                          std::to_string(pc.a.size()) + ", path has horizon " +
                          std::to_string(r_path.size() - 1));
    if (std::abs(r_path[0] - 1.0) > 1e-12)
        throw input_error("the investment path must start at 1");
    for (std::size_t k = 0; k < r_path.size(); ++k)
        if (!(r_path[k] > 0.0))
            throw domain_error("the investment path must be strictly positive");

    const double scale = fund.survivors[0] * fund.free_assets;
    std::vector<double> art_s(r_path.size());
    for (std::size_t k = 0; k < r_path.size(); ++k)
        art_s[k] = scale * r_path[k] / liability_at(fund, k);

    const DeterministicRates rates = rates_from_constants(pc);
    const AccountState state = absolute_from_relative(art_s, rates.z);

    std::vector<BonusRow> rows(r_path.size());
    for (std::size_t k = 0; k < r_path.size(); ++k) {
        const double F = liability_at(fund, k);
        rows[k] = BonusRow{static_cast<int>(k), fund.survivors[k], F,
                           state.x[k], F * state.x[k],
                           F * (state.a[k] - state.x[k])};
    }
    return rows;
}

BonusTreeResult bonus_schedule_tree(const BonusFund& fund, const ScenarioTree& r_tree,
                                    const PHPPSpec& spec) {
    const std::size_t epochs = static_cast<std::size_t>(r_tree.horizon()) + 1;
    check_fund(fund, epochs);
    const std::size_t root = r_tree.epoch_nodes(0).front();
    if (std::abs(r_tree.node(root).s - 1.0) > 1e-12)
        throw input_error("the investment tree must start at 1");

    const double scale = fund.survivors[0] * fund.free_assets;
    std::vector<TreeNode> nodes;
    nodes.reserve(r_tree.size());
    for (std::size_t i = 0; i < r_tree.size(); ++i) {
        TreeNode n = r_tree.node(i);
        n.s = scale * n.s / liability_at(fund, static_cast<std::size_t>(n.k));
        nodes.push_back(n);
    }
    ScenarioTree art_tree(std::move(nodes), r_tree.horizon());
    ConsumptionSolution sol = solve(art_tree, spec);

    BonusTreeResult out{std::move(art_tree), std::move(sol), {}, {}};
    out.cash.resize(out.tree.size());
    out.residual.resize(out.tree.size());
    for (std::size_t i = 0; i < out.tree.size(); ++i) {
        const double F = liability_at(fund, static_cast<std::size_t>(out.tree.node(i).k));
        out.cash[i] = F * out.solution.x[i];
        out.residual[i] = F * (out.solution.a[i] - out.solution.x[i]);
    }
    return out;
}

void write_bonus_csv(std::ostream& os, const std::vector<BonusRow>& rows) {
    os << "k,N,F,b,cash,residual\n";
    for (const BonusRow& r : rows) {
        os << r.k << ',' << detail::fmt_g17(r.survivors) << ','
           << detail::fmt_g17(r.liability) << ',' << detail::fmt_g17(r.rate) << ','
           << detail::fmt_g17(r.cash) << ',' << detail::fmt_g17(r.residual) << '\n';
    }
}

namespace {

// Splits one CSV line on commas; returns false on a blank line.
bool split_csv(const std::string& line, std::vector<std::string>& out) {
    out.clear();
    if (line.empty()) return false;
    std::string field;
    std::stringstream ss(line);
    while (std::getline(ss, field, ',')) out.push_back(field);
    if (!line.empty() && line.back() == ',') out.push_back("");
    return !out.empty();
}

bool parse_double(const std::string& text, double& out) {
    try {
        std::size_t pos = 0;
        out = std::stod(text, &pos);
        while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos])))
            ++pos;
        return pos == text.size();
    } catch (...) {
        return false;
    }
}

}  // namespace

double life_annuity_factor_from_csv(std::istream& is, int age) {
    std::string line;
    bool first = true;
    std::vector<std::string> fields;
    while (std::getline(is, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (!split_csv(line, fields)) continue;
        double row_age = 0.0, factor = 0.0;
        if (fields.size() != 2 || !parse_double(fields[0], row_age) ||
            !parse_double(fields[1], factor)) {
            if (first) {
                first = false;  // header row
                continue;
            }
            throw input_error("malformed annuity table line: " + line);
        }
        first = false;
        if (static_cast<int>(row_age) == age) {
            if (!(factor > 0.0))
                throw input_error("annuity factor must be positive at age " +
                                  std::to_string(age));
            return factor;
        }
    }
    throw input_error("age " + std::to_string(age) + " not found in the annuity table");
}

std::vector<double> assurance_factors_from_csv(std::istream& is) {
    std::string line;
    bool first = true;
    std::vector<std::string> fields;
    std::vector<double> factors;
    while (std::getline(is, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (!split_csv(line, fields)) continue;
        double k = 0.0, factor = 0.0;
        if (fields.size() != 2 || !parse_double(fields[0], k) ||
            !parse_double(fields[1], factor)) {
            if (first) {
                first = false;
                continue;
            }
            throw input_error("malformed assurance table line: " + line);
        }
        first = false;
        if (static_cast<std::size_t>(k) != factors.size())
            throw input_error("assurance table epochs must run contiguously from 0");
        factors.push_back(factor);
    }
    if (factors.empty()) throw input_error("assurance table is empty");
    return factors;
}

}  // namespace conproc
