#include "conproc/simulate.hpp"

#include <cmath>
#include <cstddef>
#include <ostream>
#include <string>

#include <json.hpp>

#include "conproc/errors.hpp"
#include "detail.hpp"

namespace conproc {

void validate(const GrowthModel& model) {
    if (const auto* b = std::get_if<TwoPoint>(&model)) {
        if (!(b->u1 > 0.0 && b->u1 < b->u2))
            throw domain_error("two-point growth needs 0 < u1 < u2");
        if (!(b->p > 0.0 && b->p < 1.0))
            throw domain_error("two-point branch probability must lie in (0, 1)");
    } else if (const auto* g = std::get_if<LogNormal>(&model)) {
        if (!(g->sigma > 0.0))
            throw domain_error("log-normal volatility must be positive");
    } else {
        const auto& f = std::get<FixedRate>(model);
        if (!(f.i > -1.0))
            throw domain_error("fixed growth rate must exceed -1");
    }
}

double norm_cdf(double x) { return 0.5 * std::erfc(-x * M_SQRT1_2); }

namespace {

// Rational approximation of the standard normal quantile on (0, 0.5].
double quantile_guess_lower(double p) {
    static constexpr double A[6] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                    -2.759285104469687e+02, 1.383577518672690e+02,
                                    -3.066479806614716e+01, 2.506628277459239e+00};
    static constexpr double B[5] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                    -1.556989798598866e+02, 6.680131188771972e+01,
                                    -1.328068155288572e+01};
    static constexpr double C[6] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                    -2.400758277161838e+00, -2.549732539343734e+00,
                                    4.374664141464968e+00,  2.938163982698783e+00};
    static constexpr double D[4] = {7.784695709041462e-03, 3.224671290700398e-01,
                                    2.445134137142996e+00, 3.754408661907416e+00};
    constexpr double p_low = 0.02425;
    if (p < p_low) {
        const double q = std::sqrt(-2.0 * std::log(p));
        return (((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5]) /
               ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0);
    }
    const double q = p - 0.5;
    const double r = q * q;
    return q * (((((A[0] * r + A[1]) * r + A[2]) * r + A[3]) * r + A[4]) * r + A[5]) /
           (((((B[0] * r + B[1]) * r + B[2]) * r + B[3]) * r + B[4]) * r + 1.0);
}

// p in (0, 0.5]; one Newton step against norm_cdf lands well inside 1e-12.
double quantile_lower_half(double p) {
    double x = quantile_guess_lower(p);
    const double pdf = std::exp(-0.5 * x * x) * (1.0 / std::sqrt(2.0 * M_PI));
    if (pdf > 1e-280) x -= (norm_cdf(x) - p) / pdf;
    return x;
}

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

struct SplitMix64 {
    std::uint64_t state;
    std::uint64_t next() {
        state += kGolden;
        return mix64(state);
    }
    // Uniform on (0, 1) from the top 53 bits; never returns an endpoint.
    double unit() { return (static_cast<double>(next() >> 11) + 0.5) * 0x1p-53; }
};

// Substream for one path, a pure function of (seed, path).
SplitMix64 path_stream(std::uint64_t seed, std::uint64_t path) {
    return SplitMix64{mix64(seed ^ ((path + 1) * kGolden))};
}

}  // namespace

double inv_norm_cdf(double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0))
        throw domain_error("quantile level must lie in (0, 1)");
    if (alpha == 0.5) return 0.0;
    if (alpha > 0.5) return -quantile_lower_half(1.0 - alpha);
    return quantile_lower_half(alpha);
}

double quantile_growth_constant(const LogNormal& model, double alpha) {
    validate(GrowthModel{model});
    return std::exp(model.mu + model.sigma * inv_norm_cdf(alpha));
}

double quantile_growth_constant(const GrowthModel& model, double alpha) {
    validate(model);
    if (const auto* g = std::get_if<LogNormal>(&model))
        return quantile_growth_constant(*g, alpha);
    if (!(alpha > 0.0 && alpha <= 1.0))
        throw domain_error("quantile level must lie in (0, 1]");
    if (const auto* b = std::get_if<TwoPoint>(&model))
        return alpha <= b->p ? b->u1 : b->u2;
    return 1.0 + std::get<FixedRate>(model).i;
}

double mean_growth_constant(const GrowthModel& model) {
    validate(model);
    if (const auto* b = std::get_if<TwoPoint>(&model))
        return b->p * b->u1 + (1.0 - b->p) * b->u2;
    if (const auto* g = std::get_if<LogNormal>(&model))
        return std::exp(g->mu + 0.5 * g->sigma * g->sigma);
    return 1.0 + std::get<FixedRate>(model).i;
}

SimulatedPaths simulate_paths(const GrowthModel& model, double s0, int horizon,
                              std::size_t n_paths, std::uint64_t seed,
                              std::size_t sample_budget) {
    validate(model);
    if (!(s0 > 0.0)) throw domain_error("initial account value must be positive");
    if (horizon < 1) throw input_error("simulation horizon must be at least 1");
    if (n_paths < 1) throw input_error("at least one path must be requested");
    const std::size_t epochs = static_cast<std::size_t>(horizon) + 1;
    if (n_paths > sample_budget / epochs)
        throw capacity_error("requested " + std::to_string(n_paths) + " paths of " +
                             std::to_string(epochs) + " epochs, budget is " +
                             std::to_string(sample_budget) + " samples");

    SimulatedPaths out;
    out.s0 = s0;
    out.horizon = horizon;
    out.n_paths = n_paths;
    out.seed = seed;
    out.values.resize(n_paths * epochs);
    for (std::size_t path = 0; path < n_paths; ++path) {
        SplitMix64 rng = path_stream(seed, path);
        double s = s0;
        out.values[path * epochs] = s;
        for (int k = 1; k <= horizon; ++k) {
            double factor;
            if (const auto* b = std::get_if<TwoPoint>(&model)) {
                factor = rng.unit() < b->p ? b->u1 : b->u2;
            } else if (const auto* g = std::get_if<LogNormal>(&model)) {
                factor = std::exp(g->mu + g->sigma * inv_norm_cdf(rng.unit()));
            } else {
                factor = 1.0 + std::get<FixedRate>(model).i;
            }
            s *= factor;
            out.values[path * epochs + static_cast<std::size_t>(k)] = s;
        }
    }
    return out;
}

SimulatedConsumption consume_paths(const SimulatedPaths& paths,
                                   const ProjectionConstants& pc) {
    const std::size_t epochs = static_cast<std::size_t>(paths.horizon) + 1;
    if (pc.a.size() + 1 != epochs)
        throw input_error("projection constants cover horizon " +
                          std::to_string(pc.a.size()) + ", paths have horizon " +
                          std::to_string(paths.horizon));
    const ClosedFormCoefficients coeff = closed_form_coefficients(pc);
    SimulatedConsumption out;
    out.x.resize(paths.values.size());
    out.a.resize(paths.values.size());
    for (std::size_t path = 0; path < paths.n_paths; ++path) {
        for (std::size_t k = 0; k < epochs; ++k) {
            const std::size_t i = path * epochs + k;
            out.x[i] = coeff.x_over_s[k] * paths.values[i];
            out.a[i] = coeff.a_over_s[k] * paths.values[i];
        }
    }
    return out;
}

PathsSummary summarize_paths(const SimulatedPaths& paths,
                             const SimulatedConsumption& consumption) {
    const std::size_t epochs = static_cast<std::size_t>(paths.horizon) + 1;
    if (consumption.x.size() != paths.values.size())
        throw input_error("consumption layout does not match the paths");
    PathsSummary sum;
    sum.s_mean.assign(epochs, 0.0);
    sum.s_sd.assign(epochs, 0.0);
    sum.x_mean.assign(epochs, 0.0);
    sum.x_sd.assign(epochs, 0.0);

    const double n = static_cast<double>(paths.n_paths);
    for (std::size_t k = 0; k < epochs; ++k) {
        double s1 = 0.0, s2 = 0.0, x1 = 0.0, x2 = 0.0;
        for (std::size_t path = 0; path < paths.n_paths; ++path) {
            const double s = paths.values[path * epochs + k];
            const double x = consumption.x[path * epochs + k];
            s1 += s;
            s2 += s * s;
            x1 += x;
            x2 += x * x;
        }
        sum.s_mean[k] = s1 / n;
        sum.x_mean[k] = x1 / n;
        if (paths.n_paths > 1) {
            sum.s_sd[k] = std::sqrt(std::max(0.0, (s2 - s1 * s1 / n) / (n - 1.0)));
            sum.x_sd[k] = std::sqrt(std::max(0.0, (x2 - x1 * x1 / n) / (n - 1.0)));
        }
    }

    std::size_t increases = 0;
    for (std::size_t path = 0; path < paths.n_paths; ++path)
        for (std::size_t k = 0; k + 1 < epochs; ++k)
            if (consumption.x[path * epochs + k + 1] > consumption.x[path * epochs + k])
                ++increases;
    sum.x_increase_frequency =
        static_cast<double>(increases) / (n * static_cast<double>(paths.horizon));
    return sum;
}

void write_paths_csv(std::ostream& os, const SimulatedPaths& paths,
                     const SimulatedConsumption& consumption) {
    if (consumption.x.size() != paths.values.size())
        throw input_error("consumption layout does not match the paths");
    const std::size_t epochs = static_cast<std::size_t>(paths.horizon) + 1;
    os << "path_id,k,s,x,a\n";
    for (std::size_t path = 0; path < paths.n_paths; ++path) {
        for (std::size_t k = 0; k < epochs; ++k) {
            const std::size_t i = path * epochs + k;
            os << path << ',' << k << ',' << detail::fmt_g17(paths.values[i]) << ','
               << detail::fmt_g17(consumption.x[i]) << ','
               << detail::fmt_g17(consumption.a[i]) << '\n';
        }
    }
}

std::string summary_to_json(const PathsSummary& summary) {
    nlohmann::json j;
    j["s_mean"] = summary.s_mean;
    j["s_sd"] = summary.s_sd;
    j["x_mean"] = summary.x_mean;
    j["x_sd"] = summary.x_sd;
    j["x_increase_frequency"] = summary.x_increase_frequency;
    return j.dump(2);
}

}  // namespace conproc
