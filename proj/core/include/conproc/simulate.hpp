#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <variant>
#include <vector>

#include "conproc/iid.hpp"

namespace conproc {

// One-period growth factor u1 with probability p, else u2. 0 < u1 < u2.
struct TwoPoint {
    double u1 = 1.0;
    double u2 = 1.0;
    double p = 0.5;
};

// log(S_{k+1}/S_k) ~ N(mu, sigma^2) independently across periods.
struct LogNormal {
    double mu = 0.0;
    double sigma = 1.0;
};

// Deterministic growth at rate i per period.
struct FixedRate {
    double i = 0.0;
};

using GrowthModel = std::variant<TwoPoint, LogNormal, FixedRate>;

void validate(const GrowthModel& model);  // throws domain_error

double norm_cdf(double x);

// Rational initial guess refined by one Newton step against norm_cdf;
// |norm_cdf(result) - alpha| stays within 1e-12. alpha in (0, 1).
double inv_norm_cdf(double alpha);

// alpha-quantile of the one-period growth factor.
double quantile_growth_constant(const LogNormal& model, double alpha);
double quantile_growth_constant(const GrowthModel& model, double alpha);

// Expected one-period growth factor.
double mean_growth_constant(const GrowthModel& model);

inline constexpr std::size_t kDefaultSampleBudget = std::size_t{1} << 24;
inline constexpr std::uint64_t kDefaultSeed = 12345;

// Simulated value paths, row-major: values[path * (K + 1) + k].
// Each path draws from its own counter-derived substream, so path j is
// identical no matter how many paths are requested.
struct SimulatedPaths {
    double s0 = 1.0;
    int horizon = 0;
    std::size_t n_paths = 0;
    std::uint64_t seed = kDefaultSeed;
    std::vector<double> values;

    double at(std::size_t path, int k) const {
        return values[path * (static_cast<std::size_t>(horizon) + 1) +
                      static_cast<std::size_t>(k)];
    }
};

SimulatedPaths simulate_paths(const GrowthModel& model, double s0, int horizon,
                              std::size_t n_paths, std::uint64_t seed = kDefaultSeed,
                              std::size_t sample_budget = kDefaultSampleBudget);

// Applies closed-form coefficients to every simulated path.
struct SimulatedConsumption {
    std::vector<double> x;  // same row-major layout as SimulatedPaths
    std::vector<double> a;
};
SimulatedConsumption consume_paths(const SimulatedPaths& paths,
                                   const ProjectionConstants& pc);

// Per-epoch moments plus the pooled frequency of one-step consumption
// increases across all paths and epochs.
struct PathsSummary {
    std::vector<double> s_mean, s_sd;
    std::vector<double> x_mean, x_sd;
    double x_increase_frequency = 0.0;
};
PathsSummary summarize_paths(const SimulatedPaths& paths,
                             const SimulatedConsumption& consumption);

// Columns: path_id,k,s,x,a. Full double precision.
void write_paths_csv(std::ostream& os, const SimulatedPaths& paths,
                     const SimulatedConsumption& consumption);

std::string summary_to_json(const PathsSummary& summary);

}  // namespace conproc
