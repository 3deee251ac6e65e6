#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace conproc {

// Horizon beyond which suffix products and sums move to log space.
inline constexpr std::size_t kLogSpaceHorizon = 50;

// Deterministic one-step projection constants a_0..a_{K-1} plus the
// terminal fraction a_K in [0, 1]. Growth-independent models (conditional
// expectation or quantile of an i.i.d. growth factor) land here.
struct ProjectionConstants {
    std::vector<double> a;
    double a_terminal = 1.0;
};

// Deterministic relative consumption rates z_0..z_K.
struct DeterministicRates {
    std::vector<double> z;
};

// Fractions of the optionless account value: X_k = x_over_s[k] * S_k and
// A_k = a_over_s[k] * S_k along any path of the growth model.
struct ClosedFormCoefficients {
    std::vector<double> x_over_s;
    std::vector<double> a_over_s;
};

struct ClosedFormPath {
    std::vector<double> x;
    std::vector<double> a;
};

// z_k = (prod_{j=k..K} a_j) / (1 + sum_{j=k..K-1} prod_{i=j..K} a_i),
// writing a_K for the terminal fraction.
DeterministicRates rates_from_constants(const ProjectionConstants& pc);

// Inverse of rates_from_constants: a_k = z_k / ((1 - z_k) z_{k+1}) past
// the leading zeros, a_K = z_K. A zero rate after a positive one admits
// no constant family and throws non_representable_error.
ProjectionConstants constants_from_rates(const DeterministicRates& rates);

ClosedFormCoefficients closed_form_coefficients(const ProjectionConstants& pc);

// Applies the closed-form coefficients to a realised path of S.
ClosedFormPath x_closed_form(const ProjectionConstants& pc,
                             std::span<const double> s_path);

using ASequence = std::function<double(std::size_t)>;

inline constexpr std::size_t kDefaultPerpetualProbe = 10000;

// Perpetual plan: z_{k+1} = z_k / ((1 - z_k) a_k), never exhausting the
// account. next() returns z_0, z_1, ... and throws feasibility_error at
// the first epoch where the rate leaves (0, 1).
class PerpetualZSequence {
public:
    PerpetualZSequence(ASequence a, double z0);
    PerpetualZSequence(double constant_a, double z0);

    double next();
    std::size_t next_epoch() const noexcept { return first_ ? 0 : k_ + 1; }

private:
    ASequence a_;
    double z_;
    std::size_t k_ = 0;
    bool first_ = true;
};

// Direct evaluation of z_k = z_0 / (prod_{i<k} a_i - z_0 * sum_{i<k}
// prod_{j=i..k-1} a_j), validating feasibility at every epoch up to k.
double perpetual_z_closed_form(const ASequence& a, double z0, std::size_t k);

struct PerpetualBound {
    double z0_max = 0.0;
    // Whether some finite epoch achieves the bound. The bound ratios
    // decrease strictly whenever the constants are positive, so a finite
    // scan never attains the infimum.
    bool attained = false;
};

// Infimum over k <= probe of prod_{i<k} a_i / (1 + sum of partial
// products), the largest start rate that stays feasible on the window.
PerpetualBound perpetual_z0_max(const ASequence& a,
                                std::size_t probe = kDefaultPerpetualProbe);

// Constant growth: a > 1 gives 1 - 1/a, otherwise no positive start rate
// survives forever.
PerpetualBound perpetual_z0_max(double constant_a);

}  // namespace conproc
