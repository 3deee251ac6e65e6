#pragma once

#include <span>
#include <vector>

namespace conproc {

// Absolute regularity tolerance after scaling the account to S_0 = 1.
// Comparisons against account values use kRegularityTol * S_0.
inline constexpr double kRegularityTol = 1e-9;

// Discrete-time sample path: values[i] observed at epoch times[i].
// times must be strictly increasing and the lengths must match.
struct PathProcess {
    std::vector<int> times;
    std::vector<double> values;

    // values[i] at epoch i.
    static PathProcess from_values(std::vector<double> values);
    void validate() const;  // throws input_error
};

// Account path with consumption. s is the value process without
// consumption, x the absolute consumption rates, a the account.
struct AccountState {
    std::vector<double> s;
    std::vector<double> x;
    std::vector<double> a;
};

struct RelativeRates {
    std::vector<double> z;  // consumption fractions of the running account
};

struct RescaledAccount {
    std::vector<double> s;
    std::vector<double> x;
    std::vector<double> a;
};

// Account recursion A_0 = S_0, A_{k+1} = (A_k - X_k) * S_{k+1} / S_k.
// x may omit the terminal rate (it does not affect the account at
// epochs up to the horizon). No regularity requirement.
std::vector<double> evolve_account(std::span<const double> s,
                                   std::span<const double> x);

// 0 <= X_k <= A_k at every epoch, within kRegularityTol * S_0.
bool is_regular(std::span<const double> s, std::span<const double> x);

// Like is_regular but throws regularity_error naming the first bad epoch.
void require_regular(std::span<const double> s, std::span<const double> x);

// Z_k = X_k / A_k, with Z_k = 0 where the account is exhausted.
// Requires a regular (s, x); results are clamped into [0, 1].
RelativeRates relative_from_absolute(std::span<const double> s,
                                     std::span<const double> x);

// Forward construction X_k = Z_k * A_k from fractions z in [0, 1].
AccountState absolute_from_relative(std::span<const double> s,
                                    std::span<const double> z);

// Strictly positive factor process F applied to (s, x). The rescaled
// account is F_k * A_k; the caller can cross-check by evolving (Fs, Fx).
RescaledAccount rescale(std::span<const double> f, std::span<const double> s,
                        std::span<const double> x);

}  // namespace conproc
