#include "conproc/account.hpp"

#include <algorithm>
#include <cstddef>
#include <string>

#include "conproc/errors.hpp"

namespace conproc {

namespace {

void check_value_process(std::span<const double> s) {
    if (s.empty()) throw input_error("value process must have at least one epoch");
    for (std::size_t k = 0; k < s.size(); ++k) {
        if (!(s[k] > 0.0))
            throw domain_error("value process must be strictly positive, s[" +
                               std::to_string(k) + "] = " + std::to_string(s[k]));
    }
}

// x may carry one entry per epoch or omit the terminal one.
void check_rate_length(std::span<const double> s, std::span<const double> x) {
    if (x.size() != s.size() && x.size() + 1 != s.size())
        throw input_error("consumption rates must cover every epoch (optionally omitting the last), got " +
                          std::to_string(x.size()) + " rates for " +
                          std::to_string(s.size()) + " epochs");
}

}  // namespace

PathProcess PathProcess::from_values(std::vector<double> values) {
    PathProcess p;
    p.times.resize(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) p.times[i] = static_cast<int>(i);
    p.values = std::move(values);
    return p;
}

void PathProcess::validate() const {
    if (times.size() != values.size())
        throw input_error("path process times and values must have equal length");
    for (std::size_t i = 1; i < times.size(); ++i)
        if (times[i] <= times[i - 1])
            throw input_error("path process times must be strictly increasing");
}

std::vector<double> evolve_account(std::span<const double> s,
                                   std::span<const double> x) {
    check_value_process(s);
    check_rate_length(s, x);
    std::vector<double> a(s.size());
    a[0] = s[0];
    for (std::size_t k = 0; k + 1 < s.size(); ++k)
        a[k + 1] = (a[k] - x[k]) * s[k + 1] / s[k];
    return a;
}

namespace {

// Index of the first epoch violating regularity, or npos.
std::size_t first_irregular_epoch(std::span<const double> s,
                                  std::span<const double> x,
                                  const std::vector<double>& a) {
    const double tol = kRegularityTol * s[0];
    for (std::size_t k = 0; k < x.size(); ++k) {
        if (x[k] < -tol || x[k] > a[k] + tol) return k;
    }
    return static_cast<std::size_t>(-1);
}

}  // namespace

bool is_regular(std::span<const double> s, std::span<const double> x) {
    const std::vector<double> a = evolve_account(s, x);
    return first_irregular_epoch(s, x, a) == static_cast<std::size_t>(-1);
}

void require_regular(std::span<const double> s, std::span<const double> x) {
    const std::vector<double> a = evolve_account(s, x);
    const std::size_t k = first_irregular_epoch(s, x, a);
    if (k != static_cast<std::size_t>(-1))
        throw regularity_error("consumption leaves [0, A] at epoch " + std::to_string(k) +
                               ": x = " + std::to_string(x[k]) +
                               ", account = " + std::to_string(a[k]));
}

RelativeRates relative_from_absolute(std::span<const double> s,
                                     std::span<const double> x) {
    require_regular(s, x);
    const std::vector<double> a = evolve_account(s, x);
    const double exhausted = kRegularityTol * s[0];
    RelativeRates r;
    r.z.resize(x.size());
    for (std::size_t k = 0; k < x.size(); ++k) {
        if (a[k] <= exhausted) {
            r.z[k] = 0.0;  // exhausted account consumes at rate zero
        } else {
            r.z[k] = std::clamp(x[k] / a[k], 0.0, 1.0);
        }
    }
    return r;
}

AccountState absolute_from_relative(std::span<const double> s,
                                    std::span<const double> z) {
    check_value_process(s);
    if (z.size() != s.size())
        throw input_error("relative rates must cover every epoch, got " +
                          std::to_string(z.size()) + " rates for " +
                          std::to_string(s.size()) + " epochs");
    for (std::size_t k = 0; k < z.size(); ++k)
        if (!(z[k] >= 0.0 && z[k] <= 1.0))
            throw input_error("relative rate outside [0, 1] at epoch " + std::to_string(k));

    AccountState st;
    st.s.assign(s.begin(), s.end());
    st.x.resize(s.size());
    st.a.resize(s.size());
    st.a[0] = s[0];
    for (std::size_t k = 0; k < s.size(); ++k) {
        st.x[k] = z[k] * st.a[k];
        if (k + 1 < s.size()) st.a[k + 1] = (st.a[k] - st.x[k]) * s[k + 1] / s[k];
    }
    return st;
}

RescaledAccount rescale(std::span<const double> f, std::span<const double> s,
                        std::span<const double> x) {
    check_value_process(s);
    check_rate_length(s, x);
    if (f.size() != s.size())
        throw input_error("factor process must cover every epoch, got " +
                          std::to_string(f.size()) + " factors for " +
                          std::to_string(s.size()) + " epochs");
    for (std::size_t k = 0; k < f.size(); ++k)
        if (!(f[k] > 0.0))
            throw domain_error("factor process must be strictly positive, f[" +
                               std::to_string(k) + "] = " + std::to_string(f[k]));

    const std::vector<double> a = evolve_account(s, x);
    RescaledAccount out;
    out.s.resize(s.size());
    out.x.resize(x.size());
    out.a.resize(s.size());
    for (std::size_t k = 0; k < s.size(); ++k) {
        out.s[k] = f[k] * s[k];
        out.a[k] = f[k] * a[k];
    }
    for (std::size_t k = 0; k < x.size(); ++k) out.x[k] = f[k] * x[k];
    return out;
}

}  // namespace conproc
