#include "conproc/iid.hpp"

#include <cmath>
#include <limits>
#include <string>
#include <utility>

#include "conproc/errors.hpp"

namespace conproc {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double log_add_exp(double x, double y) {
    if (x == kNegInf) return y;
    if (y == kNegInf) return x;
    const double hi = std::max(x, y);
    return hi + std::log1p(std::exp(std::min(x, y) - hi));
}

void check_constants(const ProjectionConstants& pc) {
    for (std::size_t k = 0; k < pc.a.size(); ++k)
        if (!(pc.a[k] >= 0.0))
            throw input_error("projection constant negative at epoch " +
                              std::to_string(k));
    if (!(pc.a_terminal >= 0.0 && pc.a_terminal <= 1.0))
        throw input_error("terminal fraction outside [0, 1]");
}

// Suffix products P_k = prod_{j=k..K} a_j with a_K the terminal fraction,
// in log space. P has K+2 entries; P[K+1] = 1 (empty product).
std::vector<double> log_suffix_products(const ProjectionConstants& pc) {
    const std::size_t K = pc.a.size();
    std::vector<double> logP(K + 2);
    logP[K + 1] = 0.0;
    logP[K] = pc.a_terminal > 0.0 ? std::log(pc.a_terminal) : kNegInf;
    for (std::size_t k = K; k-- > 0;)
        logP[k] = pc.a[k] > 0.0 ? std::log(pc.a[k]) + logP[k + 1] : kNegInf;
    return logP;
}

}  // namespace

DeterministicRates rates_from_constants(const ProjectionConstants& pc) {
    check_constants(pc);
    const std::size_t K = pc.a.size();
    DeterministicRates out;
    out.z.resize(K + 1);

    if (K <= kLogSpaceHorizon) {
        std::vector<double> P(K + 2);
        P[K + 1] = 1.0;
        P[K] = pc.a_terminal;
        for (std::size_t k = K; k-- > 0;) P[k] = pc.a[k] * P[k + 1];
        double T = 0.0;  // T_k = sum_{j=k..K-1} P_j = P_k + T_{k+1}
        out.z[K] = pc.a_terminal;
        for (std::size_t k = K; k-- > 0;) {
            T += P[k];
            out.z[k] = P[k] / (1.0 + T);
        }
        return out;
    }

    const std::vector<double> logP = log_suffix_products(pc);
    out.z[K] = pc.a_terminal;
    double logT = kNegInf;
    for (std::size_t k = K; k-- > 0;) {
        logT = log_add_exp(logT, logP[k]);
        out.z[k] = std::exp(logP[k] - log_add_exp(0.0, logT));
    }
    return out;
}

ProjectionConstants constants_from_rates(const DeterministicRates& rates) {
    const std::vector<double>& z = rates.z;
    if (z.empty()) throw input_error("rate family must cover at least one epoch");
    const std::size_t K = z.size() - 1;
    for (std::size_t k = 0; k < K; ++k)
        if (!(z[k] >= 0.0 && z[k] < 1.0))
            throw input_error("interior rate outside [0, 1) at epoch " +
                              std::to_string(k));
    if (!(z[K] >= 0.0 && z[K] <= 1.0))
        throw input_error("terminal rate outside [0, 1]");

    std::size_t first_positive = z.size();
    for (std::size_t k = 0; k <= K; ++k) {
        if (z[k] > 0.0) {
            first_positive = k;
            break;
        }
    }

    ProjectionConstants pc;
    pc.a.assign(K, 0.0);
    if (first_positive == z.size()) {
        pc.a_terminal = 0.0;  // never consumes; all constants vanish
        return pc;
    }
    for (std::size_t k = first_positive + 1; k <= K; ++k)
        if (z[k] == 0.0)
            throw non_representable_error(
                "rate vanishes at epoch " + std::to_string(k) +
                " after a positive rate at epoch " + std::to_string(first_positive) +
                "; no constant family produces that");

    for (std::size_t k = first_positive; k < K; ++k)
        pc.a[k] = z[k] / ((1.0 - z[k]) * z[k + 1]);
    pc.a_terminal = z[K];
    return pc;
}

ClosedFormCoefficients closed_form_coefficients(const ProjectionConstants& pc) {
    check_constants(pc);
    const std::size_t K = pc.a.size();
    ClosedFormCoefficients out;
    out.x_over_s.resize(K + 1);
    out.a_over_s.resize(K + 1);

    if (K <= kLogSpaceHorizon) {
        std::vector<double> P(K + 2);
        P[K + 1] = 1.0;
        P[K] = pc.a_terminal;
        for (std::size_t k = K; k-- > 0;) P[k] = pc.a[k] * P[k + 1];
        double T0 = 0.0;
        for (std::size_t j = 0; j < K; ++j) T0 += P[j];
        for (std::size_t k = 0; k <= K; ++k) out.x_over_s[k] = P[k] / (1.0 + T0);
    } else {
        const std::vector<double> logP = log_suffix_products(pc);
        double logT0 = kNegInf;
        for (std::size_t j = 0; j < K; ++j) logT0 = log_add_exp(logT0, logP[j]);
        const double logDen = log_add_exp(0.0, logT0);
        for (std::size_t k = 0; k <= K; ++k)
            out.x_over_s[k] = std::exp(logP[k] - logDen);
    }

    double consumed = 0.0;
    for (std::size_t k = 0; k <= K; ++k) {
        out.a_over_s[k] = 1.0 - consumed;
        consumed += out.x_over_s[k];
    }
    return out;
}

ClosedFormPath x_closed_form(const ProjectionConstants& pc,
                             std::span<const double> s_path) {
    if (s_path.size() != pc.a.size() + 1)
        throw input_error("path carries " + std::to_string(s_path.size()) +
                          " epochs for horizon " + std::to_string(pc.a.size()));
    for (std::size_t k = 0; k < s_path.size(); ++k)
        if (!(s_path[k] > 0.0))
            throw domain_error("value process must be strictly positive, s[" +
                               std::to_string(k) + "] = " + std::to_string(s_path[k]));
    const ClosedFormCoefficients coeff = closed_form_coefficients(pc);
    ClosedFormPath out;
    out.x.resize(s_path.size());
    out.a.resize(s_path.size());
    for (std::size_t k = 0; k < s_path.size(); ++k) {
        out.x[k] = coeff.x_over_s[k] * s_path[k];
        out.a[k] = coeff.a_over_s[k] * s_path[k];
    }
    return out;
}

namespace {

double checked_growth(const ASequence& a, std::size_t k) {
    const double v = a(k);
    if (!(v > 0.0))
        throw domain_error("growth constant must be strictly positive at epoch " +
                           std::to_string(k));
    return v;
}

void check_start_rate(double z0) {
    if (!(z0 > 0.0))
        throw input_error("start rate must be strictly positive");
    if (!(z0 < 1.0))
        throw feasibility_error("start rate must lie below 1", 0);
}

ASequence constant_sequence(double a) {
    if (!(a > 0.0))
        throw domain_error("growth constant must be strictly positive");
    return [a](std::size_t) { return a; };
}

}  // namespace

PerpetualZSequence::PerpetualZSequence(ASequence a, double z0)
    : a_(std::move(a)), z_(z0) {
    check_start_rate(z0);
}

PerpetualZSequence::PerpetualZSequence(double constant_a, double z0)
    : PerpetualZSequence(constant_sequence(constant_a), z0) {}

double PerpetualZSequence::next() {
    if (first_) {
        first_ = false;
        return z_;
    }
    const double growth = checked_growth(a_, k_);
    z_ = z_ / ((1.0 - z_) * growth);
    ++k_;
    if (!(z_ > 0.0 && z_ < 1.0))
        throw feasibility_error("start rate infeasible: relative rate leaves (0, 1) at epoch " +
                                    std::to_string(k_),
                                k_);
    return z_;
}

double perpetual_z_closed_form(const ASequence& a, double z0, std::size_t k) {
    check_start_rate(z0);
    // z_i = z0 * R_i / (1 - z0 * sum_{j<i} R_j) with R_i the reciprocal
    // running product; every intermediate epoch must stay feasible.
    double Q = 1.0;
    double R = 1.0;
    double sumR = 0.0;
    double z = z0;
    for (std::size_t i = 1; i <= k; ++i) {
        sumR += R;
        Q *= checked_growth(a, i - 1);
        R = 1.0 / Q;
        const double den = 1.0 - z0 * sumR;
        z = den > 0.0 ? z0 * R / den : 2.0;  // sentinel outside (0, 1)
        if (!(z > 0.0 && z < 1.0))
            throw feasibility_error("start rate infeasible: relative rate leaves (0, 1) at epoch " +
                                        std::to_string(i),
                                    i);
    }
    return z;
}

PerpetualBound perpetual_z0_max(const ASequence& a, std::size_t probe) {
    // ratio_k = 1 / D_k with D_0 = 1, D_{k+1} = D_k + 1/prod_{i<=k} a_i.
    // D grows strictly, so the infimum over a window sits at its end and
    // is never attained at a finite epoch.
    double Q = 1.0;
    double D = 1.0;
    double best = 1.0;
    for (std::size_t k = 1; k <= probe; ++k) {
        Q *= checked_growth(a, k - 1);
        D += 1.0 / Q;
        best = std::min(best, 1.0 / D);
    }
    return PerpetualBound{best, false};
}

PerpetualBound perpetual_z0_max(double constant_a) {
    if (!(constant_a > 0.0))
        throw domain_error("growth constant must be strictly positive");
    if (constant_a > 1.0) return PerpetualBound{1.0 - 1.0 / constant_a, false};
    return PerpetualBound{0.0, false};
}

}  // namespace conproc
