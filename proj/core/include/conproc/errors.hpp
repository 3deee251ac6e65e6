#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace conproc {

// Value outside its mathematical domain (non-positive account value,
// probability outside its interval, and the like).
class domain_error : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// Structurally malformed input: mismatched lengths, bad epochs, broken
// tree topology, unparseable files.
class input_error : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Consumption exceeds the available account beyond tolerance, or is
// negative beyond tolerance.
class regularity_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Requested construction would exceed the configured node or sample budget.
class capacity_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A perpetual start rate violates the feasibility bound. failing_epoch is
// the first k at which the relative rate leaves (0, 1).
class feasibility_error : public std::runtime_error {
public:
    feasibility_error(const std::string& what, std::size_t k)
        : std::runtime_error(what), failing_epoch(k) {}
    std::size_t failing_epoch;
};

// A consumption process admits no projection family (consumption hits
// zero, or the whole account, before the horizon).
class non_extractable_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A rate family admits no projection constants (an interior zero after a
// positive rate cannot be produced by any constant family).
class non_representable_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A drawdown consumption limit lies outside the attainable range.
// x0_at_full is the rate the plan pays when the whole fund annuitises.
class infeasible_limit_error : public std::runtime_error {
public:
    infeasible_limit_error(const std::string& what, double x0_full)
        : std::runtime_error(what), x0_at_full(x0_full) {}
    double x0_at_full;
};

// Plan parameters make the requested quantity undefined (terminal
// fraction zero means nothing is ever annuitised).
class degenerate_plan_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace conproc
