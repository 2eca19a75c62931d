#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace onebit::validation {

/// One row of a validation table.
struct CheckResult {
    std::string name;
    int cases = 0;
    int failures = 0;
    /// Cases where both sides underflowed and no comparison was made.
    int skipped = 0;
    double worst_error = 0.0;
    double tolerance = 0.0;
    bool passed() const { return failures == 0; }
};

/// Every closed-form moment against its quadrature oracle on `draws`
/// randomized parameter sets. Errors are relative to the natural scale of
/// each quantity (E|x| for first moments, E x^2 for variances).
std::vector<CheckResult> run_oracle_suite(std::uint64_t seed, int draws = 500, double tolerance = 1e-6);

/// Structural invariants: symmetries, limits, ranges, determinism.
std::vector<CheckResult> run_selftest(std::uint64_t seed);

/// Fixed-width pass/fail table.
std::string format_checks(const std::vector<CheckResult>& checks);

}  // namespace onebit::validation
