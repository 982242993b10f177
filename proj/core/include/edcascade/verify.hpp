#pragma once

// The oracle matrix behind `verify`: closed form against quadrature against
// Monte Carlo, the two evaluation paths of the generic integral, and the
// structural properties of the density and of the detection curves.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace edcascade::verify {

struct VerifyOptions {
    /// Reduced grid and sample count, for a run well under a minute.
    bool fast = false;
    /// Monte Carlo trials per cell; 0 picks 10^6 (10^5 with fast).
    std::uint64_t samples = 0;
    std::uint64_t seed = 42;
    /// Replaces every numeric agreement tolerance (not the 3-sigma MC bands).
    std::optional<double> tolerance;
    unsigned threads = 0;
};

struct CheckResult {
    std::string name;
    bool passed;
    /// Worst observed deviation (or the tracked quantity) and its bound.
    double measured;
    double bound;
    std::string detail;
    /// Reported but never fails the run.
    bool informational = false;
};

struct VerifyReport {
    std::vector<CheckResult> checks;
    double seconds = 0.0;

    bool all_passed() const;
};

VerifyReport run_verify(const VerifyOptions& opts);

void write_text(const VerifyReport& report, std::ostream& out);
void write_json(const VerifyReport& report, std::ostream& out);

}  // namespace edcascade::verify
