#pragma once

#include <stdexcept>
#include <string>

namespace edcascade {

// Root of every error the library raises.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Argument outside the mathematical domain of an operation.
class DomainError : public Error {
public:
    using Error::Error;
};

// Result not representable in double precision.
class OverflowError : public Error {
public:
    using Error::Error;
};

// Inconsistent Meijer G parameter set or contour placement.
class ParameterError : public Error {
public:
    using Error::Error;
};

// A refinement loop ran out of budget; carries the last two estimates.
class NonConvergenceError : public Error {
public:
    NonConvergenceError(const std::string& what, double previous, double last)
        : Error(what + " (last refinements: " + std::to_string(previous) + ", " +
                std::to_string(last) + ")"),
          previous_(previous), last_(last) {}

    double previous() const noexcept { return previous_; }
    double last() const noexcept { return last_; }

private:
    double previous_;
    double last_;
};

// An integral whose integrand tail does not decay.
class DivergentIntegralError : public Error {
public:
    using Error::Error;
};

// A probability fell outside [0,1] by more than roundoff.
class NumericalConsistencyError : public Error {
public:
    using Error::Error;
};

// A quantity that must be real came back with a significant imaginary part.
class BranchInconsistencyError : public Error {
public:
    using Error::Error;
};

}  // namespace edcascade
