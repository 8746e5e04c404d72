#pragma once

#include <stdexcept>
#include <string>

namespace varsel {

// Base class for all library errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Design matrix (or a requested column subset) has linearly dependent columns.
struct RankDeficientError : Error {
    using Error::Error;
};

// Fit interpolates the response; the Gaussian log-likelihood diverges.
struct DegenerateFitError : Error {
    using Error::Error;
};

// IRLS hit its iteration cap without meeting the convergence tolerance.
struct NotConvergedError : Error {
    using Error::Error;
};

// Exhaustive enumeration requested for a model space above the guard.
struct SpaceTooLargeError : Error {
    using Error::Error;
};

// Every candidate model failed to fit.
struct AllModelsDegenerateError : Error {
    using Error::Error;
};

// A cross-validation training fold is single-class (Bernoulli).
struct FoldDegenerateError : Error {
    using Error::Error;
};

// Metrics requested against an empty true support.
struct TruthEmptyError : Error {
    using Error::Error;
};

// Criterion evaluation on a non-finite log-likelihood.
struct NonFiniteLoglikError : Error {
    using Error::Error;
};

// Vector/matrix dimensions do not agree.
struct DimensionError : Error {
    using Error::Error;
};

// Benchmark configuration failed to parse or validate. Carries a line number
// (0 when the problem is not tied to a single line).
struct ConfigError : Error {
    int line;
    ConfigError(int line_, const std::string& what_)
        : Error(line_ > 0 ? "config line " + std::to_string(line_) + ": " + what_ : what_),
          line(line_) {}
};

} // namespace varsel
