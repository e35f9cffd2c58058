#pragma once

#include <stdexcept>
#include <string>

namespace pbm {

// Base class for all recoverable numerical/statistical failures.
// Input-contract violations (non-positive parameters, shape mismatches)
// throw std::invalid_argument instead.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Adaptive quadrature or an iterative solve exhausted its budget.
struct NonConvergence : Error {
  using Error::Error;
};

// Root bracket endpoints do not straddle a sign change.
struct BadBracket : Error {
  using Error::Error;
};

// A function evaluation produced NaN or infinity where a finite
// value is required.
struct NonFinite : Error {
  using Error::Error;
};

// Cholesky factorization hit a non-positive pivot.
struct NotPositiveDefinite : Error {
  using Error::Error;
};

// Sample statistics degenerate (zero empirical variance).
struct DegenerateSample : Error {
  using Error::Error;
};

// Optimizer restart loop exhausted without stabilizing.
struct OptimFailure : Error {
  using Error::Error;
};

// Path-based oracle could not complete a renewal cycle.
struct HorizonTooShort : Error {
  using Error::Error;
};

// Too many Monte Carlo replications failed to converge.
struct StudyFailure : Error {
  using Error::Error;
};

}  // namespace pbm
