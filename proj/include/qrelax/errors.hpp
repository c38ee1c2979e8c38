#pragma once

#include <stdexcept>
#include <string>

namespace qrelax {

// Base class for everything thrown by this library.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Bad or inconsistent user configuration (CLI exit code 2).
struct ConfigError : Error {
  using Error::Error;
};

// Runtime numerical failures (CLI exit code 1).
struct NumericalError : Error {
  using Error::Error;
};

// mean(rho - g) drifted away from zero, so the zero-mean Poisson problem
// has no solution; signals a corrupted state or a bad doping profile.
struct CompatibilityError : NumericalError {
  using NumericalError::NumericalError;
};

// Density dropped below the vacuum floor while strict flooring was requested.
struct VacuumError : NumericalError {
  using NumericalError::NumericalError;
};

// A step was attempted with dt above the configured stability bound.
struct StabilityError : NumericalError {
  using NumericalError::NumericalError;
};

// Density positivity lost beyond the abort threshold during a run.
struct PositivityError : NumericalError {
  using NumericalError::NumericalError;
};

// Nonfinite values appeared in an evolved field.
struct NaNError : NumericalError {
  using NumericalError::NumericalError;
};

// Two trajectories cannot be compared (different grid or snapshot times).
struct MismatchError : NumericalError {
  using NumericalError::NumericalError;
};

// Rate fitting asked for on degenerate data (nonpositive errors).
struct DegenerateError : NumericalError {
  using NumericalError::NumericalError;
};

// A property in the verification suite failed (CLI exit code 3).
struct PropertyError : Error {
  using Error::Error;
};

}  // namespace qrelax
