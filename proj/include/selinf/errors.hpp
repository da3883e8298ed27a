#pragma once

#include <stdexcept>
#include <string>

namespace selinf {

/// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Bad or unsupported input (non-finite data, dimension mismatch, lambda = 0
/// where a positive penalty is required, n <= p when sigma must be estimated).
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// Selected Gram matrix too ill-conditioned to invert reliably.
class DegenerateDesignError : public Error {
 public:
  using Error::Error;
};

/// Solver failed to reach the requested tolerances.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& msg, double kkt_residual)
      : Error(msg), kkt_residual(kkt_residual) {}
  double kkt_residual;
};

/// A solution whose coefficients and subgradient disagree.
class InconsistentSolutionError : public Error {
 public:
  using Error::Error;
};

/// Request exceeds an enumeration cap (2^|M| sign patterns).
class CapacityError : public Error {
 public:
  using Error::Error;
};

/// Truncation region carries no probability mass.
class DegenerateRegionError : public Error {
 public:
  using Error::Error;
};

/// Root finding or other numerics failed; message reports what was achieved.
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// An internal invariant was violated (e.g. observed event outside its own
/// selection polyhedron); indicates a bug rather than bad input.
class InternalError : public Error {
 public:
  using Error::Error;
};

}  // namespace selinf
