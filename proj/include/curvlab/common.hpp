#pragma once

#include <stdexcept>
#include <string>

namespace curvlab {

// Default absolute tolerance for float-mode zero tests. Exact modes never
// consult a tolerance.
inline constexpr double kDefaultTol = 1e-9;

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Arithmetic between incompatible scalar variants or polynomial rings.
struct KindError : Error {
  using Error::Error;
};

// Out-of-domain request (degenerate form, bad quantity parameters, arity
// mismatch).
struct DomainError : Error {
  using Error::Error;
};

// A validated structural invariant of a model/jet does not hold. CLI maps
// this to exit code 3.
struct InvariantViolation : Error {
  using Error::Error;
};

// Malformed configuration or input files. CLI maps this to exit code 2.
struct UsageError : Error {
  using Error::Error;
};

}  // namespace curvlab
