#pragma once

#include <stdexcept>
#include <string>

namespace leg {

// Precondition violated by a caller (bad base point, non-horizontal input...).
struct DomainError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Frame or face that cannot be normalized.
struct DegeneracyError : std::runtime_error {
  DegeneracyError(const std::string& what, long index = -1)
      : std::runtime_error(what), index(index) {}
  long index;
};

// A constraint the input was supposed to satisfy does not hold.
struct ConstraintViolation : std::runtime_error {
  ConstraintViolation(const std::string& what, long worst = -1, double value = 0.0)
      : std::runtime_error(what), worst(worst), value(value) {}
  long worst;
  double value;
};

// Localisation hypothesis of the weak-stationarity residual: the level set
// meets the support of h.
struct LocalisationError : DomainError {
  LocalisationError(const std::string& what, long face) : DomainError(what), face(face) {}
  long face;
};

// Too few faces to resolve a requested region.
struct ResolutionError : DomainError {
  using DomainError::DomainError;
};

struct StepRejected : std::runtime_error {
  StepRejected(const std::string& what, double residual)
      : std::runtime_error(what), residual(residual) {}
  double residual;
};

struct SolverAbort : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ValidationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace leg
