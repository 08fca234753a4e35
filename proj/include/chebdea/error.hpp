#pragma once

#include <stdexcept>
#include <string>

namespace chebdea {

// Bad caller input: malformed problems, schema violations, out-of-range indices.
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Argument outside the mathematical domain of an operation (e.g. p <= 1 for ln-based regressors).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Solver breakdown that should be unreachable for well-posed models.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Rank-deficient design matrix.
class SingularDesignError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

}  // namespace chebdea
