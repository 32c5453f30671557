#pragma once

#include <stdexcept>
#include <string>

namespace sphint {

/// Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Mismatched lengths between paired inputs (tilts vs outliers, ...).
class ShapeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Quadrature or root finding did not reach its tolerance.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An iterative optimizer stopped before its stationarity test passed.
class ConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A structural hypothesis on the input (e.g. negativity of a variance
/// profile on the complement of the constants) does not hold.
class AssumptionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace sphint
