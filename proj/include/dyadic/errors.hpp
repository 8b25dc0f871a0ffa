#pragma once

#include <stdexcept>
#include <string>

namespace dyadic {

// A point coordinate, file row or other datum lies outside the accepted domain.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// A caller-supplied parameter is invalid (depth, order, size, ...).
class ArgumentError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Experiment or CLI configuration cannot be run as given.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Numerical preconditions fail: degenerate histogram, improper posterior,
// inconsistent mass oracle, non-terminating solver.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Problem size exceeds what a dense/desk-scale routine accepts.
class CapacityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace dyadic
