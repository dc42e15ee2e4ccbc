#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace emt {

// Input outside a function's mathematical domain.
class DomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Malformed caller data: unsorted series, wrong dimensions, incomplete tables.
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A computed quantity left the finite range or hit a singular point.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NonConvergenceError : public std::runtime_error {
 public:
  NonConvergenceError(const std::string& what, double last_residual)
      : std::runtime_error(what), residual_(last_residual) {}
  [[nodiscard]] double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

// Enumeration would exceed the configured search-space bound.
class SizeError : public std::runtime_error {
 public:
  SizeError(const std::string& what, std::size_t cardinality)
      : std::runtime_error(what), cardinality_(cardinality) {}
  [[nodiscard]] std::size_t cardinality() const noexcept { return cardinality_; }

 private:
  std::size_t cardinality_;
};

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace emt
