#pragma once

#include <stdexcept>
#include <string>

namespace rcm {

// Invalid inputs: malformed grids, configs, dimension mismatches.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A time or state argument outside the domain covered by a path or table.
class RangeError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

// A fixed-point iteration that failed to contract.
class DivergenceError : public std::runtime_error {
 public:
  DivergenceError(const std::string& what, double last_residual, int iterations)
      : std::runtime_error(what), last_residual_(last_residual), iterations_(iterations) {}

  double last_residual() const noexcept { return last_residual_; }
  int iterations() const noexcept { return iterations_; }

 private:
  double last_residual_;
  int iterations_;
};

// A time integration whose state left any reasonable bound.
class InstabilityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace rcm
