#pragma once

#include <stdexcept>
#include <string>

namespace chemolimit {

/// Invalid or inconsistent user configuration.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what, int line = 0)
      : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + what : what),
        line_(line) {}
  int line() const noexcept { return line_; }

 private:
  int line_;
};

/// A computation failed numerically (non-convergence, blow-up, vanished interface).
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what, double residual = 0.0)
      : std::runtime_error(what), residual_(residual) {}
  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

/// Argument outside the domain where an operation is defined.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Caller broke an API contract, e.g. mixed fields from different grids.
class ContractError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace chemolimit
