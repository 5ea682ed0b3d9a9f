#pragma once

#include <stdexcept>
#include <string>

namespace nlspread {

/// Raised when an argument or configuration violates a documented precondition.
class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised when a numerical procedure fails (non-convergence, scheme violation,
/// front leaving the measurable window). Carries the reporting module name.
class NumericalFailure : public std::runtime_error {
 public:
  NumericalFailure(std::string module, const std::string& what)
      : std::runtime_error(module + ": " + what), module_(std::move(module)) {}
  const std::string& module() const noexcept { return module_; }

 private:
  std::string module_;
};

}  // namespace nlspread
