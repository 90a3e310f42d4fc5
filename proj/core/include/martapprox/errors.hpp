#pragma once

#include <stdexcept>
#include <string>

namespace martapprox {

/// Raised when a computed object breaks one of its documented invariants.
/// Carries the module and invariant name so drivers can report a category.
class InvariantViolation : public std::runtime_error {
 public:
  InvariantViolation(std::string module, std::string invariant, const std::string& detail)
      : std::runtime_error(module + ": " + invariant + ": " + detail),
        module_(std::move(module)),
        invariant_(std::move(invariant)) {}

  const std::string& module() const noexcept { return module_; }
  const std::string& invariant() const noexcept { return invariant_; }

 private:
  std::string module_;
  std::string invariant_;
};

}  // namespace martapprox
