#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace alpha_descent {

/// A step input left the admissible domain of its transform (for example
/// (alpha-1)(b_j+kappa)+1 <= 0 for the power transform). Steps never clamp.
class GuardViolation : public std::runtime_error {
 public:
  /// Marks a violation of a mixture-level quantity rather than one component.
  static constexpr std::size_t kNoComponent = static_cast<std::size_t>(-1);

  GuardViolation(const std::string& what, std::size_t component, double value)
      : std::runtime_error(what), component_(component), value_(value) {}

  std::size_t component() const { return component_; }
  double value() const { return value_; }

 private:
  std::size_t component_;
  double value_;
};

/// Every unnormalised weight vanished (or became non-finite) in log domain.
class NormaliserUnderflow : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace alpha_descent
