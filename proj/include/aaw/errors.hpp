#pragma once

#include <stdexcept>
#include <string>

namespace aaw {

/// Integration left the finite range. `time` is the first grid time at which
/// a non-finite state or a state beyond the overflow guard was observed.
class DivergenceError : public std::runtime_error {
 public:
  DivergenceError(double time, const std::string& message)
      : std::runtime_error(message), time_(time) {}

  double time() const noexcept { return time_; }

 private:
  double time_;
};

/// A linear-algebra or consistency routine failed (eigensolver did not
/// converge, analytic Jacobian disagrees with finite differences, ...).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A mathematical precondition of the requested operation does not hold
/// (e.g. limit prediction on a monodromy matrix that is not convergent).
class PreconditionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace aaw
