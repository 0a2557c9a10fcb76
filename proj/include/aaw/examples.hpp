#pragma once

#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "aaw/model.hpp"
#include "aaw/types.hpp"
#include "aaw/variational.hpp"

namespace aaw {

/// A reference value attached to a built-in system, with the tolerance at
/// which reproductions are expected to match it.
struct GoldenValue {
  Matrix value;  ///< matrices and vectors; scalars as 1x1
  double tolerance = 0;
  bool relative = false;
  std::string provenance;
};

/// One built-in benchmark: the system, its default feedback law, the known
/// periodic orbit, and the reference values reproductions are checked
/// against. Systems are closed-form code, not data files, so they are exact.
struct ExampleEntry {
  std::string name;
  std::string description;
  std::variant<LinearPeriodicSystem, NonlinearAutonomousSystem> system;
  FeedbackLaw law;
  PeriodicSolution orbit;
  std::map<std::string, GoldenValue> goldens;

  bool is_linear() const {
    return std::holds_alternative<LinearPeriodicSystem>(system);
  }
};

/// Registry lookup; throws std::invalid_argument listing the known names.
/// Names: ex41, ex42, ex42-ghat, ex42-gbar.
const ExampleEntry& get_example(const std::string& name);

std::vector<std::string> example_names();

/// The linear periodic system spectral analysis runs on: the system itself
/// for linear entries, the variational system around the stored orbit for
/// nonlinear ones.
LinearPeriodicSystem analysis_system(const ExampleEntry& entry);

/// Direction spanning the forced unit eigenspace of the entry's cycle maps:
/// x*(0) for linear entries, x*'(0) for nonlinear (variational) ones. Used
/// to express limit points as a coefficient along the orbit.
Vector unit_eigen_direction(const ExampleEntry& entry);

}  // namespace aaw
