#pragma once

#include <string>
#include <vector>

#include "aaw/odeint.hpp"

namespace aaw {

/// One row of the reproduction suite: what was expected, what was computed,
/// at which tolerance, and whether it passed. Failures inside a criterion
/// are caught and reported in `got`, so the table always prints completely.
struct CriterionResult {
  int id = 0;
  std::string name;
  std::string expected;
  std::string got;
  std::string tolerance;
  bool pass = false;
};

/// Runs every acceptance criterion against the built-in systems at the given
/// integrator resolution.
std::vector<CriterionResult> run_acceptance_suite(const IntegratorConfig& cfg);

/// Aligned pass/fail table of the suite results.
std::string format_criteria_table(const std::vector<CriterionResult>& rows);

}  // namespace aaw
