#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace casefit {

struct ValidationOptions {
  std::uint64_t seed = 0x0ca5ef17u;
  /// Fault-injection hook for negative controls; "jacobian" flips one sign
  /// in the analytic Jacobian before the difference check.
  std::string sabotage;
};

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct ValidationReport {
  std::vector<CheckResult> checks;
  bool all_passed = false;
};

/// Names of every check the suite runs, in execution order.
std::vector<std::string> validation_check_names();

/// Run the full invariant suite at fixed seeds.
ValidationReport run_validation(const ValidationOptions& options = {});

}  // namespace casefit
