#pragma once

#include <string>
#include <vector>

namespace ldlab {

// One gate of the release checklist: a self-contained, deterministic check
// with its own pinned configuration and tolerances.
struct CriterionResult {
  int id = 0;
  std::string title;
  bool pass = false;
  std::string detail;
  double seconds = 0.0;
  double budget_seconds = 0.0;  // 0: no stated runtime budget
};

// Run one criterion (1..11). Throws std::out_of_range for unknown ids.
CriterionResult run_criterion(int id);

// "[criterion 03] PASS — title — detail (0.1s, budget 60s)"
std::string format_criterion_line(const CriterionResult& r);

// All criteria in order. A criterion with a runtime budget fails when it
// exceeds it, even if its predicate holds.
std::vector<CriterionResult> run_acceptance();

}  // namespace ldlab
