#pragma once

// The acceptance suite: thirteen numbered checks, each with a runtime budget.

#include <cstdint>
#include <string>
#include <vector>

namespace spectral_cantor {

struct AcceptanceOptions {
  /// Reduced sizes; runtime budgets still apply.
  bool quick = false;
  std::uint64_t seed = 20240601;
};

struct CriterionResult {
  int id = 0;
  std::string name;
  bool pass = false;
  std::string detail;
  double seconds = 0.0;
  double budget_seconds = 0.0;
};

std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& options = {});

/// Runs one criterion (1..13). Throws std::out_of_range for other ids.
CriterionResult run_criterion(int id, const AcceptanceOptions& options = {});

}  // namespace spectral_cantor
