#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace rdae {

struct AcceptanceOptions {
  std::uint64_t seed = 1;
  // Criteria to run (1..9); empty runs all of them.
  std::vector<int> only;
};

struct CriterionResult {
  int id = 0;
  std::string name;
  bool passed = false;
  std::string detail;  // measured values behind the verdict
  double seconds = 0.0;
};

// Runs one acceptance criterion. Unknown ids throw InvalidConfig.
CriterionResult run_criterion(int id, const AcceptanceOptions& options);

// Runs the selected criteria in order, reporting each as it finishes.
std::vector<CriterionResult> run_acceptance(
    const AcceptanceOptions& options,
    const std::function<void(const CriterionResult&)>& on_result = {});

// "PASS [n] name: detail (1.2s)"
std::string format_result(const CriterionResult& result);

}  // namespace rdae
