#pragma once

#include <string>
#include <vector>

#include "chemostokes/solver.hpp"

namespace chemostokes {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool pass = false;
  std::string detail;
  double seconds = 0.0;
};

struct AcceptanceOptions {
  /// Criteria to run (1..9); empty means all.
  std::vector<int> only;
  /// Injected into every smoke-scenario n update (fault-injection tests).
  FluxHook flux_hook;
  /// Thread counts compared by the determinism criterion.
  std::vector<int> determinism_threads{1, 2, 8};
};

/// Names of the nine criteria, index 0 is criterion 1.
const std::vector<std::string>& criterion_names();

/// Runs the selected criteria; shared work (the smoke run) is done once.
/// Throws std::invalid_argument for ids outside 1..9.
std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& opts = {});

/// Lets mass escape through the x = 0 wall of the n flux.
FluxHook mass_leak_hook();

}  // namespace chemostokes
