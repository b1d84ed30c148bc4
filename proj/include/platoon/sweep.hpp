#pragma once

#include <span>
#include <vector>

#include "platoon/scenario.hpp"

namespace platoon::sweep {

/// Thread budget: PLATOON_SIM_THREADS if set to a positive integer, otherwise
/// the OpenMP default.
int thread_budget();

/// Runs independent scenarios concurrently (OpenMP, dynamic schedule).
/// `threads` <= 0 uses thread_budget(). Results are in input order and
/// identical to run_sweep_serial.
std::vector<scenario::ScenarioResult> run_sweep(std::span<const scenario::ScenarioConfig> configs,
                                                int threads = 0);

/// Reference implementation: one scenario after another.
std::vector<scenario::ScenarioResult>
run_sweep_serial(std::span<const scenario::ScenarioConfig> configs);

} // namespace platoon::sweep
