// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>

#include "dm/board/config.hpp"

namespace dm::sim {

struct PickPlaceStats {
  int jobs = 0;
  int completed = 0;
  int retried = 0;            // completed on the second grip attempt
  double max_rest_error_mm = 0;  // worst |resting base centre - target cell centre|
};

/// Runs `jobs` consecutive pick/place jobs of one figure on the simulator,
/// each along a random 1-3 cell walkable path drawn from `seed`. A failed job
/// leaves the figure where it was.
PickPlaceStats run_pick_place_trials(const board::GameConfig& cfg, int jobs, std::uint64_t seed);

}  // namespace dm::sim
