// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <vector>

#include "dm/vision/perturb.hpp"

namespace dm::vision {

struct Calibration {
  RarityThresholds thresholds;
  std::vector<double> scores;     // classifier score per corpus sample, corpus order
  std::array<int, 3> tier_counts{};  // LEGENDARY, RARE, COMMON under `thresholds`
  int correct_kind = 0;
  int samples = 0;
};
Json to_json(const Calibration& c);

/// Tercile boundaries of the sorted scores, each placed midway between the
/// neighbouring order statistics so exactly floor(n/3) and floor(2n/3)
/// samples fall at or below them when scores are distinct.
RarityThresholds tercile_thresholds(std::vector<double> scores);

/// Scores a generated corpus with the weapon classifier and derives terciles.
Calibration calibrate_rarity(const BaselineSet& baselines, const CorpusOptions& opts, std::uint64_t seed,
                             Exec exec = Exec::Parallel);

}  // namespace dm::vision
