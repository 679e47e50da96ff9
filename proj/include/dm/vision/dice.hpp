// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <vector>

#include "dm/vision/kernels.hpp"
#include "dm/vision/raster.hpp"

namespace dm::vision {

/// The plate camera looks at dice from below, so only the pips of the bottom
/// face are visible (as dark blobs on a light plate).
struct DiceOptions {
  double mm_per_pixel = 0.5;
  double die_size_mm = 16.0;
  double pip_area_lo = 0.3;  // accepted pip area band, as a multiple of the median blob area
  double pip_area_hi = 3.0;
};

struct DieRegion {
  int pips = 0;
  int value = 0;        // 7 - pips
  double center_x = 0;  // mm
  double center_y = 0;
};

/// Die regions ordered left to right by center x. Throws
/// PipCountOutOfRange when a region holds more than 6 pips.
std::vector<DieRegion> detect_dice_regions(const Raster& r, const DiceOptions& opts = {}, Exec exec = Exec::Parallel);
std::vector<int> detect_dice(const Raster& r, const DiceOptions& opts = {}, Exec exec = Exec::Parallel);

/// Pip centers of a face in unit die coordinates ([0,1]^2).
std::vector<std::pair<double, double>> pip_layout(int pips);

}  // namespace dm::vision
