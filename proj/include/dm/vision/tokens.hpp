// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <span>
#include <vector>

#include "dm/vision/markers.hpp"

namespace dm::vision {

/// Marker side length (6 cells of 2 mm) of the printed tokens.
inline constexpr double kTokenMarkerSideMm = 12.0;
inline constexpr double kDefaultRowToleranceMm = kTokenMarkerSideMm / 2.0;

/// Reading order: detections sorted by y are split into rows wherever the gap
/// to the previous detection exceeds row_tolerance_mm; rows run top to bottom,
/// tokens within a row left to right.
std::vector<TokenDetection> order_tokens(std::span<const TokenDetection> dets,
                                         double row_tolerance_mm = kDefaultRowToleranceMm);
std::vector<TokenId> tokens_to_sequence(std::span<const TokenDetection> dets,
                                        double row_tolerance_mm = kDefaultRowToleranceMm);

}  // namespace dm::vision
