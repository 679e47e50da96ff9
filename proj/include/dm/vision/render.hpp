// SPDX-License-Identifier: Apache-2.0
#pragma once
// Synthetic plate renders: the stand-in for the input plate camera.

#include <span>

#include "dm/vision/contour.hpp"
#include "dm/vision/dice.hpp"
#include "dm/vision/markers.hpp"
#include "dm/vision/raster.hpp"

namespace dm::vision {

inline constexpr double kPlateWidthMm = 200.0;
inline constexpr double kPlateHeightMm = 150.0;

/// Dark pip discs of one face; (x0, y0) is the die's top-left pixel.
void draw_die_face(Raster& r, int x0, int y0, int die_px, int pips);

/// Dice in a row, separated by one die width, each showing `bottom_pips[i]`
/// pips to the camera.
Raster render_dice(std::span<const int> bottom_pips, const DiceOptions& opts = {});

struct TokenPlacement {
  TokenId id = TokenId::MoveUp;
  Vec2 center;  // mm
  int rotation = 0;
};

/// Tokens on a blank plate; the marker cell is side/6 mm.
Raster render_tokens(std::span<const TokenPlacement> tokens, double mm_per_pixel = 0.5,
                     double marker_side_mm = 12.0, double plate_w_mm = kPlateWidthMm,
                     double plate_h_mm = kPlateHeightMm);

/// Tokens laid out in reading order, `per_row` to a row.
std::vector<TokenPlacement> layout_tokens(std::span<const TokenId> ids, int per_row = 4);

/// Fills a contour onto a canvas sized to its bounding box plus `margin_mm`,
/// after shifting the bounding box corner to the margin.
Raster render_contour(const Contour& c, double mm_per_pixel = 0.5, double margin_mm = 5.0);

}  // namespace dm::vision
