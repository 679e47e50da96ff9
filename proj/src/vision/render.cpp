// SPDX-License-Identifier: Apache-2.0
#include "dm/vision/render.hpp"

#include <algorithm>
#include <cmath>

#include "dm/common/error.hpp"
#include "dm/vision/kernels.hpp"

namespace dm::vision {

namespace {

int mm_to_px(double mm, double s) { return static_cast<int>(std::lround(mm / s)); }

}  // namespace

void draw_die_face(Raster& r, int x0, int y0, int die_px, int pips) {
  const double radius = 0.09 * die_px;
  for (const auto& [u, v] : pip_layout(pips)) {
    const double cx = x0 + u * die_px;
    const double cy = y0 + v * die_px;
    const int xa = static_cast<int>(std::floor(cx - radius)), xb = static_cast<int>(std::ceil(cx + radius));
    const int ya = static_cast<int>(std::floor(cy - radius)), yb = static_cast<int>(std::ceil(cy + radius));
    for (int y = ya; y <= yb; ++y) {
      for (int x = xa; x <= xb; ++x) {
        const double dx = x + 0.5 - cx, dy = y + 0.5 - cy;
        if (dx * dx + dy * dy <= radius * radius && r.in_bounds(x, y)) r.set(x, y, 1);
      }
    }
  }
}

Raster render_dice(std::span<const int> bottom_pips, const DiceOptions& opts) {
  const int die_px = mm_to_px(opts.die_size_mm, opts.mm_per_pixel);
  const int n = static_cast<int>(bottom_pips.size());
  const int width = std::max(1, die_px * (2 * n + 1));
  Raster r(width, 3 * die_px);
  for (int i = 0; i < n; ++i) draw_die_face(r, die_px * (1 + 2 * i), die_px, die_px, bottom_pips[static_cast<std::size_t>(i)]);
  return r;
}

Raster render_tokens(std::span<const TokenPlacement> tokens, double mm_per_pixel, double marker_side_mm,
                     double plate_w_mm, double plate_h_mm) {
  if (mm_per_pixel <= 0) throw Error(ErrorCode::InvalidConfig, "mm_per_pixel must be positive");
  Raster r(mm_to_px(plate_w_mm, mm_per_pixel), mm_to_px(plate_h_mm, mm_per_pixel));
  const int cell_px = std::max(1, mm_to_px(marker_side_mm / kMarkerCells, mm_per_pixel));
  const int half = cell_px * kMarkerCells / 2;
  const auto& dict = dm16_dictionary();
  for (const auto& t : tokens) {
    draw_marker(r, dict[static_cast<std::size_t>(t.id)], mm_to_px(t.center.x, mm_per_pixel) - half,
                mm_to_px(t.center.y, mm_per_pixel) - half, cell_px, t.rotation);
  }
  return r;
}

std::vector<TokenPlacement> layout_tokens(std::span<const TokenId> ids, int per_row) {
  std::vector<TokenPlacement> out;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    const int row = static_cast<int>(i) / per_row;
    const int col = static_cast<int>(i) % per_row;
    out.push_back({ids[i], {30.0 + 25.0 * col, 30.0 + 25.0 * row}, 0});
  }
  return out;
}

Raster render_contour(const Contour& c, double mm_per_pixel, double margin_mm) {
  if (c.points.empty()) throw Error(ErrorCode::DegenerateContour, "empty contour");
  double min_x = c.points[0].x, min_y = c.points[0].y, max_x = min_x, max_y = min_y;
  for (const auto& p : c.points) {
    min_x = std::min(min_x, p.x);
    min_y = std::min(min_y, p.y);
    max_x = std::max(max_x, p.x);
    max_y = std::max(max_y, p.y);
  }
  const Vec2 shift{margin_mm - min_x, margin_mm - min_y};
  std::vector<Vec2> pts;
  pts.reserve(c.points.size());
  for (const auto& p : c.points) pts.push_back(p + shift);
  const int w = static_cast<int>(std::ceil((max_x - min_x + 2 * margin_mm) / mm_per_pixel));
  const int h = static_cast<int>(std::ceil((max_y - min_y + 2 * margin_mm) / mm_per_pixel));
  Raster r(std::max(1, w), std::max(1, h));
  rasterize_polygon(r, pts, mm_per_pixel);
  return r;
}

}  // namespace dm::vision
