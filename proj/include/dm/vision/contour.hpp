// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <span>
#include <vector>

#include "dm/common/geometry.hpp"
#include "dm/vision/kernels.hpp"
#include "dm/vision/raster.hpp"

namespace dm::vision {

/// Closed polyline in plate millimeters. The closing edge is implicit.
struct Contour {
  std::vector<Vec2> points;
  bool closed = true;

  friend bool operator==(const Contour&, const Contour&) = default;
};

double signed_area(std::span<const Vec2> points);
inline double signed_area(const Contour& c) { return signed_area(c.points); }

/// Throws DegenerateContour unless the contour is closed, has >= 3 points,
/// no repeated consecutive points, and |signed area| >= 1e-9 mm^2.
void validate_contour(const Contour& c);

struct ContourOptions {
  double min_blob_area_mm2 = 4.0;
};

/// Outer pixel-edge boundaries of the 8-connected ink components, ordered by
/// each component's first pixel in raster order. Holes are filled, so each
/// contour's area equals its component's filled pixel area. Collinear
/// boundary vertices are merged.
std::vector<Contour> extract_contours(const Raster& r, double mm_per_pixel, const ContourOptions& opts = {},
                                      Exec exec = Exec::Parallel);

/// Largest-area contour; throws EmptyRaster when nothing survives filtering.
Contour largest_contour(const Raster& r, double mm_per_pixel, const ContourOptions& opts = {});

/// Traces the outer boundary of one labelled component (grid vertex units).
std::vector<Vec2> trace_outer_boundary(const Components& comps, const ComponentStats& comp);

}  // namespace dm::vision
