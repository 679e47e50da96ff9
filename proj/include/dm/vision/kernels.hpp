// SPDX-License-Identifier: Apache-2.0
#pragma once

// Data-parallel raster kernels. Each optimized kernel has a naive serial
// reference kept for equivalence tests and benchmarks; both must produce
// bit-identical output.

#include <cstdint>
#include <span>
#include <vector>

#include "dm/common/geometry.hpp"
#include "dm/vision/raster.hpp"

namespace dm::vision {

enum class Exec { Serial, Parallel };

struct ComponentStats {
  int label = 0;
  std::int64_t area = 0;  // pixels
  int min_x = 0, min_y = 0, max_x = 0, max_y = 0;  // inclusive bbox
  std::int64_t sum_x = 0, sum_y = 0;
  int first_x = 0, first_y = 0;  // first pixel in raster order

  double centroid_x() const { return static_cast<double>(sum_x) / static_cast<double>(area) + 0.5; }
  double centroid_y() const { return static_cast<double>(sum_y) / static_cast<double>(area) + 0.5; }
  int bbox_width() const { return max_x - min_x + 1; }
  int bbox_height() const { return max_y - min_y + 1; }
};

/// 8-connected labelling of dark pixels.
struct Components {
  int width = 0;
  int height = 0;
  std::vector<std::int32_t> labels;  // 0 = background, else 1-based label
  std::vector<ComponentStats> stats;  // stats[i].label == i + 1, ordered by first pixel

  std::int32_t at(int x, int y) const {
    if (x < 0 || y < 0 || x >= width || y >= height) return 0;
    return labels[static_cast<std::size_t>(y) * static_cast<std::size_t>(width) + static_cast<std::size_t>(x)];
  }
};

Components label_components(const Raster& r);

/// Square (Chebyshev) dilation of dark pixels by `radius` pixels.
Raster dilate(const Raster& r, int radius, Exec exec = Exec::Parallel);
Raster dilate_reference(const Raster& r, int radius);

/// Fills a closed polygon (mm) with the even-odd rule sampled at pixel
/// centers; pixel (x, y) covers [x*s, (x+1)*s) x [y*s, (y+1)*s).
void rasterize_polygon(Raster& target, std::span<const Vec2> polygon, double mm_per_pixel,
                       Exec exec = Exec::Parallel);
void rasterize_polygon_reference(Raster& target, std::span<const Vec2> polygon, double mm_per_pixel);

}  // namespace dm::vision
