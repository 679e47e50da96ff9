// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <memory>

#include "dm/board/config.hpp"
#include "dm/common/rng.hpp"
#include "dm/engine/engine.hpp"
#include "dm/vision/contour.hpp"
#include "dm/vision/perturb.hpp"
#include "dm/vision/render.hpp"

namespace dm::test {

inline std::shared_ptr<const board::GameConfig> shared_default() {
  static const auto cfg = std::make_shared<const board::GameConfig>(board::default_config());
  return cfg;
}

inline std::shared_ptr<const board::GameConfig> share(board::GameConfig cfg) {
  return std::make_shared<const board::GameConfig>(std::move(cfg));
}

inline vision::Contour polygon(std::initializer_list<Vec2> pts) { return vision::Contour{pts, true}; }

inline vision::Contour rect(double w, double h, Vec2 c = {0, 0}) {
  return polygon({{c.x - w / 2, c.y - h / 2}, {c.x + w / 2, c.y - h / 2}, {c.x + w / 2, c.y + h / 2}, {c.x - w / 2, c.y + h / 2}});
}

inline vision::Contour disc(double r, int n = 256, Vec2 c = {0, 0}) {
  vision::Contour out;
  for (int i = 0; i < n; ++i) {
    const double a = 2 * kPi * i / n;
    out.points.push_back({c.x + r * std::cos(a), c.y + r * std::sin(a)});
  }
  return out;
}

/// Star-shaped simple polygon: n in [5, 12] vertices at jittered, evenly
/// spaced angles with radius in [0.4, 1] * r.
inline vision::Contour random_simple_polygon(Rng& rng, double r = 1.0) {
  const int n = rng.uniform_int(5, 12);
  vision::Contour c;
  for (int i = 0; i < n; ++i) {
    const double a = 2 * kPi * (i + 0.8 * (rng.uniform01() - 0.5)) / n;
    const double rad = r * (0.4 + 0.6 * rng.uniform01());
    c.points.push_back({rad * std::cos(a), rad * std::sin(a)});
  }
  return c;
}

struct Similarity {
  double rotation_deg;
  double scale;
  Vec2 translation;
};

inline Similarity random_similarity(Rng& rng) {
  return {360.0 * rng.uniform01(), 0.5 + 1.5 * rng.uniform01(), {400.0 * rng.uniform01() - 200.0, 400.0 * rng.uniform01() - 200.0}};
}

inline vision::Contour apply(const vision::Contour& c, const Similarity& s) {
  return vision::transform(c, s.rotation_deg, s.scale, s.translation);
}

/// Renders a contour onto a canvas whose longer side is about `pixels` and
/// traces it back in the contour's own units.
inline vision::Contour raster_round_trip(const vision::Contour& c, int pixels = 1024) {
  double lo_x = c.points[0].x, hi_x = lo_x, lo_y = c.points[0].y, hi_y = lo_y;
  for (const auto& p : c.points) {
    lo_x = std::min(lo_x, p.x);
    hi_x = std::max(hi_x, p.x);
    lo_y = std::min(lo_y, p.y);
    hi_y = std::max(hi_y, p.y);
  }
  const double span = std::max(hi_x - lo_x, hi_y - lo_y);
  const double mmpp = span / (pixels - 24);
  const auto r = vision::render_contour(c, mmpp, 12 * mmpp);
  vision::ContourOptions opts;
  opts.min_blob_area_mm2 = 0.0;
  return vision::largest_contour(r, mmpp, opts);
}

}  // namespace dm::test
