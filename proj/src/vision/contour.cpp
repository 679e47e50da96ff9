// SPDX-License-Identifier: Apache-2.0
#include "dm/vision/contour.hpp"

#include <algorithm>
#include <cmath>

#include "dm/common/error.hpp"

namespace dm::vision {

double signed_area(std::span<const Vec2> points) {
  const std::size_t n = points.size();
  if (n < 3) return 0.0;
  // Relative to the first vertex to limit cancellation far from the origin.
  const Vec2 o = points[0];
  double twice = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    twice += cross(points[i] - o, points[(i + 1) % n] - o);
  }
  return 0.5 * twice;
}

void validate_contour(const Contour& c) {
  if (!c.closed) throw Error(ErrorCode::DegenerateContour, "contour is not closed");
  if (c.points.size() < 3) throw Error(ErrorCode::DegenerateContour, "closed contour needs >= 3 points");
  for (std::size_t i = 0; i < c.points.size(); ++i) {
    const Vec2 p = c.points[i];
    if (!std::isfinite(p.x) || !std::isfinite(p.y)) throw Error(ErrorCode::DegenerateContour, "non-finite vertex");
    if (p == c.points[(i + 1) % c.points.size()]) {
      throw Error(ErrorCode::DegenerateContour, "repeated consecutive vertex");
    }
  }
  if (std::abs(signed_area(c)) < 1e-9) throw Error(ErrorCode::DegenerateContour, "zero signed area");
}

namespace {

// Directions in y-down raster coordinates: E, S, W, N.
constexpr int kDx[4] = {1, 0, -1, 0};
constexpr int kDy[4] = {0, 1, 0, -1};

// Front-left / front-right pixels for travelling direction d from vertex (vx, vy),
// with the component kept on the right-hand side.
void front_pixels(int d, int vx, int vy, int& flx, int& fly, int& frx, int& fry) {
  switch (d) {
    case 0: flx = vx;     fly = vy - 1; frx = vx;     fry = vy;     break;
    case 1: flx = vx;     fly = vy;     frx = vx - 1; fry = vy;     break;
    case 2: flx = vx - 1; fly = vy;     frx = vx - 1; fry = vy - 1; break;
    default: flx = vx - 1; fly = vy - 1; frx = vx;    fry = vy - 1; break;
  }
}

}  // namespace

std::vector<Vec2> trace_outer_boundary(const Components& comps, const ComponentStats& comp) {
  const std::int32_t label = comp.label;
  auto inside = [&](int x, int y) { return comps.at(x, y) == label; };

  const int sx = comp.first_x;
  const int sy = comp.first_y;
  std::vector<Vec2> corners;
  int vx = sx + 1;
  int vy = sy;
  int d = 0;
  corners.push_back({static_cast<double>(sx), static_cast<double>(sy)});
  // Crack following; a front-left hit turns left, so diagonal (8-connected)
  // neighbours stay on the same outer boundary.
  for (;;) {
    int flx, fly, frx, fry;
    front_pixels(d, vx, vy, flx, fly, frx, fry);
    int nd;
    if (inside(flx, fly)) nd = (d + 3) % 4;
    else if (inside(frx, fry)) nd = d;
    else nd = (d + 1) % 4;
    if (vx == sx && vy == sy) break;
    if (nd != d) corners.push_back({static_cast<double>(vx), static_cast<double>(vy)});
    d = nd;
    vx += kDx[d];
    vy += kDy[d];
  }
  return corners;
}

std::vector<Contour> extract_contours(const Raster& r, double mm_per_pixel, const ContourOptions& opts, Exec exec) {
  if (!(mm_per_pixel > 0.0)) throw Error(ErrorCode::InvalidConfig, "mm_per_pixel must be positive");
  const Components comps = label_components(r);
  const double px_area = mm_per_pixel * mm_per_pixel;

  std::vector<const ComponentStats*> kept;
  for (const auto& s : comps.stats) {
    // Filtering uses the raw pixel area; filled holes can only add to it.
    if (static_cast<double>(s.area) * px_area >= opts.min_blob_area_mm2) kept.push_back(&s);
  }
  std::vector<Contour> out(kept.size());
  const bool par = exec == Exec::Parallel;
  const int n = static_cast<int>(kept.size());
#pragma omp parallel for if (par) schedule(dynamic)
  for (int i = 0; i < n; ++i) {
    auto pts = trace_outer_boundary(comps, *kept[static_cast<std::size_t>(i)]);
    for (auto& p : pts) p = p * mm_per_pixel;
    out[static_cast<std::size_t>(i)].points = std::move(pts);
  }
  return out;
}

Contour largest_contour(const Raster& r, double mm_per_pixel, const ContourOptions& opts) {
  auto all = extract_contours(r, mm_per_pixel, opts);
  if (all.empty()) throw Error(ErrorCode::EmptyRaster, "no component above the minimum blob area");
  return *std::max_element(all.begin(), all.end(), [](const Contour& a, const Contour& b) {
    return std::abs(signed_area(a)) < std::abs(signed_area(b));
  });
}

}  // namespace dm::vision
