// SPDX-License-Identifier: Apache-2.0
#include "dm/vision/kernels.hpp"

#include <algorithm>
#include <cmath>

namespace dm::vision {

namespace {

struct DisjointSet {
  std::vector<std::int32_t> parent;

  std::int32_t make() {
    parent.push_back(static_cast<std::int32_t>(parent.size()));
    return parent.back();
  }
  std::int32_t find(std::int32_t a) {
    while (parent[a] != a) {
      parent[a] = parent[parent[a]];
      a = parent[a];
    }
    return a;
  }
  void unite(std::int32_t a, std::int32_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (a < b) parent[b] = a; else parent[a] = b;
  }
};

}  // namespace

Components label_components(const Raster& r) {
  const int w = r.width();
  const int h = r.height();
  Components out;
  out.width = w;
  out.height = h;
  out.labels.assign(static_cast<std::size_t>(w) * h, 0);
  DisjointSet ds;
  ds.make();  // provisional label 0 is background
  auto idx = [w](int x, int y) { return static_cast<std::size_t>(y) * w + x; };

  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (!r.at(x, y)) continue;
      // Already-visited 8-neighbours: W, NW, N, NE.
      std::int32_t best = 0;
      const int nx[4] = {x - 1, x - 1, x, x + 1};
      const int ny[4] = {y, y - 1, y - 1, y - 1};
      for (int k = 0; k < 4; ++k) {
        if (nx[k] < 0 || ny[k] < 0 || nx[k] >= w) continue;
        const std::int32_t l = out.labels[idx(nx[k], ny[k])];
        if (l == 0) continue;
        if (best == 0) best = l; else ds.unite(best, l);
      }
      if (best == 0) best = ds.make();
      out.labels[idx(x, y)] = best;
    }
  }

  // Resolve to final labels numbered by first appearance in raster order.
  std::vector<std::int32_t> remap(ds.parent.size(), 0);
  std::int32_t next = 0;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      auto& l = out.labels[idx(x, y)];
      if (l == 0) continue;
      const std::int32_t root = ds.find(l);
      if (remap[root] == 0) {
        remap[root] = ++next;
        ComponentStats s;
        s.label = next;
        s.min_x = s.max_x = s.first_x = x;
        s.min_y = s.max_y = s.first_y = y;
        out.stats.push_back(s);
      }
      l = remap[root];
      auto& s = out.stats[static_cast<std::size_t>(l - 1)];
      ++s.area;
      s.sum_x += x;
      s.sum_y += y;
      s.min_x = std::min(s.min_x, x);
      s.max_x = std::max(s.max_x, x);
      s.max_y = std::max(s.max_y, y);
    }
  }
  return out;
}

Raster dilate(const Raster& r, int radius, Exec exec) {
  if (radius <= 0) return r;
  const int w = r.width();
  const int h = r.height();
  Raster tmp(w, h);
  Raster out(w, h);
  const bool par = exec == Exec::Parallel;

  // Horizontal pass: running count of ink inside the window [x-radius, x+radius].
#pragma omp parallel for if (par) schedule(static)
  for (int y = 0; y < h; ++y) {
    int count = 0;
    for (int x = 0; x < std::min(radius, w); ++x) count += r.at(x, y);
    for (int x = 0; x < w; ++x) {
      const int enter = x + radius;
      const int leave = x - radius - 1;
      if (enter < w) count += r.at(enter, y);
      if (leave >= 0) count -= r.at(leave, y);
      tmp.set(x, y, count > 0);
    }
  }
#pragma omp parallel for if (par) schedule(static)
  for (int x = 0; x < w; ++x) {
    int count = 0;
    for (int y = 0; y < std::min(radius, h); ++y) count += tmp.at(x, y);
    for (int y = 0; y < h; ++y) {
      const int enter = y + radius;
      const int leave = y - radius - 1;
      if (enter < h) count += tmp.at(x, enter);
      if (leave >= 0) count -= tmp.at(x, leave);
      out.set(x, y, count > 0);
    }
  }
  return out;
}

Raster dilate_reference(const Raster& r, int radius) {
  Raster out(r.width(), r.height());
  for (int y = 0; y < r.height(); ++y) {
    for (int x = 0; x < r.width(); ++x) {
      bool hit = false;
      for (int dy = -radius; dy <= radius && !hit; ++dy) {
        for (int dx = -radius; dx <= radius && !hit; ++dx) hit = r.get(x + dx, y + dy) != 0;
      }
      out.set(x, y, hit);
    }
  }
  return out;
}

namespace {

// Shared by both rasterizers so crossing decisions are bit-identical.
inline bool crosses(Vec2 a, Vec2 b, double yc) { return (a.y <= yc) != (b.y <= yc); }
inline double crossing_x(Vec2 a, Vec2 b, double yc) { return a.x + (yc - a.y) * (b.x - a.x) / (b.y - a.y); }

}  // namespace

void rasterize_polygon(Raster& target, std::span<const Vec2> polygon, double mm_per_pixel, Exec exec) {
  const std::size_t n = polygon.size();
  if (n < 3) return;
  const int w = target.width();
  const int h = target.height();
  const bool par = exec == Exec::Parallel;
#pragma omp parallel for if (par) schedule(dynamic, 16)
  for (int y = 0; y < h; ++y) {
    const double yc = (y + 0.5) * mm_per_pixel;
    std::vector<double> xs;
    for (std::size_t i = 0; i < n; ++i) {
      const Vec2 a = polygon[i];
      const Vec2 b = polygon[(i + 1) % n];
      if (crosses(a, b, yc)) xs.push_back(crossing_x(a, b, yc));
    }
    std::sort(xs.begin(), xs.end());
    for (std::size_t k = 0; k + 1 < xs.size(); k += 2) {
      // Pixel centers xc with xs[k] <= xc < xs[k+1].
      int x0 = static_cast<int>(std::ceil(xs[k] / mm_per_pixel - 0.5));
      while (x0 > 0 && (x0 - 1 + 0.5) * mm_per_pixel >= xs[k]) --x0;
      while ((x0 + 0.5) * mm_per_pixel < xs[k]) ++x0;
      for (int x = std::max(x0, 0); x < w; ++x) {
        const double xc = (x + 0.5) * mm_per_pixel;
        if (xc >= xs[k + 1]) break;
        target.set(x, y, 1);
      }
    }
  }
}

void rasterize_polygon_reference(Raster& target, std::span<const Vec2> polygon, double mm_per_pixel) {
  const std::size_t n = polygon.size();
  if (n < 3) return;
  for (int y = 0; y < target.height(); ++y) {
    const double yc = (y + 0.5) * mm_per_pixel;
    for (int x = 0; x < target.width(); ++x) {
      const double xc = (x + 0.5) * mm_per_pixel;
      bool inside = false;
      for (std::size_t i = 0; i < n; ++i) {
        const Vec2 a = polygon[i];
        const Vec2 b = polygon[(i + 1) % n];
        if (crosses(a, b, yc) && crossing_x(a, b, yc) > xc) inside = !inside;
      }
      if (inside) target.set(x, y, 1);
    }
  }
}

}  // namespace dm::vision
