// SPDX-License-Identifier: Apache-2.0
#include "dm/vision/perturb.hpp"

#include <algorithm>
#include <cmath>

#include "dm/vision/moments.hpp"

namespace dm::vision {

Contour transform(const Contour& c, double rotation_deg, double scale, Vec2 translation) {
  Contour out{{}, c.closed};
  out.points.reserve(c.points.size());
  const double rad = deg_to_rad(rotation_deg);
  for (Vec2 p : c.points) out.points.push_back(rotate(p, rad) * scale + translation);
  return out;
}

Contour mirror(const Contour& c) {
  Contour out{{}, c.closed};
  out.points.reserve(c.points.size());
  for (auto it = c.points.rbegin(); it != c.points.rend(); ++it) out.points.push_back({-it->x, it->y});
  return out;
}

namespace {

Vec2 vertex_mean(const Contour& c) {
  Vec2 m{};
  for (Vec2 p : c.points) m = m + p;
  return m * (1.0 / static_cast<double>(c.points.size()));
}

}  // namespace

Contour shear(const Contour& c, double k) {
  const Vec2 m = vertex_mean(c);
  Contour out{{}, c.closed};
  for (Vec2 p : c.points) {
    const Vec2 d = p - m;
    out.points.push_back(m + Vec2{d.x + k * d.y, d.y});
  }
  return out;
}

double gyration_radius(const Contour& c) {
  const Vec2 mean = vertex_mean(c);
  std::vector<Vec2> local;
  for (Vec2 p : c.points) local.push_back(p - mean);
  RawMoments m = polygon_moments(local);
  if (m.m00 < 0) {
    m.m00 = -m.m00; m.m10 = -m.m10; m.m01 = -m.m01; m.m20 = -m.m20; m.m02 = -m.m02;
  }
  const double cx = m.m10 / m.m00;
  const double cy = m.m01 / m.m00;
  const double mu20 = m.m20 - cx * m.m10;
  const double mu02 = m.m02 - cy * m.m01;
  return std::sqrt((mu20 + mu02) / m.m00);
}

Contour perturb_vertices(const Contour& c, double fraction, Rng& rng) {
  const double radius = fraction * gyration_radius(c);
  Contour out{{}, c.closed};
  for (Vec2 p : c.points) {
    const double r = radius * std::sqrt(rng.uniform01());
    const double a = 2.0 * kPi * rng.uniform01();
    out.points.push_back(p + Vec2{r * std::cos(a), r * std::sin(a)});
  }
  return out;
}

namespace {

CorpusSample draw_sample(const Contour& baseline, WeaponKind k, const CorpusOptions& opts, Rng& rng) {
  CorpusSample s;
  s.kind = k;
  s.noise = opts.max_noise * rng.uniform01();
  s.shear = opts.max_shear * (2.0 * rng.uniform01() - 1.0);
  const double rot = 360.0 * rng.uniform01();
  const double scale = 0.8 + 0.4 * rng.uniform01();
  Contour c = perturb_vertices(baseline, s.noise, rng);
  c = shear(c, s.shear);
  s.contour = transform(c, rot, scale, {100.0, 100.0});
  return s;
}

}  // namespace

std::vector<CorpusSample> generate_weapon_corpus(const BaselineSet& baselines, const CorpusOptions& opts,
                                                 std::uint64_t seed) {
  Rng rng(seed);
  std::vector<CorpusSample> out;
  const int per_kind = opts.total / 3;
  for (WeaponKind k : kWeaponKinds) {
    for (int i = 0; i < per_kind; ++i) out.push_back(draw_sample(baselines.weapon(k), k, opts, rng));
  }
  return out;
}

std::vector<CorpusSample> generate_kind_corpus(const BaselineSet& baselines, WeaponKind kind, int count,
                                               const CorpusOptions& opts, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<CorpusSample> out;
  for (int i = 0; i < count; ++i) out.push_back(draw_sample(baselines.weapon(kind), kind, opts, rng));
  return out;
}

}  // namespace dm::vision
