// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <vector>

#include "dm/common/kinds.hpp"
#include "dm/common/rng.hpp"
#include "dm/vision/contour.hpp"
#include "dm/vision/shapes.hpp"

namespace dm::vision {

/// Rotate (degrees, about the origin), uniformly scale, then translate.
Contour transform(const Contour& c, double rotation_deg, double scale, Vec2 translation);
/// Reflection across the vertical axis; reverses vertex order to keep orientation.
Contour mirror(const Contour& c);
/// x += k * y about the vertex mean.
Contour shear(const Contour& c, double k);
/// sqrt((mu20 + mu02) / m00) of the filled polygon.
double gyration_radius(const Contour& c);

/// Moves every vertex by a uniform offset inside a disc of radius
/// fraction * gyration_radius.
Contour perturb_vertices(const Contour& c, double fraction, Rng& rng);

struct CorpusOptions {
  int total = 300;          // split evenly across the three kinds
  double max_noise = 0.05;  // vertex noise fraction, drawn per sample in [0, max]
  double max_shear = 0.1;   // shear factor, drawn per sample in [-max, max]
};

struct CorpusSample {
  WeaponKind kind = WeaponKind::Axe;
  Contour contour;
  double noise = 0.0;
  double shear = 0.0;
};

/// Perturbed copies of each weapon baseline with random pose, noise and shear.
std::vector<CorpusSample> generate_weapon_corpus(const BaselineSet& baselines, const CorpusOptions& opts,
                                                 std::uint64_t seed);
/// `count` perturbed copies of a single weapon baseline.
std::vector<CorpusSample> generate_kind_corpus(const BaselineSet& baselines, WeaponKind kind, int count,
                                               const CorpusOptions& opts, std::uint64_t seed);

}  // namespace dm::vision
