// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <span>
#include <string>
#include <vector>

#include "dm/common/json.hpp"
#include "dm/common/kinds.hpp"
#include "dm/vision/contour.hpp"
#include "dm/vision/kernels.hpp"
#include "dm/vision/moments.hpp"

namespace dm::vision {

struct RarityThresholds {
  double legendary = 0.2;
  double rare = 0.5;

  bool valid() const { return legendary >= 0.0 && legendary < rare; }
  friend bool operator==(const RarityThresholds&, const RarityThresholds&) = default;
};

/// score <= legendary -> LEGENDARY, score <= rare -> RARE, else COMMON.
Rarity rate_rarity(double score, const RarityThresholds& t);

struct CraftRating {
  WeaponKind kind = WeaponKind::Axe;
  double score = 0.0;  // lower is more similar
  Rarity rarity = Rarity::Common;

  friend bool operator==(const CraftRating&, const CraftRating&) = default;
};

Json to_json(const CraftRating& r);

/// Reference outlines for the three weapon kinds and the key, loaded from
/// the versioned baselines asset.
struct BaselineSet {
  std::string version;
  std::array<Contour, 3> weapons;  // indexed by WeaponKind
  Contour key;

  const Contour& weapon(WeaponKind k) const { return weapons[static_cast<std::size_t>(k)]; }
};

BaselineSet baselines_from_json(const Json& doc);
Json to_json(const BaselineSet& b);
BaselineSet load_baselines(const std::string& path);
/// The shipped baselines asset, loaded once.
const BaselineSet& default_baselines();

/// Mirror-tolerant I1 score against each weapon baseline, in kind order.
std::array<double, 3> weapon_scores(const Contour& c, const BaselineSet& baselines);

/// Nearest weapon baseline; ties resolve in kind order AXE < SWORD < BOW.
CraftRating classify_weapon(const Contour& c, const BaselineSet& baselines, const RarityThresholds& t = {});

/// Scores many contours. Each item is independent, so the parallel result is
/// identical to the serial one element by element.
std::vector<CraftRating> classify_batch(std::span<const Contour> contours, const BaselineSet& baselines,
                                        const RarityThresholds& t, Exec exec = Exec::Parallel);

inline constexpr double kDefaultKeyThreshold = 0.15;

/// True iff the mirror-tolerant I1 score against the key baseline is <= threshold.
bool evaluate_key(const Contour& c, const Contour& key_baseline, double threshold = kDefaultKeyThreshold);

}  // namespace dm::vision
