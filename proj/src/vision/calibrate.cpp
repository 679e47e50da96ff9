// SPDX-License-Identifier: Apache-2.0
#include "dm/vision/calibrate.hpp"

#include <algorithm>

namespace dm::vision {

Json to_json(const Calibration& c) {
  return Json{{"t_legendary", c.thresholds.legendary},
              {"t_rare", c.thresholds.rare},
              {"samples", c.samples},
              {"correct_kind", c.correct_kind},
              {"tier_counts", Json{{"LEGENDARY", c.tier_counts[0]}, {"RARE", c.tier_counts[1]}, {"COMMON", c.tier_counts[2]}}}};
}

RarityThresholds tercile_thresholds(std::vector<double> scores) {
  if (scores.size() < 3) throw Error(ErrorCode::InvalidConfig, "calibration needs at least 3 samples");
  std::sort(scores.begin(), scores.end());
  const std::size_t n = scores.size();
  const auto cut = [&](std::size_t k) { return 0.5 * (scores[k - 1] + scores[k]); };
  return {cut(n / 3), cut(2 * n / 3)};
}

Calibration calibrate_rarity(const BaselineSet& baselines, const CorpusOptions& opts, std::uint64_t seed, Exec exec) {
  const auto corpus = generate_weapon_corpus(baselines, opts, seed);
  std::vector<Contour> contours;
  contours.reserve(corpus.size());
  for (const auto& s : corpus) contours.push_back(s.contour);
  const auto ratings = classify_batch(contours, baselines, RarityThresholds{}, exec);
  Calibration c;
  c.samples = static_cast<int>(corpus.size());
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    c.scores.push_back(ratings[i].score);
    c.correct_kind += ratings[i].kind == corpus[i].kind;
  }
  c.thresholds = tercile_thresholds(c.scores);
  for (const double s : c.scores) {
    switch (rate_rarity(s, c.thresholds)) {
      case Rarity::Legendary: ++c.tier_counts[0]; break;
      case Rarity::Rare: ++c.tier_counts[1]; break;
      case Rarity::Common: ++c.tier_counts[2]; break;
    }
  }
  return c;
}

}  // namespace dm::vision
