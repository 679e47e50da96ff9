// SPDX-License-Identifier: Apache-2.0
#include "dm/vision/shapes.hpp"

#include "dm/common/error.hpp"

namespace dm::vision {

Rarity rate_rarity(double score, const RarityThresholds& t) {
  if (score <= t.legendary) return Rarity::Legendary;
  if (score <= t.rare) return Rarity::Rare;
  return Rarity::Common;
}

Json to_json(const CraftRating& r) {
  return Json{{"weapon_kind", to_string(r.kind)}, {"score", r.score}, {"rarity", to_string(r.rarity)}};
}

namespace {

Contour contour_from_json(const Json& j, const std::string& where) {
  Contour c;
  c.closed = optional_or<bool>(j, "closed", true, where);
  const auto& pts = j.at("points");
  if (!pts.is_array()) throw Error(ErrorCode::SchemaError, where + "/points: expected array");
  for (std::size_t i = 0; i < pts.size(); ++i) {
    c.points.push_back(vec2_from_json(pts[i], where + "/points/" + std::to_string(i)));
  }
  validate_contour(c);
  return c;
}

Json contour_to_json(const Contour& c) {
  Json pts = Json::array();
  for (Vec2 p : c.points) pts.push_back(to_json(p));
  return Json{{"closed", c.closed}, {"points", pts}};
}

}  // namespace

BaselineSet baselines_from_json(const Json& doc) {
  if (doc.value("schema", "") != "dm.baselines/1") throw Error(ErrorCode::SchemaError, "/schema: expected dm.baselines/1");
  BaselineSet b;
  b.version = require<std::string>(doc, "version", "");
  const auto& cs = doc.at("contours");
  for (WeaponKind k : kWeaponKinds) {
    const std::string name(to_string(k));
    if (!cs.contains(name)) throw Error(ErrorCode::SchemaError, "/contours/" + name + ": missing");
    b.weapons[static_cast<std::size_t>(k)] = contour_from_json(cs.at(name), "/contours/" + name);
  }
  if (!cs.contains("KEY")) throw Error(ErrorCode::SchemaError, "/contours/KEY: missing");
  b.key = contour_from_json(cs.at("KEY"), "/contours/KEY");
  return b;
}

Json to_json(const BaselineSet& b) {
  Json cs;
  for (WeaponKind k : kWeaponKinds) cs[std::string(to_string(k))] = contour_to_json(b.weapon(k));
  cs["KEY"] = contour_to_json(b.key);
  return Json{{"schema", "dm.baselines/1"}, {"version", b.version}, {"units", "mm"}, {"contours", cs}};
}

BaselineSet load_baselines(const std::string& path) { return baselines_from_json(read_json_file(path)); }

namespace {

CraftRating pick(const std::array<double, 3>& scores, const RarityThresholds& t) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < scores.size(); ++i) {
    if (scores[i] < scores[best]) best = i;  // strict: earlier kind wins ties
  }
  return {kWeaponKinds[best], scores[best], rate_rarity(scores[best], t)};
}

std::array<double, 3> scores_against(const HuVector& hu, const std::array<HuVector, 3>& refs) {
  std::array<double, 3> s{};
  for (std::size_t i = 0; i < 3; ++i) s[i] = match_hu(hu, refs[i], MirrorPolicy::TolerateMirror);
  return s;
}

std::array<HuVector, 3> reference_moments(const BaselineSet& b) {
  return {hu_moments(b.weapons[0]), hu_moments(b.weapons[1]), hu_moments(b.weapons[2])};
}

}  // namespace

std::array<double, 3> weapon_scores(const Contour& c, const BaselineSet& baselines) {
  return scores_against(hu_moments(c), reference_moments(baselines));
}

CraftRating classify_weapon(const Contour& c, const BaselineSet& baselines, const RarityThresholds& t) {
  return pick(weapon_scores(c, baselines), t);
}

std::vector<CraftRating> classify_batch(std::span<const Contour> contours, const BaselineSet& baselines,
                                        const RarityThresholds& t, Exec exec) {
  const auto refs = reference_moments(baselines);
  std::vector<CraftRating> out(contours.size());
  // Exceptions must not escape an OpenMP region; record the first failure.
  std::vector<char> failed(contours.size(), 0);
  const int n = static_cast<int>(contours.size());
#pragma omp parallel for if (exec == Exec::Parallel) schedule(dynamic, 8)
  for (int i = 0; i < n; ++i) {
    const auto k = static_cast<std::size_t>(i);
    try {
      out[k] = pick(scores_against(hu_moments(contours[k]), refs), t);
    } catch (const Error&) {
      failed[k] = 1;
    }
  }
  for (std::size_t k = 0; k < failed.size(); ++k) {
    if (failed[k]) throw Error(ErrorCode::DegenerateContour, "contour " + std::to_string(k) + " is degenerate");
  }
  return out;
}

bool evaluate_key(const Contour& c, const Contour& key_baseline, double threshold) {
  return match_shapes(c, key_baseline, MirrorPolicy::TolerateMirror) <= threshold;
}

const BaselineSet& default_baselines() {
  static const BaselineSet b = load_baselines(std::string(DM_ASSET_DIR) + "/baselines.json");
  return b;
}

}  // namespace dm::vision
