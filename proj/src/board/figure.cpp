// SPDX-License-Identifier: Apache-2.0
#include "dm/board/figure.hpp"

#include <algorithm>
#include <array>

#include "dm/common/error.hpp"

namespace dm::board {

namespace {
constexpr std::array<std::string_view, 3> kFlagNames = {"LEFT_ARM", "RIGHT_ARM", "WEAPON"};
constexpr std::array<std::string_view, 4> kOwnerNames = {"PLAYER_0", "PLAYER_1", "PLAYER_2", "DRAGON"};
}  // namespace

std::string_view to_string(DamageFlag f) { return kFlagNames[static_cast<std::size_t>(f)]; }

std::optional<DamageFlag> damage_flag_from_string(std::string_view s) {
  for (std::size_t i = 0; i < kFlagNames.size(); ++i) {
    if (kFlagNames[i] == s) return static_cast<DamageFlag>(i);
  }
  return std::nullopt;
}

std::string_view to_string(Owner o) { return kOwnerNames[static_cast<std::size_t>(o)]; }

int token_budget(int base_tokens, const std::optional<Weapon>& w) {
  return std::clamp(base_tokens + (w ? w->move_token_delta : 0), 1, kMaxTokens);
}

Json to_json(const Weapon& w) {
  return Json{{"kind", to_string(w.kind)},
              {"rarity", to_string(w.rarity)},
              {"damage_bonus", w.damage_bonus},
              {"move_token_delta", w.move_token_delta},
              {"combat_rounds", w.combat_rounds}};
}

Weapon weapon_from_json(const Json& j, std::string_view where) {
  Weapon w;
  const auto kind = weapon_kind_from_string(require<std::string>(j, "kind", where));
  const auto rarity = rarity_from_string(require<std::string>(j, "rarity", where));
  if (!kind || !rarity) throw Error(ErrorCode::SchemaError, std::string(where) + ": bad weapon kind or rarity");
  w.kind = *kind;
  w.rarity = *rarity;
  w.damage_bonus = require<int>(j, "damage_bonus", where);
  w.move_token_delta = require<int>(j, "move_token_delta", where);
  w.combat_rounds = require<int>(j, "combat_rounds", where);
  return w;
}

Json to_json(const Figure& f) {
  Json damage = Json::array();
  for (DamageFlag d : f.damage) damage.push_back(to_string(d));
  return Json{{"id", f.id},
              {"owner", to_string(f.owner)},
              {"pos", to_json(f.pos)},
              {"marker_id", f.marker_id},
              {"hp", f.hp},
              {"max_hp", f.max_hp},
              {"weapon", f.weapon ? to_json(*f.weapon) : Json(nullptr)},
              {"damage", damage}};
}

Figure figure_from_json(const Json& j, std::string_view where) {
  Figure f;
  f.id = require<std::string>(j, "id", where);
  const auto owner = require<std::string>(j, "owner", where);
  const auto it = std::find(kOwnerNames.begin(), kOwnerNames.end(), owner);
  if (it == kOwnerNames.end()) throw Error(ErrorCode::SchemaError, std::string(where) + "/owner: unknown");
  f.owner = static_cast<Owner>(it - kOwnerNames.begin());
  f.pos = grid_pos_from_json(j.at("pos"), std::string(where) + "/pos");
  f.marker_id = require<int>(j, "marker_id", where);
  f.hp = require<int>(j, "hp", where);
  f.max_hp = require<int>(j, "max_hp", where);
  if (j.contains("weapon") && !j.at("weapon").is_null()) f.weapon = weapon_from_json(j.at("weapon"), std::string(where) + "/weapon");
  for (const auto& d : j.at("damage")) {
    const auto flag = damage_flag_from_string(d.get<std::string>());
    if (!flag) throw Error(ErrorCode::SchemaError, std::string(where) + "/damage: unknown flag");
    f.damage.insert(*flag);
  }
  return f;
}

const LocalRect& FigureFootprint::part(DamageFlag f) const {
  switch (f) {
    case DamageFlag::LeftArm: return left_arm;
    case DamageFlag::RightArm: return right_arm;
    case DamageFlag::Weapon: return weapon;
  }
  return weapon;
}

}  // namespace dm::board
