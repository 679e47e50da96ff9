// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <set>
#include <string>

#include "dm/board/grid.hpp"
#include "dm/common/geometry.hpp"
#include "dm/common/kinds.hpp"

namespace dm::board {

inline constexpr int kMaxTokens = 4;
inline constexpr int kCombatDice = 2;

enum class DamageFlag { LeftArm, RightArm, Weapon };
std::string_view to_string(DamageFlag f);
std::optional<DamageFlag> damage_flag_from_string(std::string_view s);

struct Weapon {
  WeaponKind kind = WeaponKind::Axe;
  Rarity rarity = Rarity::Common;
  int damage_bonus = 0;
  int move_token_delta = 0;
  int combat_rounds = 1;
  friend bool operator==(const Weapon&, const Weapon&) = default;
};
Json to_json(const Weapon& w);
Weapon weapon_from_json(const Json& j, std::string_view where);

/// clamp(base + delta, 1, kMaxTokens).
int token_budget(int base_tokens, const std::optional<Weapon>& w);

enum class Owner { Player0, Player1, Player2, Dragon };
std::string_view to_string(Owner o);

/// A tangible figure on its standard base.
struct Figure {
  std::string id;
  Owner owner = Owner::Player0;
  GridPos pos;
  int marker_id = 0;  // DM-16 dictionary index
  int hp = 0;
  int max_hp = 0;
  std::optional<Weapon> weapon;
  std::set<DamageFlag> damage;
  friend bool operator==(const Figure&, const Figure&) = default;
};
Json to_json(const Figure& f);
Figure figure_from_json(const Json& j, std::string_view where);

/// Axis-aligned rectangle in the figure's body frame (mm).
struct LocalRect {
  Vec2 center;
  Vec2 size;
  double min_x() const { return center.x - size.x / 2; }
  double max_x() const { return center.x + size.x / 2; }
  double min_y() const { return center.y - size.y / 2; }
  double max_y() const { return center.y + size.y / 2; }
};

/// Standard base geometry in the body frame: the marker sits at the base
/// centre, the grip nut on a rod beside it, and the arms stand off the base
/// so a cut never reaches the marker.
struct FigureFootprint {
  double base_diameter_mm = 24.0;
  double marker_side_mm = 16.0;
  Vec2 grip_nut{0.0, 4.0};
  LocalRect left_arm{{-12.0, 0.0}, {4.0, 8.0}};
  LocalRect right_arm{{12.0, 0.0}, {4.0, 8.0}};
  LocalRect weapon{{12.0, -10.0}, {4.0, 6.0}};
  double height_mm = 30.0;  // standard figure height, where the laser is focused
  const LocalRect& part(DamageFlag f) const;
};

inline const FigureFootprint& standard_footprint() {
  static const FigureFootprint fp{};
  return fp;
}

}  // namespace dm::board
