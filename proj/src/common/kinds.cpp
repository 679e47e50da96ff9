// SPDX-License-Identifier: Apache-2.0
#include "dm/common/kinds.hpp"

namespace dm {

std::string_view to_string(WeaponKind k) {
  switch (k) {
    case WeaponKind::Axe: return "AXE";
    case WeaponKind::Sword: return "SWORD";
    case WeaponKind::Bow: return "BOW";
  }
  return "?";
}

std::string_view to_string(Rarity r) {
  switch (r) {
    case Rarity::Common: return "COMMON";
    case Rarity::Rare: return "RARE";
    case Rarity::Legendary: return "LEGENDARY";
  }
  return "?";
}

std::optional<WeaponKind> weapon_kind_from_string(std::string_view s) {
  for (WeaponKind k : kWeaponKinds) {
    if (to_string(k) == s) return k;
  }
  return std::nullopt;
}

std::optional<Rarity> rarity_from_string(std::string_view s) {
  for (Rarity r : {Rarity::Common, Rarity::Rare, Rarity::Legendary}) {
    if (to_string(r) == s) return r;
  }
  return std::nullopt;
}

}  // namespace dm
