// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <optional>
#include <string_view>

namespace dm {

enum class WeaponKind { Axe, Sword, Bow };
inline constexpr std::array<WeaponKind, 3> kWeaponKinds = {WeaponKind::Axe, WeaponKind::Sword,
                                                           WeaponKind::Bow};

// Ordered from weakest to strongest.
enum class Rarity { Common, Rare, Legendary };
inline constexpr int kRarityTiers = 3;

std::string_view to_string(WeaponKind k);
std::string_view to_string(Rarity r);
std::optional<WeaponKind> weapon_kind_from_string(std::string_view s);
std::optional<Rarity> rarity_from_string(std::string_view s);

}  // namespace dm
