// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstdint>
#include <string>

#include "dm/board/board.hpp"
#include "dm/board/figure.hpp"
#include "dm/common/json.hpp"

namespace dm::board {

inline constexpr std::string_view kConfigSchema = "dm.config/1";

/// Machine work envelope after the gripper attachment (x reduced to 400 mm).
inline constexpr double kEnvelopeX = 400.0;
inline constexpr double kEnvelopeY = 280.0;

struct EntityStats {
  int hp = 1;
  int dice_count = 1;  // d6 rolled per combat round
  int dice_bonus = 0;
  int damage = 1;
  friend bool operator==(const EntityStats&, const EntityStats&) = default;
};

struct WeaponKindEffect {
  int damage = 0;
  int move_token_delta = 0;
  int combat_rounds = 1;
  friend bool operator==(const WeaponKindEffect&, const WeaponKindEffect&) = default;
};

struct MachineConfig {
  double z_max = 80.0;
  double travel_z = 60.0;   // clearance above every figure
  double grip_z = 20.0;     // magnet touches the grip nut
  double focus_z = 30.0;    // laser focal plane at standard figure height
  double travel_feed = 6000.0;  // mm/min
  double plunge_feed = 1200.0;
  double cut_feed = 600.0;
  double max_feed = 6000.0;
  int laser_power = 800;    // S units, 0..1000
  int max_laser_power = 1000;
  double capture_radius_mm = 4.0;
  double max_correction_mm = 10.0;
  bool correction_enabled = true;
  double dwell_ms = 200.0;  // magnet settle time
  double cut_overrun_mm = 0.3;
  friend bool operator==(const MachineConfig&, const MachineConfig&) = default;
};

struct SimOptions {
  std::uint64_t seed = 1;
  double sigma_place_mm = 1.5;
  double sigma_meas_mm = 0.3;
  double fov_mm = 20.0;
  double speed = 1000.0;  // simulated seconds per wall-clock second
  friend bool operator==(const SimOptions&, const SimOptions&) = default;
};

struct GameConfig {
  std::uint64_t seed = 7;
  Board board;
  double cell_size_mm = 30.0;
  Vec2 origin_mm{20.0, 20.0};

  std::vector<GridPos> player_starts;  // exactly 3
  GridPos dragon_start;
  GridPos merchant_pos;
  GridPos jailer_start;

  int player_max_hp = 10;
  int unarmed_damage = 1;
  EntityStats dragon{12, 2, 1, 3};
  EntityStats spider{2, 1, 0, 1};
  int dragon_sleep_points = 6;
  int dragon_moves = 2;
  int hearing_range_tiles = 3;
  int spider_spawn_interval = 3;
  int max_spiders = 3;
  int key_failure_spiders = 2;
  int chest_hints = 2;
  int heal_amount = 2;
  int jailer_damage = 2;
  int jailer_sleep_drain = 2;

  int base_tokens = 3;
  int max_tokens = kMaxTokens;
  int combat_dice = kCombatDice;
  std::array<int, 3> rarity_damage_bonus{1, 2, 3};           // by Rarity
  std::array<WeaponKindEffect, 3> kind_effects{{{0, -1, 2},  // AXE
                                                {1, 0, 1},   // SWORD
                                                {0, 1, 1}}}; // BOW

  double rarity_legendary = 0.2;
  double rarity_rare = 0.5;
  double key_threshold = 0.15;
  double craft_time_limit_s = 120.0;
  double mm_per_pixel = 0.5;

  MachineConfig machine;
  SimOptions sim;

  int rarity_tiers() const { return kRarityTiers; }
  Weapon make_weapon(WeaponKind k, Rarity r) const;
  /// Throws InvalidConfig describing the first violated constraint.
  void validate() const;
};

Json to_json(const GameConfig& c);
GameConfig config_from_json(const Json& j);
GameConfig load_config(const std::string& path);
/// The shipped default (12 x 9 board, seed 7).
GameConfig default_config();
std::string default_config_path();

}  // namespace dm::board
