// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "dm/board/config.hpp"
#include "dm/common/json.hpp"
#include "dm/common/rng.hpp"

namespace dm::engine {

using board::GridPos;

enum class Phase { AwaitMove, AwaitDice, AwaitBehavior, AwaitCraft, AwaitKey, NpcPhase, Ended };
enum class Outcome { Ongoing, Win, Loss };
enum class EnemyKind { Dragon, Spider };
enum class Behavior { Aggressive, Defensive, Deceitful };

std::string_view to_string(Phase p);
std::string_view to_string(Outcome o);
std::string_view to_string(EnemyKind k);
std::string_view to_string(Behavior b);
std::optional<Phase> phase_from_string(std::string_view s);
std::optional<Behavior> behavior_from_string(std::string_view s);

/// Rock-paper-scissors cycle: aggressive > deceitful > defensive > aggressive.
/// Returns 1 if `a` wins, -1 if `b` wins, 0 on a draw.
int rps(Behavior a, Behavior b);

inline constexpr int kPlayers = 3;
/// DM-16 ids carried by the tangible figures' bases.
inline constexpr int kPlayerMarkerBase = 8;
inline constexpr int kDragonMarker = 11;

struct PlayerState {
  board::Figure figure;
  bool downed = false;
  friend bool operator==(const PlayerState&, const PlayerState&) = default;
};

struct DragonState {
  board::Figure figure;
  int sleep_points = 0;
  bool awake = false;
  friend bool operator==(const DragonState&, const DragonState&) = default;
};

struct Spider {
  int id = 0;
  GridPos pos;
  int hp = 0;
  friend bool operator==(const Spider&, const Spider&) = default;
};

struct EnemyRef {
  EnemyKind kind = EnemyKind::Dragon;
  int spider_id = -1;
  friend bool operator==(const EnemyRef&, const EnemyRef&) = default;
};

struct CombatState {
  int player = 0;
  EnemyRef enemy;
  int rounds_total = 1;
  int rounds_left = 1;
  bool after_move = false;  // the turn ends when the fight does
  friend bool operator==(const CombatState&, const CombatState&) = default;
};

struct PendingMove {
  int player = 0;
  std::vector<GridPos> path;  // cells entered, in order
  std::uint64_t occupancy_version = 0;
  friend bool operator==(const PendingMove&, const PendingMove&) = default;
};

struct GameState {
  std::shared_ptr<const board::GameConfig> config;

  board::Board board;
  std::array<PlayerState, kPlayers> players;
  DragonState dragon;
  std::vector<Spider> spiders;
  int next_spider_id = 0;
  GridPos jailer;
  GridPos merchant;
  std::vector<int> hints;  // riddle ids in delivery order
  int chest_hints_found = 0;

  int round = 1;
  int active = 0;
  Phase phase = Phase::AwaitCraft;
  bool setup = true;  // initial crafting at the merchant
  Outcome outcome = Outcome::Ongoing;
  int key_attempts = 0;

  Rng rng;
  std::uint64_t next_seq = 0;
  std::uint64_t occupancy_version = 0;
  std::optional<PendingMove> pending;
  std::optional<CombatState> combat;

  const board::GameConfig& cfg() const { return *config; }
  const Spider* spider(int id) const;
  Spider* spider(int id);
  /// Cells of the tangible figures (players and dragon).
  std::vector<GridPos> figure_cells() const;
  /// True if any figure or NPC other than `ignore_player` stands at p.
  bool occupied(GridPos p, int ignore_player = -1) const;
  int alive_players() const;
};

/// Fresh state for `cfg` before any event.
GameState initial_state(std::shared_ptr<const board::GameConfig> cfg);

/// Canonical JSON (fixed field order) and its SHA-256.
Json to_json(const GameState& s);
std::string state_hash(const GameState& s);

}  // namespace dm::engine
