// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "dm/engine/events.hpp"
#include "dm/engine/state.hpp"
#include "dm/vision/markers.hpp"
#include "dm/vision/shapes.hpp"

namespace dm::engine {

/// Result of an operation. Operations never mutate their input: on error
/// they throw and the caller's state is untouched.
struct Transition {
  GameState state;
  std::vector<SessionEvent> events;
};

Transition begin_session(std::shared_ptr<const board::GameConfig> cfg);

/// Validates a token path. A valid non-empty path is stored as the pending
/// move and announced with MOTION_REQUESTED; an empty token list passes the
/// turn (triggers at the current cell still apply).
Transition submit_move(const GameState& s, int player, std::span<const vision::TokenId> tokens);
/// Path a token list would take, or the reason it is rejected.
std::vector<GridPos> plan_path(const GameState& s, int player, std::span<const vision::TokenId> tokens);
/// Commits the pending move after the motion layer carried it out.
Transition apply_move(const GameState& s, int player, std::span<const GridPos> path);
/// Drops the pending move (e.g. the gripper failed); the player may re-plan.
Transition cancel_move(const GameState& s, int player, std::string_view reason);

Transition resolve_combat_round(const GameState& s, int player, std::span<const int> player_dice);
Transition jailer_interaction(const GameState& s, int player, Behavior behavior);
/// `rating` is empty when the scan produced nothing usable (NO_RATING).
Transition merchant_craft(const GameState& s, int player, const std::optional<vision::CraftRating>& rating, bool late);
/// Leaves the merchant without crafting (not allowed during initial setup).
Transition skip_craft(const GameState& s, int player);
Transition attempt_key(const GameState& s, int player, bool success);
/// Runs the NPC phase explicitly (the engine also runs it after the third player's turn).
Transition npc_phase(const GameState& s);

Outcome check_end(const GameState& s);

/// Rebuilds the state by folding a log over the fresh state for `cfg`.
GameState replay(std::shared_ptr<const board::GameConfig> cfg, std::span<const SessionEvent> events);

/// Stateful facade: holds the authoritative state and the full event log.
class Engine {
 public:
  explicit Engine(std::shared_ptr<const board::GameConfig> cfg);
  const GameState& state() const { return state_; }
  const std::vector<SessionEvent>& log() const { return log_; }

  /// Each call returns the events it appended.
  std::vector<SessionEvent> submit_move(int player, std::span<const vision::TokenId> tokens);
  std::vector<SessionEvent> apply_move(int player, std::span<const GridPos> path);
  std::vector<SessionEvent> cancel_move(int player, std::string_view reason);
  std::vector<SessionEvent> combat_round(int player, std::span<const int> dice);
  std::vector<SessionEvent> jailer(int player, Behavior b);
  std::vector<SessionEvent> craft(int player, const std::optional<vision::CraftRating>& rating, bool late);
  std::vector<SessionEvent> skip_craft(int player);
  std::vector<SessionEvent> attempt_key(int player, bool success);

 private:
  std::vector<SessionEvent> commit(Transition t);
  GameState state_;
  std::vector<SessionEvent> log_;
};

}  // namespace dm::engine
