// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dm/common/json.hpp"
#include "dm/engine/state.hpp"

namespace dm::engine {

enum class EventKind {
  SessionStarted,
  Narration,
  PhaseChanged,
  TurnSkipped,
  MotionRequested,
  MoveCancelled,
  Moved,
  Noise,
  DragonWoke,
  ChestOpened,
  HintGranted,
  Healed,
  CombatStarted,
  CombatRound,
  CombatEnded,
  EnemyDefeated,
  PlayerDamaged,
  PlayerDowned,
  DamageCutOrdered,
  JailerRound,
  JailerMoved,
  SleepDrained,
  Crafted,
  SpiderSpawned,
  SpiderMoved,
  DragonMoved,
  PlayerRespawned,
  RoundEnded,
  KeyResult,
  GameEnded,
};

std::string_view to_string(EventKind k);
std::optional<EventKind> event_kind_from_string(std::string_view s);

struct SessionEvent {
  std::uint64_t seq = 0;
  EventKind kind = EventKind::Narration;
  Json payload = Json::object();
  std::uint64_t rng_draws = 0;  // draws consumed while producing this event
  friend bool operator==(const SessionEvent& a, const SessionEvent& b) {
    return a.seq == b.seq && a.kind == b.kind && a.payload == b.payload && a.rng_draws == b.rng_draws;
  }
};

Json to_json(const SessionEvent& e);
SessionEvent event_from_json(const Json& j);
/// Canonical single-line encoding.
std::string canonical(const SessionEvent& e);

/// Folds one event into the state. Live play applies events as they are
/// emitted (the RNG has already been drawn); replay passes advance_rng so the
/// stream is re-positioned from the recorded draw count. Throws CorruptLog
/// if the event's seq is not the next expected one.
void apply_event(GameState& s, const SessionEvent& e, bool advance_rng);

}  // namespace dm::engine
