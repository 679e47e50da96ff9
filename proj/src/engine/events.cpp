// SPDX-License-Identifier: Apache-2.0
#include "dm/engine/events.hpp"

#include <algorithm>
#include <array>

#include "dm/common/error.hpp"

namespace dm::engine {

namespace {

constexpr std::array<std::string_view, 30> kKindNames = {
    "SESSION_STARTED", "NARRATION",       "PHASE_CHANGED",   "TURN_SKIPPED",  "MOTION_REQUESTED",
    "MOVE_CANCELLED",  "MOVED",           "NOISE",           "DRAGON_WOKE",   "CHEST_OPENED",
    "HINT_GRANTED",    "HEALED",          "COMBAT_STARTED",  "COMBAT_ROUND",  "COMBAT_ENDED",
    "ENEMY_DEFEATED",  "PLAYER_DAMAGED",  "PLAYER_DOWNED",   "DAMAGE_CUT_ORDERED", "JAILER_ROUND",
    "JAILER_MOVED",    "SLEEP_DRAINED",   "CRAFTED",         "SPIDER_SPAWNED", "SPIDER_MOVED",
    "DRAGON_MOVED",    "PLAYER_RESPAWNED", "ROUND_ENDED",    "KEY_RESULT",    "GAME_ENDED"};

PlayerState& player_at(GameState& s, const Json& p) {
  const int i = require<int>(p, "player", "/payload");
  if (i < 0 || i >= kPlayers) throw Error(ErrorCode::CorruptLog, "player index out of range");
  return s.players[static_cast<std::size_t>(i)];
}

GridPos pos_of(const Json& p, const char* key) { return board::grid_pos_from_json(p.at(key), std::string("/payload/") + key); }

EnemyRef enemy_of(const Json& p) {
  const Json& e = p.at("enemy");
  EnemyRef r;
  r.kind = require<std::string>(e, "kind", "/payload/enemy") == "DRAGON" ? EnemyKind::Dragon : EnemyKind::Spider;
  r.spider_id = require<int>(e, "spider_id", "/payload/enemy");
  return r;
}

void apply_payload(GameState& s, EventKind kind, const Json& p) {
  switch (kind) {
    case EventKind::SessionStarted:
    case EventKind::Narration:
    case EventKind::TurnSkipped:
    case EventKind::JailerRound:
      break;
    case EventKind::PhaseChanged: {
      const auto ph = phase_from_string(require<std::string>(p, "phase", "/payload"));
      if (!ph) throw Error(ErrorCode::CorruptLog, "unknown phase");
      s.phase = *ph;
      s.active = require<int>(p, "active", "/payload");
      s.setup = require<bool>(p, "setup", "/payload");
      break;
    }
    case EventKind::MotionRequested: {
      PendingMove m;
      m.player = require<int>(p, "player", "/payload");
      for (const auto& c : p.at("path")) m.path.push_back(board::grid_pos_from_json(c, "/payload/path"));
      m.occupancy_version = require<std::uint64_t>(p, "occupancy_version", "/payload");
      s.pending = std::move(m);
      break;
    }
    case EventKind::MoveCancelled:
      s.pending.reset();
      break;
    case EventKind::Moved:
      player_at(s, p).figure.pos = pos_of(p, "to");
      s.pending.reset();
      ++s.occupancy_version;
      break;
    case EventKind::Noise:
    case EventKind::SleepDrained:
      s.dragon.sleep_points = require<int>(p, "sleep_points", "/payload");
      break;
    case EventKind::DragonWoke:
      s.dragon.awake = true;
      s.dragon.sleep_points = require<int>(p, "sleep_points", "/payload");
      break;
    case EventKind::ChestOpened:
      s.board.at(pos_of(p, "pos")).chest_opened = true;
      break;
    case EventKind::HintGranted:
      s.hints.push_back(require<int>(p, "riddle", "/payload"));
      if (require<std::string>(p, "source", "/payload") == "CHEST") ++s.chest_hints_found;
      break;
    case EventKind::Healed:
    case EventKind::PlayerDamaged:
      player_at(s, p).figure.hp = require<int>(p, "hp", "/payload");
      break;
    case EventKind::CombatStarted: {
      CombatState c;
      c.player = require<int>(p, "player", "/payload");
      c.enemy = enemy_of(p);
      c.rounds_total = c.rounds_left = require<int>(p, "rounds", "/payload");
      c.after_move = require<bool>(p, "after_move", "/payload");
      s.combat = c;
      break;
    }
    case EventKind::CombatRound: {
      player_at(s, p).figure.hp = require<int>(p, "player_hp", "/payload");
      const EnemyRef e = enemy_of(p);
      const int enemy_hp = require<int>(p, "enemy_hp", "/payload");
      if (e.kind == EnemyKind::Dragon) {
        s.dragon.figure.hp = enemy_hp;
      } else if (Spider* sp = s.spider(e.spider_id)) {
        sp->hp = enemy_hp;
      } else {
        throw Error(ErrorCode::CorruptLog, "combat round against a missing spider");
      }
      if (s.combat) --s.combat->rounds_left;
      break;
    }
    case EventKind::CombatEnded:
      s.combat.reset();
      break;
    case EventKind::EnemyDefeated: {
      const EnemyRef e = enemy_of(p);
      if (e.kind == EnemyKind::Dragon) {
        s.dragon.figure.hp = s.dragon.figure.max_hp;
        s.dragon.sleep_points = s.cfg().dragon_sleep_points;
        s.dragon.awake = false;
      } else {
        std::erase_if(s.spiders, [&](const Spider& sp) { return sp.id == e.spider_id; });
        ++s.occupancy_version;
      }
      break;
    }
    case EventKind::PlayerDowned: {
      PlayerState& pl = player_at(s, p);
      pl.downed = true;
      pl.figure.hp = 0;
      break;
    }
    case EventKind::DamageCutOrdered: {
      PlayerState& pl = player_at(s, p);
      for (const auto& t : p.at("targets")) {
        const auto flag = board::damage_flag_from_string(t.get<std::string>());
        if (!flag) throw Error(ErrorCode::CorruptLog, "unknown damage target");
        pl.figure.damage.insert(*flag);
        if (*flag == board::DamageFlag::Weapon) pl.figure.weapon.reset();
      }
      break;
    }
    case EventKind::JailerMoved:
      s.jailer = pos_of(p, "to");
      ++s.occupancy_version;
      break;
    case EventKind::Crafted:
      player_at(s, p).figure.weapon = board::weapon_from_json(p.at("weapon"), "/payload/weapon");
      player_at(s, p).figure.damage.erase(board::DamageFlag::Weapon);
      break;
    case EventKind::SpiderSpawned: {
      Spider sp;
      sp.id = require<int>(p, "id", "/payload");
      sp.pos = pos_of(p, "pos");
      sp.hp = require<int>(p, "hp", "/payload");
      s.spiders.push_back(sp);
      s.next_spider_id = sp.id + 1;
      ++s.occupancy_version;
      break;
    }
    case EventKind::SpiderMoved: {
      Spider* sp = s.spider(require<int>(p, "id", "/payload"));
      if (!sp) throw Error(ErrorCode::CorruptLog, "move of a missing spider");
      sp->pos = pos_of(p, "to");
      ++s.occupancy_version;
      break;
    }
    case EventKind::DragonMoved:
      s.dragon.figure.pos = pos_of(p, "to");
      ++s.occupancy_version;
      break;
    case EventKind::PlayerRespawned: {
      PlayerState& pl = player_at(s, p);
      pl.downed = false;
      pl.figure.hp = require<int>(p, "hp", "/payload");
      break;
    }
    case EventKind::RoundEnded:
      s.round = require<int>(p, "round", "/payload") + 1;
      break;
    case EventKind::KeyResult:
      ++s.key_attempts;
      break;
    case EventKind::GameEnded:
      s.outcome = require<std::string>(p, "outcome", "/payload") == "WIN" ? Outcome::Win : Outcome::Loss;
      s.phase = Phase::Ended;
      s.pending.reset();
      s.combat.reset();
      break;
  }
}

}  // namespace

std::string_view to_string(EventKind k) { return kKindNames[static_cast<std::size_t>(k)]; }

std::optional<EventKind> event_kind_from_string(std::string_view s) {
  for (std::size_t i = 0; i < kKindNames.size(); ++i) {
    if (kKindNames[i] == s) return static_cast<EventKind>(i);
  }
  return std::nullopt;
}

Json to_json(const SessionEvent& e) {
  return Json{{"seq", e.seq}, {"kind", to_string(e.kind)}, {"payload", e.payload}, {"rng_draws", e.rng_draws}};
}

SessionEvent event_from_json(const Json& j) {
  SessionEvent e;
  e.seq = require<std::uint64_t>(j, "seq", "");
  const auto kind = event_kind_from_string(require<std::string>(j, "kind", ""));
  if (!kind) throw Error(ErrorCode::SchemaError, "/kind: unknown event kind");
  e.kind = *kind;
  if (!j.contains("payload") || !j.at("payload").is_object()) throw Error(ErrorCode::SchemaError, "/payload: missing");
  e.payload = j.at("payload");
  e.rng_draws = require<std::uint64_t>(j, "rng_draws", "");
  return e;
}

std::string canonical(const SessionEvent& e) { return to_json(e).dump(); }

void apply_event(GameState& s, const SessionEvent& e, bool advance_rng) {
  if (e.seq != s.next_seq) {
    throw Error(ErrorCode::CorruptLog, "expected seq " + std::to_string(s.next_seq) + ", got " + std::to_string(e.seq));
  }
  try {
    apply_payload(s, e.kind, e.payload);
  } catch (const Error& err) {
    if (err.code() == ErrorCode::CorruptLog) throw;
    throw Error(ErrorCode::CorruptLog, std::string(to_string(e.kind)) + ": " + err.what());
  } catch (const nlohmann::json::exception& err) {
    throw Error(ErrorCode::CorruptLog, std::string(to_string(e.kind)) + ": " + err.what());
  }
  if (advance_rng) s.rng.advance(e.rng_draws);
  ++s.next_seq;
}

}  // namespace dm::engine
