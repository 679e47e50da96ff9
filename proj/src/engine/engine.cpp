// SPDX-License-Identifier: Apache-2.0
#include "dm/engine/engine.hpp"

#include <algorithm>
#include <map>

#include "dm/common/error.hpp"
#include "dm/common/hash.hpp"
#include "dm/engine/narration.hpp"

namespace dm::engine {

using board::DamageFlag;
using board::TileKind;

namespace {

std::string player_name(int p) { return "Player " + std::to_string(p + 1); }

Json enemy_json(const EnemyRef& e) { return Json{{"kind", to_string(e.kind)}, {"spider_id", e.spider_id}}; }

Json path_json(std::span<const GridPos> path) {
  Json a = Json::array();
  for (const auto& p : path) a.push_back(board::to_json(p));
  return a;
}

// Working copy of the state plus the events emitted so far. Every mutation
// goes through emit(), so live play and replay share one code path.
class Ctx {
 public:
  explicit Ctx(const GameState& s) : st(s), last_draws_(s.rng.draws()) {}

  GameState st;
  std::vector<SessionEvent> events;

  void emit(EventKind kind, Json payload) {
    SessionEvent e;
    e.seq = st.next_seq;
    e.kind = kind;
    e.payload = std::move(payload);
    e.rng_draws = st.rng.draws() - last_draws_;
    last_draws_ = st.rng.draws();
    apply_event(st, e, false);
    events.push_back(std::move(e));
  }

  void narrate(const std::string& key, const std::map<std::string, std::string>& vars = {}) {
    for (auto& line : default_narration().render(key, vars)) emit(EventKind::Narration, Json{{"key", key}, {"text", line}});
  }

  void set_phase(Phase phase, int active) { set_phase(phase, active, st.setup); }
  void set_phase(Phase phase, int active, bool setup) {
    emit(EventKind::PhaseChanged, Json{{"phase", to_string(phase)}, {"active", active}, {"setup", setup}, {"round", st.round}});
  }

  bool ended() const { return st.phase == Phase::Ended; }

  Transition done() { return {std::move(st), std::move(events)}; }

 private:
  std::uint64_t last_draws_;
};

const board::GameConfig& cfg_of(const GameState& s) { return s.cfg(); }

void require_active(const GameState& s, int player) {
  if (s.phase == Phase::Ended) throw Error(ErrorCode::PhaseMismatch, "the game has ended");
  if (player < 0 || player >= kPlayers || player != s.active) {
    throw Error(ErrorCode::NotYourTurn, "it is " + player_name(s.active) + "'s turn");
  }
}

void require_turn(const GameState& s, int player, Phase phase) {
  require_active(s, player);
  if (s.phase != phase) {
    throw Error(ErrorCode::PhaseMismatch,
                "expected phase " + std::string(to_string(phase)) + ", current " + std::string(to_string(s.phase)));
  }
}

std::optional<EnemyRef> adjacent_enemy(const GameState& s, GridPos p) {
  if (s.dragon.awake && board::manhattan(s.dragon.figure.pos, p) == 1) return EnemyRef{EnemyKind::Dragon, -1};
  for (const auto& sp : s.spiders) {
    if (board::manhattan(sp.pos, p) == 1) return EnemyRef{EnemyKind::Spider, sp.id};
  }
  return std::nullopt;
}

std::optional<GridPos> nearest_player(const GameState& s, GridPos from) {
  std::optional<GridPos> best;
  int best_d = 0;
  for (const auto& pl : s.players) {
    if (pl.downed) continue;
    const int d = board::manhattan(pl.figure.pos, from);
    if (!best || d < best_d) {
      best = pl.figure.pos;
      best_d = d;
    }
  }
  return best;
}

// One greedy Manhattan step toward the nearest standing player; ties go to
// the smaller column, then the smaller row. Stays put when adjacent or blocked.
std::optional<GridPos> step_toward(const GameState& s, GridPos from) {
  const auto target = nearest_player(s, from);
  if (!target) return std::nullopt;
  const int here = board::manhattan(from, *target);
  if (here <= 1) return std::nullopt;
  std::optional<GridPos> best;
  int best_d = here;
  for (const GridPos n : board::neighbors(from)) {
    if (!s.board.walkable(n) || s.occupied(n)) continue;
    const int d = board::manhattan(n, *target);
    if (d < best_d || (best && d == best_d && std::pair(n.col, n.row) < std::pair(best->col, best->row))) {
      best = n;
      best_d = d;
    }
  }
  return best;
}

void wake_dragon(Ctx& c) {
  c.emit(EventKind::DragonWoke, Json{{"sleep_points", 0}});
  c.narrate("DRAGON_WOKE");
}

void drain_sleep(Ctx& c, int amount) {
  const int sp = std::max(0, c.st.dragon.sleep_points - amount);
  c.emit(EventKind::SleepDrained, Json{{"amount", amount}, {"sleep_points", c.st.dragon.awake ? c.st.dragon.sleep_points : sp}});
  if (!c.st.dragon.awake && sp == 0) wake_dragon(c);
}

void grant_hint(Ctx& c, int player, const std::string& source) {
  const int id = static_cast<int>(c.st.hints.size());
  const Riddle& r = default_narration().riddles[static_cast<std::size_t>(id)];
  c.emit(EventKind::HintGranted,
         Json{{"player", player}, {"riddle", id}, {"element", r.element}, {"text", r.text}, {"source", source}});
}

void heal(Ctx& c, int player) {
  auto& f = c.st.players[static_cast<std::size_t>(player)].figure;
  const int hp = std::min(f.max_hp, f.hp + cfg_of(c.st).heal_amount);
  c.emit(EventKind::Healed, Json{{"player", player}, {"amount", hp - f.hp}, {"hp", hp}});
}

void reward(Ctx& c, int player, const std::string& source) {
  if (c.st.hints.size() < 3) {
    grant_hint(c, player, source);
  } else {
    heal(c, player);
  }
}

void player_down(Ctx& c, int player) {
  c.emit(EventKind::PlayerDowned, Json{{"player", player}});
  const auto& f = c.st.players[static_cast<std::size_t>(player)].figure;
  Json targets = Json::array();
  if (!f.damage.contains(DamageFlag::LeftArm)) {
    targets.push_back(to_string(DamageFlag::LeftArm));
  } else if (!f.damage.contains(DamageFlag::RightArm)) {
    targets.push_back(to_string(DamageFlag::RightArm));
  }
  if (f.weapon) targets.push_back(to_string(DamageFlag::Weapon));
  if (!targets.empty()) {
    c.emit(EventKind::DamageCutOrdered,
           Json{{"player", player}, {"figure", f.id}, {"marker_id", f.marker_id}, {"pos", board::to_json(f.pos)}, {"targets", targets}});
  }
  c.narrate("PLAYER_DOWNED", {{"player", player_name(player)}});
  if (c.st.alive_players() == 0) {
    c.narrate("LOSS");
    c.emit(EventKind::GameEnded, Json{{"outcome", "LOSS"}, {"round", c.st.round}});
  }
}

void damage_player(Ctx& c, int player, int amount, const std::string& source) {
  const auto& f = c.st.players[static_cast<std::size_t>(player)].figure;
  const int hp = std::max(0, f.hp - amount);
  c.emit(EventKind::PlayerDamaged, Json{{"player", player}, {"amount", f.hp - hp}, {"hp", hp}, {"source", source}});
  if (hp == 0) player_down(c, player);
}

void spawn_spider(Ctx& c, GridPos pos, const std::string& reason) {
  c.emit(EventKind::SpiderSpawned,
         Json{{"id", c.st.next_spider_id}, {"pos", board::to_json(pos)}, {"hp", cfg_of(c.st).spider.hp}, {"reason", reason}});
}

std::vector<GridPos> free_holes(const GameState& s) {
  std::vector<GridPos> out;
  for (const GridPos h : s.board.cells_of(TileKind::Hole)) {
    if (!s.occupied(h)) out.push_back(h);
  }
  return out;
}

void begin_combat(Ctx& c, int player, const EnemyRef& enemy, bool after_move) {
  const auto& w = c.st.players[static_cast<std::size_t>(player)].figure.weapon;
  const int rounds = w ? w->combat_rounds : 1;
  c.emit(EventKind::CombatStarted,
         Json{{"player", player}, {"enemy", enemy_json(enemy)}, {"rounds", rounds}, {"after_move", after_move}});
  c.narrate("COMBAT", {{"player", player_name(player)}, {"enemy", enemy.kind == EnemyKind::Dragon ? "dragon" : "spider"}});
  c.set_phase(Phase::AwaitDice, player);
}

void start_turn(Ctx& c, int player) {
  if (const auto e = adjacent_enemy(c.st, c.st.players[static_cast<std::size_t>(player)].figure.pos)) {
    begin_combat(c, player, *e, false);
  } else {
    c.set_phase(Phase::AwaitMove, player);
  }
}

void run_npc_phase(Ctx& c) {
  const board::GameConfig& cfg = cfg_of(c.st);
  c.set_phase(Phase::NpcPhase, c.st.active);

  std::vector<int> ids;
  for (const auto& sp : c.st.spiders) ids.push_back(sp.id);
  for (const int id : ids) {
    const GridPos from = c.st.spider(id)->pos;
    if (const auto to = step_toward(c.st, from)) {
      c.emit(EventKind::SpiderMoved, Json{{"id", id}, {"from", board::to_json(from)}, {"to", board::to_json(*to)}});
    }
  }

  if (c.st.round % cfg.spider_spawn_interval == 0 && static_cast<int>(c.st.spiders.size()) < cfg.max_spiders) {
    const auto holes = free_holes(c.st);
    if (!holes.empty()) {
      const int k = c.st.rng.uniform_int(0, static_cast<int>(holes.size()) - 1);
      spawn_spider(c, holes[static_cast<std::size_t>(k)], "INTERVAL");
      c.narrate("SPIDERS");
    }
  }

  if (c.st.dragon.awake) {
    const GridPos from = c.st.dragon.figure.pos;
    std::vector<GridPos> path;
    GameState probe = c.st;
    for (int i = 0; i < cfg.dragon_moves; ++i) {
      const auto next = step_toward(probe, probe.dragon.figure.pos);
      if (!next) break;
      path.push_back(*next);
      probe.dragon.figure.pos = *next;
    }
    if (!path.empty()) {
      c.emit(EventKind::DragonMoved, Json{{"figure", c.st.dragon.figure.id},
                                          {"marker_id", c.st.dragon.figure.marker_id},
                                          {"from", board::to_json(from)},
                                          {"to", board::to_json(path.back())},
                                          {"path", path_json(path)}});
    }
  }

  for (int p = 0; p < kPlayers; ++p) {
    const auto& pl = c.st.players[static_cast<std::size_t>(p)];
    if (pl.downed) c.emit(EventKind::PlayerRespawned, Json{{"player", p}, {"hp", (pl.figure.max_hp + 1) / 2}});
  }
  c.emit(EventKind::RoundEnded, Json{{"round", c.st.round}});
}

void end_turn(Ctx& c) {
  if (c.ended()) return;
  int p = c.st.active;
  for (;;) {
    if (p == kPlayers - 1) {
      run_npc_phase(c);
      if (c.ended()) return;
      p = 0;
    } else {
      ++p;
    }
    if (!c.st.players[static_cast<std::size_t>(p)].downed) {
      start_turn(c, p);
      return;
    }
    c.emit(EventKind::TurnSkipped, Json{{"player", p}, {"reason", "DOWNED"}});
  }
}

void run_triggers(Ctx& c, int player) {
  const GridPos pos = c.st.players[static_cast<std::size_t>(player)].figure.pos;
  const board::Tile& tile = c.st.board.at(pos);
  if (tile.kind == TileKind::Chest && !tile.chest_opened) {
    const bool hint = c.st.chest_hints_found < cfg_of(c.st).chest_hints && c.st.hints.size() < 3;
    c.emit(EventKind::ChestOpened, Json{{"player", player}, {"pos", board::to_json(pos)}, {"content", hint ? "HINT" : "HEAL"}});
    c.narrate(hint ? "CHEST_HINT" : "CHEST_HEAL", {{"player", player_name(player)}});
    if (hint) {
      grant_hint(c, player, "CHEST");
    } else {
      heal(c, player);
    }
  }
  if (const auto e = adjacent_enemy(c.st, pos)) {
    begin_combat(c, player, *e, true);
  } else if (board::manhattan(pos, c.st.jailer) == 1) {
    c.set_phase(Phase::AwaitBehavior, player);
  } else if (tile.kind == TileKind::Exit && c.st.hints.size() == 3) {
    c.set_phase(Phase::AwaitKey, player);
  } else if (board::manhattan(pos, c.st.merchant) == 1) {
    c.set_phase(Phase::AwaitCraft, player);
    c.narrate("CRAFT_PROMPT", {{"player", player_name(player)}});
  } else {
    end_turn(c);
  }
}

}  // namespace

Transition begin_session(std::shared_ptr<const board::GameConfig> cfg) {
  GameState s0 = initial_state(std::move(cfg));
  Ctx c(s0);
  c.emit(EventKind::SessionStarted,
         Json{{"seed", c.st.cfg().seed}, {"players", kPlayers}, {"config_sha256", sha256_hex(board::to_json(c.st.cfg()).dump())}});
  c.narrate("INTRO");
  c.set_phase(Phase::AwaitCraft, 0, true);
  c.narrate("CRAFT_PROMPT", {{"player", player_name(0)}});
  return c.done();
}

std::vector<GridPos> plan_path(const GameState& s, int player, std::span<const vision::TokenId> tokens) {
  const auto& pl = s.players[static_cast<std::size_t>(player)];
  const int budget = std::min(board::token_budget(cfg_of(s).base_tokens, pl.figure.weapon), cfg_of(s).max_tokens);
  if (static_cast<int>(tokens.size()) > budget) {
    throw Error(ErrorCode::TooManyTokens,
                std::to_string(tokens.size()) + " tokens exceed the budget of " + std::to_string(budget));
  }
  std::vector<GridPos> path;
  GridPos at = pl.figure.pos;
  for (const vision::TokenId t : tokens) {
    board::Direction d;
    switch (t) {
      case vision::TokenId::MoveUp: d = board::Direction::Up; break;
      case vision::TokenId::MoveDown: d = board::Direction::Down; break;
      case vision::TokenId::MoveLeft: d = board::Direction::Left; break;
      case vision::TokenId::MoveRight: d = board::Direction::Right; break;
      default: throw Error(ErrorCode::InvalidPath, std::string(vision::to_string(t)) + " is not a movement token");
    }
    at = board::step(at, d);
    if (!s.board.in_bounds(at)) throw Error(ErrorCode::InvalidPath, "path leaves the board at " + board::to_string(at));
    if (!s.board.walkable(at)) {
      const char ch = board::tile_char(s.board.at(at).kind);
      throw Error(ErrorCode::InvalidPath, std::string("path crosses impassable terrain '") + ch + "' at " + board::to_string(at));
    }
    path.push_back(at);
  }
  if (!path.empty() && s.occupied(path.back(), player)) {
    throw Error(ErrorCode::InvalidPath, "target cell " + board::to_string(path.back()) + " is occupied");
  }
  return path;
}

Transition submit_move(const GameState& s, int player, std::span<const vision::TokenId> tokens) {
  require_turn(s, player, Phase::AwaitMove);
  if (s.pending) throw Error(ErrorCode::PhaseMismatch, "a move is already in progress");
  const auto path = plan_path(s, player, tokens);
  Ctx c(s);
  if (path.empty()) {
    run_triggers(c, player);
    return c.done();
  }
  Json toks = Json::array();
  for (const auto t : tokens) toks.push_back(vision::to_string(t));
  const auto& f = s.players[static_cast<std::size_t>(player)].figure;
  c.emit(EventKind::MotionRequested, Json{{"player", player},
                                          {"figure", f.id},
                                          {"marker_id", f.marker_id},
                                          {"from", board::to_json(f.pos)},
                                          {"path", path_json(path)},
                                          {"tokens", toks},
                                          {"occupancy_version", s.occupancy_version}});
  return c.done();
}

Transition apply_move(const GameState& s, int player, std::span<const GridPos> path) {
  require_turn(s, player, Phase::AwaitMove);
  if (!s.pending || s.pending->player != player) throw Error(ErrorCode::InvalidPath, "no pending move for this player");
  if (!std::equal(path.begin(), path.end(), s.pending->path.begin(), s.pending->path.end())) {
    throw Error(ErrorCode::InvalidPath, "path differs from the validated one");
  }
  if (s.pending->occupancy_version != s.occupancy_version) {
    throw Error(ErrorCode::StalePath, "board changed since the path was validated");
  }
  Ctx c(s);
  const GridPos from = s.players[static_cast<std::size_t>(player)].figure.pos;
  c.emit(EventKind::Moved, Json{{"player", player}, {"from", board::to_json(from)}, {"to", board::to_json(path.back())}, {"path", path_json(path)}});
  if (!c.st.dragon.awake && path.size() > 1) {
    int noise = 0;
    for (const GridPos p : path) noise += board::manhattan(p, c.st.dragon.figure.pos) <= cfg_of(s).hearing_range_tiles;
    if (noise > 0) {
      const int sp = std::max(0, c.st.dragon.sleep_points - noise);
      c.emit(EventKind::Noise, Json{{"player", player}, {"noise", noise}, {"sleep_points", sp}});
      if (sp == 0) wake_dragon(c);
    }
  }
  run_triggers(c, player);
  return c.done();
}

Transition cancel_move(const GameState& s, int player, std::string_view reason) {
  require_turn(s, player, Phase::AwaitMove);
  if (!s.pending) throw Error(ErrorCode::PhaseMismatch, "no pending move");
  Ctx c(s);
  c.emit(EventKind::MoveCancelled, Json{{"player", player}, {"reason", reason}});
  return c.done();
}

Transition resolve_combat_round(const GameState& s, int player, std::span<const int> player_dice) {
  require_turn(s, player, Phase::AwaitDice);
  const board::GameConfig& cfg = cfg_of(s);
  if (static_cast<int>(player_dice.size()) != cfg.combat_dice) {
    throw Error(ErrorCode::BadDieValue, "expected " + std::to_string(cfg.combat_dice) + " dice");
  }
  for (const int d : player_dice) {
    if (d < 1 || d > 6) throw Error(ErrorCode::BadDieValue, "die value " + std::to_string(d) + " outside 1..6");
  }
  if (!s.combat || s.combat->player != player) throw Error(ErrorCode::Internal, "no combat in progress");

  Ctx c(s);
  const CombatState combat = *s.combat;
  const bool dragon = combat.enemy.kind == EnemyKind::Dragon;
  const board::EntityStats& es = dragon ? cfg.dragon : cfg.spider;
  Json rolls = Json::array();
  int enemy_total = es.dice_bonus;
  for (int i = 0; i < es.dice_count; ++i) {
    const int r = c.st.rng.uniform_int(1, 6);
    rolls.push_back(r);
    enemy_total += r;
  }
  int player_total = 0;
  for (const int d : player_dice) player_total += d;

  const auto& pf = s.players[static_cast<std::size_t>(player)].figure;
  const int player_damage = cfg.unarmed_damage + (pf.weapon ? pf.weapon->damage_bonus : 0);
  int player_hp = pf.hp;
  int enemy_hp = dragon ? s.dragon.figure.hp : s.spider(combat.enemy.spider_id)->hp;
  std::string winner = "NONE";
  int damage = 0;
  if (player_total > enemy_total) {
    winner = "PLAYER";
    damage = std::min(enemy_hp, player_damage);
    enemy_hp -= damage;
  } else if (enemy_total > player_total) {
    winner = "ENEMY";
    damage = std::min(player_hp, es.damage);
    player_hp -= damage;
  }
  c.emit(EventKind::CombatRound, Json{{"player", player},
                                      {"enemy", enemy_json(combat.enemy)},
                                      {"round", combat.rounds_total - combat.rounds_left + 1},
                                      {"player_dice", Json(std::vector<int>(player_dice.begin(), player_dice.end()))},
                                      {"player_total", player_total},
                                      {"enemy_rolls", rolls},
                                      {"enemy_total", enemy_total},
                                      {"winner", winner},
                                      {"damage", damage},
                                      {"player_hp", player_hp},
                                      {"enemy_hp", enemy_hp}});

  auto finish = [&](const char* reason) {
    c.emit(EventKind::CombatEnded, Json{{"player", player}, {"reason", reason}});
    if (combat.after_move) {
      end_turn(c);
    } else {
      c.set_phase(Phase::AwaitMove, player);
    }
  };
  if (enemy_hp == 0) {
    c.emit(EventKind::EnemyDefeated, Json{{"player", player}, {"enemy", enemy_json(combat.enemy)}});
    if (dragon) {
      c.narrate("DRAGON_DEFEATED");
    } else {
      c.narrate("ENEMY_DEFEATED", {{"player", player_name(player)}, {"enemy", "spider"}});
    }
    finish("ENEMY_DEFEATED");
  } else if (player_hp == 0) {
    c.emit(EventKind::CombatEnded, Json{{"player", player}, {"reason", "PLAYER_DOWNED"}});
    player_down(c, player);
    end_turn(c);
  } else if (c.st.combat->rounds_left == 0) {
    finish("ROUNDS_EXHAUSTED");
  }
  return c.done();
}

Transition jailer_interaction(const GameState& s, int player, Behavior behavior) {
  require_turn(s, player, Phase::AwaitBehavior);
  Ctx c(s);
  const auto jailer = static_cast<Behavior>(c.st.rng.uniform_int(0, 2));
  const int result = rps(behavior, jailer);
  c.emit(EventKind::JailerRound, Json{{"player", player},
                                      {"behavior", to_string(behavior)},
                                      {"jailer", to_string(jailer)},
                                      {"result", result > 0 ? "WIN" : result < 0 ? "LOSS" : "DRAW"}});
  if (result > 0) {
    c.narrate("JAILER_WIN");
    reward(c, player, "JAILER");
  } else if (result == 0) {
    c.narrate("JAILER_DRAW");
  } else {
    c.narrate("JAILER_LOSS", {{"player", player_name(player)}});
    if (c.st.rng.uniform_int(0, 1) == 0) {
      damage_player(c, player, cfg_of(s).jailer_damage, "JAILER");
    } else {
      drain_sleep(c, cfg_of(s).jailer_sleep_drain);
    }
  }
  if (c.ended()) return c.done();

  std::vector<GridPos> free;
  for (const GridPos p : c.st.board.cells_of(TileKind::Floor)) {
    if (!c.st.occupied(p)) free.push_back(p);
  }
  if (!free.empty()) {
    const GridPos to = free[static_cast<std::size_t>(c.st.rng.uniform_int(0, static_cast<int>(free.size()) - 1))];
    c.emit(EventKind::JailerMoved, Json{{"from", board::to_json(c.st.jailer)}, {"to", board::to_json(to)}});
  }
  end_turn(c);
  return c.done();
}

Transition merchant_craft(const GameState& s, int player, const std::optional<vision::CraftRating>& rating, bool late) {
  require_turn(s, player, Phase::AwaitCraft);
  if (!rating) throw Error(ErrorCode::NoRating, "no rating available for this craft");
  Ctx c(s);
  const Rarity rarity = late ? Rarity::Common : rating->rarity;
  const board::Weapon w = cfg_of(s).make_weapon(rating->kind, rarity);
  c.emit(EventKind::Crafted, Json{{"player", player}, {"rating", vision::to_json(*rating)}, {"late", late}, {"weapon", board::to_json(w)}});
  if (late) c.narrate("CRAFT_LATE");
  c.narrate("CRAFTED", {{"player", player_name(player)}, {"kind", std::string(to_string(w.kind))}, {"rarity", std::string(to_string(w.rarity))}});
  if (c.st.setup) {
    if (player < kPlayers - 1) {
      c.set_phase(Phase::AwaitCraft, player + 1, true);
      c.narrate("CRAFT_PROMPT", {{"player", player_name(player + 1)}});
    } else {
      c.st.setup = false;  // carried by the next PHASE_CHANGED
      start_turn(c, 0);
    }
  } else {
    end_turn(c);
  }
  return c.done();
}

Transition skip_craft(const GameState& s, int player) {
  require_turn(s, player, Phase::AwaitCraft);
  if (s.setup) throw Error(ErrorCode::PhaseMismatch, "the first weapon must be crafted");
  Ctx c(s);
  end_turn(c);
  return c.done();
}

Transition attempt_key(const GameState& s, int player, bool success) {
  require_active(s, player);
  if (s.phase != Phase::AwaitKey) {
    if (s.hints.size() < 3) throw Error(ErrorCode::NotReady, "all three hints are needed before forging the key");
    throw Error(ErrorCode::PhaseMismatch, "the key can only be tried at the exit");
  }
  Ctx c(s);
  c.emit(EventKind::KeyResult, Json{{"player", player}, {"success", success}});
  if (success) {
    c.narrate("KEY_SUCCESS");
    c.emit(EventKind::GameEnded, Json{{"outcome", "WIN"}, {"round", c.st.round}});
    return c.done();
  }
  c.narrate("KEY_FAILURE");
  if (!c.st.dragon.awake) wake_dragon(c);
  const GridPos exit = c.st.board.exit();
  auto holes = free_holes(c.st);
  std::stable_sort(holes.begin(), holes.end(),
                   [&](GridPos a, GridPos b) { return board::manhattan(a, exit) < board::manhattan(b, exit); });
  const int n = std::min<int>(cfg_of(s).key_failure_spiders, static_cast<int>(holes.size()));
  for (int i = 0; i < n; ++i) spawn_spider(c, holes[static_cast<std::size_t>(i)], "KEY_FAILURE");
  if (n > 0) c.narrate("SPIDERS");
  end_turn(c);
  return c.done();
}

Transition npc_phase(const GameState& s) {
  if (s.phase != Phase::NpcPhase) throw Error(ErrorCode::PhaseMismatch, "not in the NPC phase");
  Ctx c(s);
  run_npc_phase(c);
  if (!c.ended()) start_turn(c, 0);
  return c.done();
}

Outcome check_end(const GameState& s) { return s.outcome; }

GameState replay(std::shared_ptr<const board::GameConfig> cfg, std::span<const SessionEvent> events) {
  GameState s = initial_state(std::move(cfg));
  for (const auto& e : events) apply_event(s, e, true);
  return s;
}

Engine::Engine(std::shared_ptr<const board::GameConfig> cfg) {
  Transition t = begin_session(std::move(cfg));
  state_ = std::move(t.state);
  log_ = std::move(t.events);
}

std::vector<SessionEvent> Engine::commit(Transition t) {
  state_ = std::move(t.state);
  log_.insert(log_.end(), t.events.begin(), t.events.end());
  return std::move(t.events);
}

std::vector<SessionEvent> Engine::submit_move(int p, std::span<const vision::TokenId> t) { return commit(engine::submit_move(state_, p, t)); }
std::vector<SessionEvent> Engine::apply_move(int p, std::span<const GridPos> path) { return commit(engine::apply_move(state_, p, path)); }
std::vector<SessionEvent> Engine::cancel_move(int p, std::string_view r) { return commit(engine::cancel_move(state_, p, r)); }
std::vector<SessionEvent> Engine::combat_round(int p, std::span<const int> d) { return commit(resolve_combat_round(state_, p, d)); }
std::vector<SessionEvent> Engine::jailer(int p, Behavior b) { return commit(jailer_interaction(state_, p, b)); }
std::vector<SessionEvent> Engine::craft(int p, const std::optional<vision::CraftRating>& r, bool late) {
  return commit(merchant_craft(state_, p, r, late));
}
std::vector<SessionEvent> Engine::skip_craft(int p) { return commit(engine::skip_craft(state_, p)); }
std::vector<SessionEvent> Engine::attempt_key(int p, bool success) { return commit(engine::attempt_key(state_, p, success)); }

}  // namespace dm::engine
