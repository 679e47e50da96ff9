// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include "dm/common/error.hpp"
#include "dm/engine/engine.hpp"
#include "fixtures.hpp"

using namespace dm;
using namespace dm::engine;
using vision::TokenId;

namespace {

constexpr TokenId U = TokenId::MoveUp, D = TokenId::MoveDown, L = TokenId::MoveLeft, R = TokenId::MoveRight;

ErrorCode code_of(const auto& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return ErrorCode::Internal;
}

GameState after_setup(WeaponKind k = WeaponKind::Bow, Rarity r = Rarity::Common) {
  Engine e(test::shared_default());
  for (int p = 0; p < kPlayers; ++p) e.craft(p, vision::CraftRating{k, 0.1, r}, false);
  return e.state();
}

// submit + apply as the motion layer would after a completed job.
Transition walk(const GameState& s, int player, std::vector<TokenId> tokens) {
  Transition a = submit_move(s, player, tokens);
  if (!a.state.pending) return a;
  const auto path = a.state.pending->path;
  Transition b = apply_move(a.state, player, path);
  a.events.insert(a.events.end(), b.events.begin(), b.events.end());
  return {std::move(b.state), std::move(a.events)};
}

bool has(const std::vector<SessionEvent>& ev, EventKind k) {
  return std::any_of(ev.begin(), ev.end(), [&](const SessionEvent& e) { return e.kind == k; });
}

const SessionEvent& first(const std::vector<SessionEvent>& ev, EventKind k) {
  const auto it = std::find_if(ev.begin(), ev.end(), [&](const SessionEvent& e) { return e.kind == k; });
  REQUIRE(it != ev.end());
  return *it;
}

int count(const std::vector<SessionEvent>& ev, EventKind k) {
  return static_cast<int>(std::count_if(ev.begin(), ev.end(), [&](const SessionEvent& e) { return e.kind == k; }));
}

// A quiet state: player 0 to move, placed at `at`.
GameState ready(GridPos at) {
  GameState s = after_setup();
  s.players[0].figure.pos = at;
  return s;
}

Behavior beats(Behavior b) {
  for (const Behavior x : {Behavior::Aggressive, Behavior::Defensive, Behavior::Deceitful}) {
    if (rps(x, b) > 0) return x;
  }
  return b;
}

Behavior loses_to(Behavior b) {
  for (const Behavior x : {Behavior::Aggressive, Behavior::Defensive, Behavior::Deceitful}) {
    if (rps(x, b) < 0) return x;
  }
  return b;
}

GameState at_jailer(std::uint64_t rng_seed) {
  GameState s = after_setup();
  s.players[0].figure.pos = {7, 5};
  s.phase = Phase::AwaitBehavior;
  s.rng = Rng(rng_seed);
  return s;
}

}  // namespace

TEST_SUITE("engine") {

TEST_CASE("session start places players and a sleeping dragon") {
  const auto t = begin_session(test::shared_default());
  const auto& cfg = *test::shared_default();
  for (int p = 0; p < kPlayers; ++p) CHECK(t.state.players[p].figure.pos == cfg.player_starts[p]);
  CHECK_FALSE(t.state.dragon.awake);
  CHECK(t.state.dragon.sleep_points == 6);
  CHECK(t.state.phase == Phase::AwaitCraft);
  CHECK(t.state.setup);
  CHECK(t.events.front().kind == EventKind::SessionStarted);
  const auto u = begin_session(test::shared_default());
  REQUIRE(t.events.size() == u.events.size());
  for (std::size_t i = 0; i < t.events.size(); ++i) CHECK(canonical(t.events[i]) == canonical(u.events[i]));
}

TEST_CASE("setup crafting runs through all players then starts round 1") {
  const auto s = after_setup();
  CHECK(s.phase == Phase::AwaitMove);
  CHECK(s.active == 0);
  CHECK_FALSE(s.setup);
  for (const auto& p : s.players) CHECK(p.figure.weapon.has_value());
  GameState fresh = begin_session(test::shared_default()).state;
  CHECK(code_of([&] { skip_craft(fresh, 0); }) == ErrorCode::PhaseMismatch);
  CHECK(code_of([&] { merchant_craft(fresh, 0, std::nullopt, false); }) == ErrorCode::NoRating);
  CHECK(code_of([&] { merchant_craft(fresh, 1, vision::CraftRating{}, false); }) == ErrorCode::NotYourTurn);
}

TEST_CASE("RIGHT, RIGHT, UP along a free corridor") {
  const auto s = ready({7, 7});
  const auto t = submit_move(s, 0, std::vector<TokenId>{R, R, U});
  REQUIRE(t.state.pending);
  CHECK(t.state.pending->path == std::vector<GridPos>{{8, 7}, {9, 7}, {9, 6}});
  CHECK(first(t.events, EventKind::MotionRequested).payload["path"].size() == 3);
  CHECK(t.state.players[0].figure.pos == GridPos{7, 7});
  const auto m = walk(s, 0, {R, R, U});
  CHECK(m.state.players[0].figure.pos == GridPos{9, 6});
  CHECK(m.state.active == 1);
}

TEST_CASE("invalid paths") {
  const auto s = ready({2, 6});
  CHECK(code_of([&] { submit_move(s, 0, std::vector<TokenId>{R}); }) == ErrorCode::InvalidPath);
  CHECK(code_of([&] { submit_move(s, 0, std::vector<TokenId>{U, U, U, U, U}); }) == ErrorCode::TooManyTokens);
  CHECK(code_of([&] { submit_move(s, 0, std::vector<TokenId>{TokenId::Aggressive}); }) == ErrorCode::InvalidPath);
  CHECK(code_of([&] { submit_move(s, 1, std::vector<TokenId>{U}); }) == ErrorCode::NotYourTurn);
  auto dragon_cell = ready({6, 4});
  CHECK(code_of([&] { submit_move(dragon_cell, 0, std::vector<TokenId>{U, U}); }) == ErrorCode::InvalidPath);
  const GameState axe = after_setup(WeaponKind::Axe);
  CHECK(code_of([&] { submit_move(axe, 0, std::vector<TokenId>{U, U, R}); }) == ErrorCode::TooManyTokens);
}

TEST_CASE("passing over an occupied cell is allowed, ending on one is not") {
  const auto s = ready({2, 7});
  CHECK(submit_move(s, 0, std::vector<TokenId>{R, R, R}).state.pending->path.back() == GridPos{5, 7});
  CHECK(code_of([&] { submit_move(s, 0, std::vector<TokenId>{R, R}); }) == ErrorCode::InvalidPath);
}

TEST_CASE("apply_move checks the validated path and occupancy") {
  const auto s = ready({7, 7});
  const auto t = submit_move(s, 0, std::vector<TokenId>{R});
  const std::vector<GridPos> other{{7, 6}};
  CHECK(code_of([&] { apply_move(t.state, 0, other); }) == ErrorCode::InvalidPath);
  GameState stale = t.state;
  ++stale.occupancy_version;
  CHECK(code_of([&] { apply_move(stale, 0, t.state.pending->path); }) == ErrorCode::StalePath);
  const auto c = cancel_move(t.state, 0, "GRIP_FAILED");
  CHECK_FALSE(c.state.pending);
  CHECK(c.state.phase == Phase::AwaitMove);
  CHECK(c.state.players[0].figure.pos == GridPos{7, 7});
}

TEST_CASE("a one-cell move near the dragon makes no noise") {
  const auto m = walk(ready({5, 4}), 0, {R});
  CHECK_FALSE(has(m.events, EventKind::Noise));
  CHECK(m.state.dragon.sleep_points == 6);
}

TEST_CASE("a three-cell move inside hearing range costs three sleep points") {
  const auto m = walk(ready({3, 1}), 0, {R, D, R});
  CHECK(first(m.events, EventKind::Noise).payload["noise"] == 3);
  CHECK(m.state.dragon.sleep_points == 3);
}

TEST_CASE("draining all sleep points wakes the dragon") {
  GameState s = ready({3, 1});
  s.dragon.sleep_points = 2;
  const auto m = walk(s, 0, {R, D, R});
  CHECK(has(m.events, EventKind::DragonWoke));
  CHECK(m.state.dragon.awake);
  CHECK(m.state.dragon.sleep_points == 0);
  // the player stopped beside an awake dragon
  CHECK(m.state.phase == Phase::AwaitDice);
}

TEST_CASE("ending beside the merchant opens crafting") {
  const auto m = walk(ready({2, 7}), 0, {U, U, R, R});
  CHECK(m.state.phase == Phase::AwaitCraft);
  CHECK(m.state.active == 0);
  const auto skip = skip_craft(m.state, 0);
  CHECK(skip.state.active == 1);
  CHECK(skip.state.phase == Phase::AwaitMove);
}

TEST_CASE("an empty token list passes the turn") {
  const auto t = submit_move(ready({7, 7}), 0, std::vector<TokenId>{});
  CHECK(t.state.active == 1);
  CHECK_FALSE(has(t.events, EventKind::MotionRequested));
}

TEST_CASE("combat: higher sum wins, ties do nothing") {
  GameState s = ready({3, 4});
  s.spiders.push_back({0, {3, 5}, 2});
  s.next_spider_id = 1;
  s.phase = Phase::AwaitDice;
  s.combat = CombatState{0, {EnemyKind::Spider, 0}, 1, 1, true};
  const auto win = resolve_combat_round(s, 0, std::vector<int>{6, 5});
  const auto& r = first(win.events, EventKind::CombatRound).payload;
  CHECK(r["player_total"] == 11);
  CHECK(r["winner"] == "PLAYER");
  CHECK(r["damage"] == 2);  // unarmed 1 + common bow 1
  CHECK(has(win.events, EventKind::EnemyDefeated));
  CHECK(win.state.spiders.empty());

  bool tie_seen = false;
  for (std::uint64_t seed = 1; seed < 50 && !tie_seen; ++seed) {
    GameState t = s;
    t.rng = Rng(seed);
    Rng probe = t.rng;
    const int roll = probe.uniform_int(1, 6);
    if (roll < 2) continue;
    const auto tie = resolve_combat_round(t, 0, std::vector<int>{roll / 2, roll - roll / 2});
    const auto& p = first(tie.events, EventKind::CombatRound).payload;
    CHECK(p["winner"] == "NONE");
    CHECK(p["damage"] == 0);
    CHECK(tie.state.players[0].figure.hp == s.players[0].figure.hp);
    CHECK(tie.state.spiders.front().hp == 2);
    tie_seen = true;
  }
  CHECK(tie_seen);
  CHECK(code_of([&] { resolve_combat_round(s, 0, std::vector<int>{6}); }) == ErrorCode::BadDieValue);
  CHECK(code_of([&] { resolve_combat_round(s, 0, std::vector<int>{7, 1}); }) == ErrorCode::BadDieValue);
}

TEST_CASE("jailer: a win grants a hint") {
  GameState s = at_jailer(3);
  Rng probe = s.rng;
  const auto j = static_cast<Behavior>(probe.uniform_int(0, 2));
  const auto t = jailer_interaction(s, 0, beats(j));
  CHECK(first(t.events, EventKind::JailerRound).payload["result"] == "WIN");
  CHECK(has(t.events, EventKind::HintGranted));
  CHECK(t.state.hints.size() == 1);
  CHECK(has(t.events, EventKind::JailerMoved));
}

TEST_CASE("jailer: a draw only moves the jailer") {
  GameState s = at_jailer(4);
  Rng probe = s.rng;
  const auto j = static_cast<Behavior>(probe.uniform_int(0, 2));
  const auto t = jailer_interaction(s, 0, j);
  CHECK(first(t.events, EventKind::JailerRound).payload["result"] == "DRAW");
  CHECK_FALSE(has(t.events, EventKind::HintGranted));
  CHECK_FALSE(has(t.events, EventKind::PlayerDamaged));
  CHECK_FALSE(has(t.events, EventKind::SleepDrained));
  CHECK(t.state.jailer != s.jailer);
  CHECK(t.state.players[0].figure.hp == s.players[0].figure.hp);
}

TEST_CASE("jailer: a loss on the damage branch costs 2 hp") {
  bool seen = false;
  for (std::uint64_t seed = 1; seed < 100 && !seen; ++seed) {
    GameState s = at_jailer(seed);
    Rng probe = s.rng;
    const auto j = static_cast<Behavior>(probe.uniform_int(0, 2));
    if (probe.uniform_int(0, 1) != 0) continue;
    const auto t = jailer_interaction(s, 0, loses_to(j));
    CHECK(first(t.events, EventKind::JailerRound).payload["result"] == "LOSS");
    CHECK(t.state.players[0].figure.hp == s.players[0].figure.hp - 2);
    seen = true;
  }
  CHECK(seen);
}

TEST_CASE("crafting stats and the late clamp") {
  GameState s = after_setup();
  s.players[0].figure.pos = {4, 5};
  s.phase = Phase::AwaitCraft;
  const auto axe = merchant_craft(s, 0, vision::CraftRating{WeaponKind::Axe, 0.05, Rarity::Legendary}, false);
  const auto& w = *axe.state.players[0].figure.weapon;
  CHECK(w.damage_bonus == 3);
  CHECK(w.combat_rounds == 2);
  CHECK(board::token_budget(3, w) == 2);
  const auto late = merchant_craft(s, 0, vision::CraftRating{WeaponKind::Sword, 0.05, Rarity::Legendary}, true);
  CHECK(late.state.players[0].figure.weapon->rarity == Rarity::Common);
  const auto bow = merchant_craft(s, 0, vision::CraftRating{WeaponKind::Bow, 0.9, Rarity::Common}, false);
  CHECK(board::token_budget(3, bow.state.players[0].figure.weapon) == 4);
}

TEST_CASE("npc phase: interval spawn at a hole, sleeping dragon stays") {
  GameState s = after_setup();
  s.round = 3;
  s.active = 2;
  s.phase = Phase::NpcPhase;
  const auto t = npc_phase(s);
  REQUIRE(t.state.spiders.size() == 1);
  CHECK(t.state.board.at(t.state.spiders[0].pos).kind == board::TileKind::Hole);
  CHECK_FALSE(has(t.events, EventKind::DragonMoved));
  CHECK(t.state.dragon.figure.pos == s.dragon.figure.pos);
  CHECK(t.state.round == 4);
}

TEST_CASE("npc phase: an adjacent spider holds and combat opens the turn") {
  GameState s = after_setup();
  s.active = 2;
  s.phase = Phase::NpcPhase;
  s.spiders.push_back({0, {2, 6}, 2});
  s.next_spider_id = 1;
  const auto t = npc_phase(s);
  CHECK_FALSE(has(t.events, EventKind::SpiderMoved));
  CHECK(t.state.spiders[0].pos == GridPos{2, 6});
  CHECK(t.state.phase == Phase::AwaitDice);
  REQUIRE(t.state.combat);
  CHECK(t.state.combat->enemy.kind == EnemyKind::Spider);
  CHECK_FALSE(t.state.combat->after_move);
}

TEST_CASE("npc phase: an awake dragon walks toward the nearest player") {
  GameState s = after_setup();
  s.active = 2;
  s.phase = Phase::NpcPhase;
  s.dragon.awake = true;
  s.dragon.sleep_points = 0;
  const auto t = npc_phase(s);
  const auto& m = first(t.events, EventKind::DragonMoved).payload;
  CHECK(m["path"].size() == 2);
  const GridPos to = t.state.dragon.figure.pos;
  CHECK(board::manhattan(to, s.dragon.figure.pos) == 2);
}

TEST_CASE("key attempts") {
  GameState s = after_setup();
  s.players[0].figure.pos = s.board.exit();
  CHECK(code_of([&] { attempt_key(s, 0, true); }) == ErrorCode::NotReady);
  s.hints = {0, 1, 2};
  s.phase = Phase::AwaitKey;
  const auto ok = attempt_key(s, 0, true);
  CHECK(has(ok.events, EventKind::GameEnded));
  CHECK(check_end(ok.state) == Outcome::Win);
  const auto bad = attempt_key(s, 0, false);
  CHECK(count(bad.events, EventKind::DragonWoke) == 1);
  CHECK(count(bad.events, EventKind::SpiderSpawned) == 2);
  CHECK(bad.state.dragon.awake);
  CHECK(bad.state.spiders.size() == 2);
  CHECK(check_end(bad.state) == Outcome::Ongoing);
  CHECK(bad.state.active == 1);
}

TEST_CASE("reaching the exit with three hints asks for the key") {
  GameState s = ready({8, 1});
  s.hints = {0, 1, 2};
  const auto m = walk(s, 0, {R, R});
  CHECK(m.state.phase == Phase::AwaitKey);
}

TEST_CASE("outcome: fresh ongoing, last player down is a loss") {
  CHECK(check_end(begin_session(test::shared_default()).state) == Outcome::Ongoing);
  GameState s = after_setup();
  for (int p : {1, 2}) {
    s.players[p].downed = true;
    s.players[p].figure.hp = 0;
  }
  s.players[0].figure.pos = {6, 3};
  s.players[0].figure.hp = 1;
  s.dragon.awake = true;
  s.phase = Phase::AwaitDice;
  s.combat = CombatState{0, {EnemyKind::Dragon, -1}, 1, 1, true};
  const auto t = resolve_combat_round(s, 0, std::vector<int>{1, 1});
  CHECK(check_end(t.state) == Outcome::Loss);
  CHECK(t.state.phase == Phase::Ended);
  CHECK(first(t.events, EventKind::GameEnded).payload["outcome"] == "LOSS");
  CHECK(has(t.events, EventKind::DamageCutOrdered));
}

TEST_CASE("operations leave their input untouched on error") {
  const auto s = ready({2, 6});
  const auto before = state_hash(s);
  CHECK_THROWS(submit_move(s, 0, std::vector<TokenId>{R}));
  CHECK(state_hash(s) == before);
}

TEST_CASE("event json round trip and canonical form") {
  const auto t = begin_session(test::shared_default());
  for (const auto& e : t.events) {
    CHECK(event_from_json(to_json(e)) == e);
    CHECK(canonical(e).find('\n') == std::string::npos);
  }
}

}  // TEST_SUITE
