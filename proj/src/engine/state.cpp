// SPDX-License-Identifier: Apache-2.0
#include "dm/engine/state.hpp"

#include <algorithm>
#include <array>

#include "dm/common/error.hpp"
#include "dm/common/hash.hpp"

namespace dm::engine {

namespace {

constexpr std::array<std::string_view, 7> kPhaseNames = {"AWAIT_MOVE", "AWAIT_DICE", "AWAIT_BEHAVIOR", "AWAIT_CRAFT",
                                                         "AWAIT_KEY",  "NPC_PHASE",  "ENDED"};
constexpr std::array<std::string_view, 3> kOutcomeNames = {"ONGOING", "WIN", "LOSS"};
constexpr std::array<std::string_view, 2> kEnemyNames = {"DRAGON", "SPIDER"};
constexpr std::array<std::string_view, 3> kBehaviorNames = {"AGGRESSIVE", "DEFENSIVE", "DECEITFUL"};

template <std::size_t N>
std::optional<std::size_t> index_of(const std::array<std::string_view, N>& names, std::string_view s) {
  for (std::size_t i = 0; i < N; ++i) {
    if (names[i] == s) return i;
  }
  return std::nullopt;
}

}  // namespace

std::string_view to_string(Phase p) { return kPhaseNames[static_cast<std::size_t>(p)]; }
std::string_view to_string(Outcome o) { return kOutcomeNames[static_cast<std::size_t>(o)]; }
std::string_view to_string(EnemyKind k) { return kEnemyNames[static_cast<std::size_t>(k)]; }
std::string_view to_string(Behavior b) { return kBehaviorNames[static_cast<std::size_t>(b)]; }

std::optional<Phase> phase_from_string(std::string_view s) {
  const auto i = index_of(kPhaseNames, s);
  return i ? std::optional<Phase>(static_cast<Phase>(*i)) : std::nullopt;
}

std::optional<Behavior> behavior_from_string(std::string_view s) {
  const auto i = index_of(kBehaviorNames, s);
  return i ? std::optional<Behavior>(static_cast<Behavior>(*i)) : std::nullopt;
}

int rps(Behavior a, Behavior b) {
  if (a == b) return 0;
  auto beats = [](Behavior x, Behavior y) {
    return (x == Behavior::Aggressive && y == Behavior::Deceitful) ||
           (x == Behavior::Deceitful && y == Behavior::Defensive) ||
           (x == Behavior::Defensive && y == Behavior::Aggressive);
  };
  return beats(a, b) ? 1 : -1;
}

const Spider* GameState::spider(int id) const {
  const auto it = std::find_if(spiders.begin(), spiders.end(), [id](const Spider& sp) { return sp.id == id; });
  return it == spiders.end() ? nullptr : &*it;
}

Spider* GameState::spider(int id) { return const_cast<Spider*>(std::as_const(*this).spider(id)); }

std::vector<GridPos> GameState::figure_cells() const {
  std::vector<GridPos> cells;
  for (const auto& p : players) cells.push_back(p.figure.pos);
  cells.push_back(dragon.figure.pos);
  return cells;
}

bool GameState::occupied(GridPos p, int ignore_player) const {
  for (int i = 0; i < kPlayers; ++i) {
    if (i != ignore_player && players[static_cast<std::size_t>(i)].figure.pos == p) return true;
  }
  if (dragon.figure.pos == p || jailer == p || merchant == p) return true;
  return std::any_of(spiders.begin(), spiders.end(), [p](const Spider& sp) { return sp.pos == p; });
}

int GameState::alive_players() const {
  return static_cast<int>(std::count_if(players.begin(), players.end(), [](const PlayerState& p) { return !p.downed; }));
}

GameState initial_state(std::shared_ptr<const board::GameConfig> cfg) {
  if (!cfg) throw Error(ErrorCode::InvalidConfig, "missing config");
  cfg->validate();
  GameState s;
  s.config = cfg;
  s.board = cfg->board;
  for (int i = 0; i < kPlayers; ++i) {
    board::Figure& f = s.players[static_cast<std::size_t>(i)].figure;
    f.id = "P" + std::to_string(i);
    f.owner = static_cast<board::Owner>(i);
    f.pos = cfg->player_starts[static_cast<std::size_t>(i)];
    f.marker_id = kPlayerMarkerBase + i;
    f.hp = f.max_hp = cfg->player_max_hp;
  }
  board::Figure& d = s.dragon.figure;
  d.id = "DRAGON";
  d.owner = board::Owner::Dragon;
  d.pos = cfg->dragon_start;
  d.marker_id = kDragonMarker;
  d.hp = d.max_hp = cfg->dragon.hp;
  s.dragon.sleep_points = cfg->dragon_sleep_points;
  s.jailer = cfg->jailer_start;
  s.merchant = cfg->merchant_pos;
  s.rng = Rng(cfg->seed);
  return s;
}

Json to_json(const GameState& s) {
  Json tiles = Json::array();
  for (const GridPos& p : s.board.cells_of(board::TileKind::Chest)) {
    tiles.push_back(Json{{"pos", board::to_json(p)}, {"opened", s.board.at(p).chest_opened}});
  }
  Json players = Json::array();
  for (const auto& p : s.players) players.push_back(Json{{"figure", board::to_json(p.figure)}, {"downed", p.downed}});
  Json spiders = Json::array();
  for (const auto& sp : s.spiders) spiders.push_back(Json{{"id", sp.id}, {"pos", board::to_json(sp.pos)}, {"hp", sp.hp}});
  Json pending = nullptr;
  if (s.pending) {
    Json path = Json::array();
    for (const auto& p : s.pending->path) path.push_back(board::to_json(p));
    pending = Json{{"player", s.pending->player}, {"path", path}, {"occupancy_version", s.pending->occupancy_version}};
  }
  Json combat = nullptr;
  if (s.combat) {
    combat = Json{{"player", s.combat->player},
                  {"enemy", Json{{"kind", to_string(s.combat->enemy.kind)}, {"spider_id", s.combat->enemy.spider_id}}},
                  {"rounds_total", s.combat->rounds_total},
                  {"rounds_left", s.combat->rounds_left},
                  {"after_move", s.combat->after_move}};
  }
  return Json{{"map", s.board.to_ascii()},
              {"chests", tiles},
              {"players", players},
              {"dragon", Json{{"figure", board::to_json(s.dragon.figure)}, {"sleep_points", s.dragon.sleep_points}, {"awake", s.dragon.awake}}},
              {"spiders", spiders},
              {"next_spider_id", s.next_spider_id},
              {"jailer", board::to_json(s.jailer)},
              {"merchant", board::to_json(s.merchant)},
              {"hints", s.hints},
              {"chest_hints_found", s.chest_hints_found},
              {"round", s.round},
              {"active", s.active},
              {"phase", to_string(s.phase)},
              {"setup", s.setup},
              {"outcome", to_string(s.outcome)},
              {"key_attempts", s.key_attempts},
              {"rng", Json{{"seed", s.rng.seed()}, {"draws", s.rng.draws()}}},
              {"next_seq", s.next_seq},
              {"occupancy_version", s.occupancy_version},
              {"pending", pending},
              {"combat", combat}};
}

std::string state_hash(const GameState& s) { return sha256_hex(to_json(s).dump()); }

}  // namespace dm::engine
