// SPDX-License-Identifier: Apache-2.0
#include "dm/board/config.hpp"

#include <set>

#include "dm/common/error.hpp"

namespace dm::board {

namespace {

void check(bool ok, const std::string& what) {
  if (!ok) throw Error(ErrorCode::InvalidConfig, what);
}

Json stats_json(const EntityStats& s) {
  return Json{{"hp", s.hp}, {"dice_count", s.dice_count}, {"dice_bonus", s.dice_bonus}, {"damage", s.damage}};
}

EntityStats stats_from_json(const Json& j, const std::string& where) {
  return {require<int>(j, "hp", where), require<int>(j, "dice_count", where), require<int>(j, "dice_bonus", where),
          require<int>(j, "damage", where)};
}

const std::vector<std::string>& default_map() {
  static const std::vector<std::string> map = {
      "############",
      "#C...#....E#",
      "#.O......O.#",
      "#...##..C..#",
      "#.C....#...#",
      "#.....O#...#",
      "#..#.......#",
      "#.........C#",
      "############",
  };
  return map;
}

const Json& member(const Json& j, const char* key, const std::string& where) {
  if (!j.contains(key)) throw Error(ErrorCode::SchemaError, where + "/" + key + ": missing");
  return j.at(key);
}

}  // namespace

Weapon GameConfig::make_weapon(WeaponKind k, Rarity r) const {
  const WeaponKindEffect& e = kind_effects[static_cast<std::size_t>(k)];
  Weapon w;
  w.kind = k;
  w.rarity = r;
  w.damage_bonus = rarity_damage_bonus[static_cast<std::size_t>(r)] + e.damage;
  w.move_token_delta = e.move_token_delta;
  w.combat_rounds = e.combat_rounds;
  return w;
}

void GameConfig::validate() const {
  check(board.cols() > 0 && board.rows() > 0, "board is empty");
  check(cell_size_mm > 0, "cell_size_mm must be positive");
  check(player_starts.size() == 3, "exactly 3 players are required, got " + std::to_string(player_starts.size()));
  check(origin_mm.x >= 0 && origin_mm.y >= 0, "origin must lie inside the envelope");
  check(origin_mm.x + board.cols() * cell_size_mm <= kEnvelopeX,
        "board x-extent exceeds the " + std::to_string(static_cast<int>(kEnvelopeX)) + " mm envelope");
  for (int r = 0; r < board.rows(); ++r) {
    for (int c = 0; c < board.cols(); ++c) {
      if (board.at({c, r}).kind == TileKind::Wall) continue;
      const double y1 = origin_mm.y + (r + 1) * cell_size_mm;
      check(y1 <= kEnvelopeY, "non-wall cell " + to_string(GridPos{c, r}) + " extends beyond the y envelope");
    }
  }
  std::set<GridPos> used;
  auto place = [&](GridPos p, const std::string& what, bool floor_only) {
    check(board.in_bounds(p), what + " is off the board");
    check(floor_only ? board.at(p).kind == TileKind::Floor : board.walkable(p), what + " must stand on open floor");
    check(used.insert(p).second, what + " shares a cell");
  };
  for (std::size_t i = 0; i < player_starts.size(); ++i) place(player_starts[i], "player " + std::to_string(i), false);
  place(dragon_start, "dragon", false);
  place(merchant_pos, "merchant", true);
  place(jailer_start, "jailer", true);
  check(!board.cells_of(TileKind::Hole).empty(), "board needs at least one hole for spider spawns");

  check(player_max_hp > 0 && unarmed_damage >= 0, "player stats");
  check(dragon.hp > 0 && dragon.dice_count > 0 && dragon.damage >= 0, "dragon stats");
  check(spider.hp > 0 && spider.dice_count > 0 && spider.damage >= 0, "spider stats");
  check(dragon_sleep_points > 0, "sleep_points must be positive");
  check(hearing_range_tiles >= 0 && dragon_moves >= 0, "dragon movement/hearing");
  check(spider_spawn_interval > 0 && max_spiders >= 0 && key_failure_spiders >= 0, "spider rules");
  check(max_tokens >= 1 && max_tokens <= kMaxTokens, "max_tokens must be in [1, 4]");
  check(base_tokens >= 1 && base_tokens <= max_tokens, "base_tokens must be in [1, max_tokens]");
  check(combat_dice == kCombatDice, "players roll exactly 2 combat dice");
  for (const auto& e : kind_effects) check(e.combat_rounds >= 1, "combat_rounds must be >= 1");
  check(rarity_legendary >= 0 && rarity_legendary < rarity_rare, "rarity thresholds must satisfy 0 <= legendary < rare");
  check(key_threshold > 0, "key_threshold must be positive");
  check(craft_time_limit_s > 0 && mm_per_pixel > 0, "craft limit / mm_per_pixel");

  const MachineConfig& m = machine;
  check(m.z_max > 0 && m.travel_z <= m.z_max && m.grip_z > 0 && m.grip_z < m.travel_z && m.focus_z > 0 &&
            m.focus_z < m.travel_z,
        "machine heights");
  check(m.travel_feed > 0 && m.plunge_feed > 0 && m.cut_feed > 0 && m.travel_feed <= m.max_feed &&
            m.plunge_feed <= m.max_feed && m.cut_feed <= m.max_feed,
        "machine feeds");
  check(m.laser_power > 0 && m.laser_power <= m.max_laser_power, "laser power");
  check(m.capture_radius_mm > 0 && m.max_correction_mm >= 0, "gripper tolerances");
  check(sim.sigma_place_mm >= 0 && sim.sigma_meas_mm >= 0 && sim.fov_mm > 0 && sim.speed > 0, "sim options");
}

Json to_json(const GameConfig& c) {
  Json starts = Json::array();
  for (const auto& p : c.player_starts) starts.push_back(to_json(p));
  Json kinds = Json::object();
  for (WeaponKind k : kWeaponKinds) {
    const auto& e = c.kind_effects[static_cast<std::size_t>(k)];
    kinds[std::string(to_string(k))] = Json{{"damage", e.damage}, {"move_token_delta", e.move_token_delta}, {"combat_rounds", e.combat_rounds}};
  }
  const MachineConfig& m = c.machine;
  return Json{
      {"schema", kConfigSchema},
      {"seed", c.seed},
      {"board", {{"cell_size_mm", c.cell_size_mm}, {"origin_mm", to_json(c.origin_mm)}, {"map", c.board.to_ascii()}}},
      {"entities",
       {{"players", starts}, {"dragon", to_json(c.dragon_start)}, {"merchant", to_json(c.merchant_pos)}, {"jailer", to_json(c.jailer_start)}}},
      {"stats",
       {{"player", {{"max_hp", c.player_max_hp}, {"unarmed_damage", c.unarmed_damage}}},
        {"dragon", stats_json(c.dragon)},
        {"spider", stats_json(c.spider)}}},
      {"rules",
       {{"base_tokens", c.base_tokens},
        {"max_tokens", c.max_tokens},
        {"combat_dice", c.combat_dice},
        {"hearing_range_tiles", c.hearing_range_tiles},
        {"sleep_points", c.dragon_sleep_points},
        {"dragon_moves", c.dragon_moves},
        {"spider_spawn_interval", c.spider_spawn_interval},
        {"max_spiders", c.max_spiders},
        {"key_failure_spiders", c.key_failure_spiders},
        {"chest_hints", c.chest_hints},
        {"heal_amount", c.heal_amount},
        {"jailer_damage", c.jailer_damage},
        {"jailer_sleep_drain", c.jailer_sleep_drain},
        {"craft_time_limit_s", c.craft_time_limit_s}}},
      {"weapons",
       {{"rarity_tiers", Json::array({"COMMON", "RARE", "LEGENDARY"})},
        {"damage_bonus", {{"COMMON", c.rarity_damage_bonus[0]}, {"RARE", c.rarity_damage_bonus[1]}, {"LEGENDARY", c.rarity_damage_bonus[2]}}},
        {"kinds", kinds}}},
      {"vision",
       {{"rarity_thresholds", Json::array({c.rarity_legendary, c.rarity_rare})},
        {"key_threshold", c.key_threshold},
        {"mm_per_pixel", c.mm_per_pixel}}},
      {"machine",
       {{"z_max", m.z_max},
        {"travel_z", m.travel_z},
        {"grip_z", m.grip_z},
        {"focus_z", m.focus_z},
        {"travel_feed", m.travel_feed},
        {"plunge_feed", m.plunge_feed},
        {"cut_feed", m.cut_feed},
        {"max_feed", m.max_feed},
        {"laser_power", m.laser_power},
        {"max_laser_power", m.max_laser_power},
        {"capture_radius_mm", m.capture_radius_mm},
        {"max_correction_mm", m.max_correction_mm},
        {"correction_enabled", m.correction_enabled},
        {"dwell_ms", m.dwell_ms},
        {"cut_overrun_mm", m.cut_overrun_mm}}},
      {"sim",
       {{"seed", c.sim.seed},
        {"sigma_place_mm", c.sim.sigma_place_mm},
        {"sigma_meas_mm", c.sim.sigma_meas_mm},
        {"fov_mm", c.sim.fov_mm},
        {"speed", c.sim.speed}}},
  };
}

GameConfig config_from_json(const Json& j) {
  if (!j.is_object()) throw Error(ErrorCode::InvalidConfig, "config must be a JSON object");
  const auto schema = optional_or<std::string>(j, "schema", std::string(kConfigSchema), "");
  if (schema != kConfigSchema) throw Error(ErrorCode::InvalidConfig, "unsupported config schema '" + schema + "'");
  GameConfig c = default_config();
  c.seed = optional_or<std::uint64_t>(j, "seed", c.seed, "");
  try {
    if (j.contains("board")) {
      const Json& b = j.at("board");
      c.cell_size_mm = optional_or<double>(b, "cell_size_mm", c.cell_size_mm, "/board");
      if (b.contains("origin_mm")) c.origin_mm = vec2_from_json(b.at("origin_mm"), "/board/origin_mm");
      if (b.contains("map")) {
        const auto rows = require<std::vector<std::string>>(b, "map", "/board");
        c.board = Board::from_ascii(rows);
      }
    }
    if (j.contains("entities")) {
      const Json& e = j.at("entities");
      if (e.contains("players")) {
        c.player_starts.clear();
        for (const auto& p : member(e, "players", "/entities")) c.player_starts.push_back(grid_pos_from_json(p, "/entities/players"));
      }
      if (e.contains("dragon")) c.dragon_start = grid_pos_from_json(e.at("dragon"), "/entities/dragon");
      if (e.contains("merchant")) c.merchant_pos = grid_pos_from_json(e.at("merchant"), "/entities/merchant");
      if (e.contains("jailer")) c.jailer_start = grid_pos_from_json(e.at("jailer"), "/entities/jailer");
    }
    if (j.contains("stats")) {
      const Json& s = j.at("stats");
      if (s.contains("player")) {
        c.player_max_hp = optional_or<int>(s.at("player"), "max_hp", c.player_max_hp, "/stats/player");
        c.unarmed_damage = optional_or<int>(s.at("player"), "unarmed_damage", c.unarmed_damage, "/stats/player");
      }
      if (s.contains("dragon")) c.dragon = stats_from_json(s.at("dragon"), "/stats/dragon");
      if (s.contains("spider")) c.spider = stats_from_json(s.at("spider"), "/stats/spider");
    }
    if (j.contains("rules")) {
      const Json& r = j.at("rules");
      const std::string w = "/rules";
      c.base_tokens = optional_or<int>(r, "base_tokens", c.base_tokens, w);
      c.max_tokens = optional_or<int>(r, "max_tokens", c.max_tokens, w);
      c.combat_dice = optional_or<int>(r, "combat_dice", c.combat_dice, w);
      c.hearing_range_tiles = optional_or<int>(r, "hearing_range_tiles", c.hearing_range_tiles, w);
      c.dragon_sleep_points = optional_or<int>(r, "sleep_points", c.dragon_sleep_points, w);
      c.dragon_moves = optional_or<int>(r, "dragon_moves", c.dragon_moves, w);
      c.spider_spawn_interval = optional_or<int>(r, "spider_spawn_interval", c.spider_spawn_interval, w);
      c.max_spiders = optional_or<int>(r, "max_spiders", c.max_spiders, w);
      c.key_failure_spiders = optional_or<int>(r, "key_failure_spiders", c.key_failure_spiders, w);
      c.chest_hints = optional_or<int>(r, "chest_hints", c.chest_hints, w);
      c.heal_amount = optional_or<int>(r, "heal_amount", c.heal_amount, w);
      c.jailer_damage = optional_or<int>(r, "jailer_damage", c.jailer_damage, w);
      c.jailer_sleep_drain = optional_or<int>(r, "jailer_sleep_drain", c.jailer_sleep_drain, w);
      c.craft_time_limit_s = optional_or<double>(r, "craft_time_limit_s", c.craft_time_limit_s, w);
    }
    if (j.contains("weapons")) {
      const Json& wj = j.at("weapons");
      if (wj.contains("rarity_tiers")) {
        const auto tiers = require<std::vector<std::string>>(wj, "rarity_tiers", "/weapons");
        if (tiers != std::vector<std::string>{"COMMON", "RARE", "LEGENDARY"}) {
          throw Error(ErrorCode::InvalidConfig, "rarity tiers are fixed to COMMON, RARE, LEGENDARY");
        }
      }
      if (wj.contains("damage_bonus")) {
        const Json& d = wj.at("damage_bonus");
        c.rarity_damage_bonus = {require<int>(d, "COMMON", "/weapons/damage_bonus"), require<int>(d, "RARE", "/weapons/damage_bonus"),
                                 require<int>(d, "LEGENDARY", "/weapons/damage_bonus")};
      }
      if (wj.contains("kinds")) {
        for (WeaponKind k : kWeaponKinds) {
          const std::string name(to_string(k));
          const std::string w = "/weapons/kinds/" + name;
          const Json& e = member(wj.at("kinds"), name.c_str(), "/weapons/kinds");
          c.kind_effects[static_cast<std::size_t>(k)] = {require<int>(e, "damage", w), require<int>(e, "move_token_delta", w),
                                                         require<int>(e, "combat_rounds", w)};
        }
      }
    }
    if (j.contains("vision")) {
      const Json& v = j.at("vision");
      if (v.contains("rarity_thresholds")) {
        const auto t = require<std::vector<double>>(v, "rarity_thresholds", "/vision");
        if (t.size() != 2) throw Error(ErrorCode::SchemaError, "/vision/rarity_thresholds: expected [legendary, rare]");
        c.rarity_legendary = t[0];
        c.rarity_rare = t[1];
      }
      c.key_threshold = optional_or<double>(v, "key_threshold", c.key_threshold, "/vision");
      c.mm_per_pixel = optional_or<double>(v, "mm_per_pixel", c.mm_per_pixel, "/vision");
    }
    if (j.contains("machine")) {
      const Json& m = j.at("machine");
      MachineConfig& mc = c.machine;
      const std::string w = "/machine";
      mc.z_max = optional_or<double>(m, "z_max", mc.z_max, w);
      mc.travel_z = optional_or<double>(m, "travel_z", mc.travel_z, w);
      mc.grip_z = optional_or<double>(m, "grip_z", mc.grip_z, w);
      mc.focus_z = optional_or<double>(m, "focus_z", mc.focus_z, w);
      mc.travel_feed = optional_or<double>(m, "travel_feed", mc.travel_feed, w);
      mc.plunge_feed = optional_or<double>(m, "plunge_feed", mc.plunge_feed, w);
      mc.cut_feed = optional_or<double>(m, "cut_feed", mc.cut_feed, w);
      mc.max_feed = optional_or<double>(m, "max_feed", mc.max_feed, w);
      mc.laser_power = optional_or<int>(m, "laser_power", mc.laser_power, w);
      mc.max_laser_power = optional_or<int>(m, "max_laser_power", mc.max_laser_power, w);
      mc.capture_radius_mm = optional_or<double>(m, "capture_radius_mm", mc.capture_radius_mm, w);
      mc.max_correction_mm = optional_or<double>(m, "max_correction_mm", mc.max_correction_mm, w);
      mc.correction_enabled = optional_or<bool>(m, "correction_enabled", mc.correction_enabled, w);
      mc.dwell_ms = optional_or<double>(m, "dwell_ms", mc.dwell_ms, w);
      mc.cut_overrun_mm = optional_or<double>(m, "cut_overrun_mm", mc.cut_overrun_mm, w);
    }
    if (j.contains("sim")) {
      const Json& s = j.at("sim");
      const std::string w = "/sim";
      c.sim.seed = optional_or<std::uint64_t>(s, "seed", c.sim.seed, w);
      c.sim.sigma_place_mm = optional_or<double>(s, "sigma_place_mm", c.sim.sigma_place_mm, w);
      c.sim.sigma_meas_mm = optional_or<double>(s, "sigma_meas_mm", c.sim.sigma_meas_mm, w);
      c.sim.fov_mm = optional_or<double>(s, "fov_mm", c.sim.fov_mm, w);
      c.sim.speed = optional_or<double>(s, "speed", c.sim.speed, w);
    }
  } catch (const Error& e) {
    if (e.code() == ErrorCode::InvalidConfig) throw;
    throw Error(ErrorCode::InvalidConfig, e.what());
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::InvalidConfig, e.what());
  }
  c.validate();
  return c;
}

GameConfig load_config(const std::string& path) {
  try {
    return config_from_json(read_json_file(path));
  } catch (const Error& e) {
    if (e.code() == ErrorCode::IoError || e.code() == ErrorCode::InvalidConfig) throw;
    throw Error(ErrorCode::InvalidConfig, e.what());
  }
}

GameConfig default_config() {
  GameConfig c;
  c.board = Board::from_ascii(default_map());
  c.player_starts = {{2, 7}, {4, 7}, {6, 7}};
  c.dragon_start = {6, 2};
  c.merchant_pos = {4, 6};
  c.jailer_start = {8, 5};
  return c;
}

std::string default_config_path() { return std::string(DM_ASSET_DIR) + "/default_config.json"; }

}  // namespace dm::board
