// SPDX-License-Identifier: Apache-2.0
// Acceptance gate: one PASS/FAIL line per criterion, exit status 1 if any fails.
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "dm/cli/play.hpp"
#include "dm/motion/gcode.hpp"
#include "dm/motion/job.hpp"
#include "dm/sim/trials.hpp"
#include "dm/vision/calibrate.hpp"
#include "dm/vision/dice.hpp"
#include "dm/vision/markers.hpp"
#include "dm/vision/moments.hpp"
#include "dm/vision/render.hpp"
#include "fixtures.hpp"

using namespace dm;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string num(double v, int prec = 3) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", prec, v);
  return buf;
}

Outcome hu_invariance() {
  const auto t0 = Clock::now();
  Rng rng(1);
  int exact_fail = 0, raster_fail = 0;
  double exact_worst = 0, raster_worst = 0;
  const int n = 500;
  for (int i = 0; i < n; ++i) {
    const auto p = test::random_simple_polygon(rng, 50.0);
    const auto q = test::apply(p, test::random_similarity(rng));
    const double e = vision::match_shapes(p, q);
    const double r = vision::match_shapes(p, test::raster_round_trip(q, 1024));
    exact_worst = std::max(exact_worst, e);
    raster_worst = std::max(raster_worst, r);
    exact_fail += !(e < 1e-6);
    raster_fail += !(r < 1e-2);
  }
  const double secs = seconds_since(t0);
  return {exact_fail == 0 && raster_fail == 0 && secs < 30.0,
          std::to_string(n) + " polygons, exact worst " + num(exact_worst) + " (" + std::to_string(exact_fail) +
              " >= 1e-6), raster 1024^2 worst " + num(raster_worst) + " (" + std::to_string(raster_fail) +
              " >= 1e-2), " + num(secs) + " s"};
}

Outcome weapon_classification() {
  vision::CorpusOptions opts;
  opts.total = 300;
  opts.max_noise = 0.05;
  const auto cal = vision::calibrate_rarity(vision::default_baselines(), opts, 1);
  const double acc = static_cast<double>(cal.correct_kind) / cal.samples;
  bool terciles = true;
  for (const int c : cal.tier_counts) terciles = terciles && std::abs(c - cal.samples / 3) <= 2;
  return {cal.samples == 300 && acc >= 0.95 && terciles,
          std::to_string(cal.correct_kind) + "/" + std::to_string(cal.samples) + " correct kind, tiers " +
              std::to_string(cal.tier_counts[0]) + "/" + std::to_string(cal.tier_counts[1]) + "/" +
              std::to_string(cal.tier_counts[2]) + " (thresholds " + num(cal.thresholds.legendary) + ", " +
              num(cal.thresholds.rare) + ")"};
}

Outcome dice_oracle() {
  int cases = 0, ok = 0;
  for (int n = 1; n <= 3; ++n) {
    std::vector<int> bottoms(static_cast<std::size_t>(n), 1);
    // every bottom-face combination of n dice
    for (;;) {
      std::vector<int> want;
      for (const int b : bottoms) want.push_back(7 - b);
      ++cases;
      ok += vision::detect_dice(vision::render_dice(bottoms)) == want;
      std::size_t k = 0;
      while (k < bottoms.size() && bottoms[k] == 6) bottoms[k++] = 1;
      if (k == bottoms.size()) break;
      ++bottoms[k];
    }
  }
  return {ok == cases, std::to_string(ok) + "/" + std::to_string(cases) + " renders read as 7 - bottom"};
}

Outcome marker_round_trip() {
  const auto& dict = vision::dm16_dictionary();
  int cases = 0, ok = 0, two = 0, rejected = 0;
  for (std::size_t id = 0; id < dict.size(); ++id) {
    for (int rot = 0; rot < 4; ++rot) {
      std::vector<std::uint16_t> masks{0};
      for (int b = 0; b < 16; ++b) masks.push_back(static_cast<std::uint16_t>(1u << b));
      for (const auto m : masks) {
        vision::Raster r(60, 60);
        vision::draw_marker(r, dict[id], 12, 12, 4, rot, m);
        const auto d = vision::decode_markers(r);
        ++cases;
        ok += d.size() == 1 && static_cast<std::size_t>(d[0].id) == id && d[0].rotation == rot;
      }
      for (int b1 = 0; b1 < 16; ++b1) {
        for (int b2 = b1 + 1; b2 < 16; ++b2) {
          vision::Raster r(60, 60);
          vision::draw_marker(r, dict[id], 12, 12, 4, rot, static_cast<std::uint16_t>((1u << b1) | (1u << b2)));
          ++two;
          rejected += vision::decode_markers(r).empty();
        }
      }
    }
  }
  return {ok == cases && rejected == two, std::to_string(ok) + "/" + std::to_string(cases) +
                                              " decoded (0-1 flips), " + std::to_string(rejected) + "/" +
                                              std::to_string(two) + " 2-flip cases rejected"};
}

Outcome motion_correction() {
  auto cfg = board::default_config();
  cfg.sim.sigma_place_mm = 1.5;
  cfg.machine.capture_radius_mm = 4.0;
  const auto on = sim::run_pick_place_trials(cfg, 100, 1);
  auto off_cfg = cfg;
  off_cfg.machine.correction_enabled = false;
  const auto off = sim::run_pick_place_trials(off_cfg, 100, 1);
  return {on.completed == on.jobs && off.completed < on.completed,
          "correction on " + std::to_string(on.completed) + "/" + std::to_string(on.jobs) + " (" +
              std::to_string(on.retried) + " after one retry, worst rest " + num(on.max_rest_error_mm) +
              " mm), off " + std::to_string(off.completed) + "/" + std::to_string(off.jobs)};
}

Outcome compiler_safety() {
  const auto base = board::default_config();
  Rng rng(2024);
  int programs = 0, valid = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    auto cfg = base;
    const int cols = rng.uniform_int(3, 12), rows = rng.uniform_int(3, 8);
    board::Board b(cols, rows);
    std::vector<board::GridPos> open;
    for (int r = 0; r < rows; ++r) {
      for (int c = 0; c < cols; ++c) {
        if (r == 0 || c == 0 || r == rows - 1 || c == cols - 1 || rng.uniform01() < 0.25) {
          b.at({c, r}).kind = board::TileKind::Wall;
        } else {
          open.push_back({c, r});
        }
      }
    }
    if (open.empty()) open.push_back({1, 1});
    cfg.board = b;
    board::Figure f;
    f.id = "P0";
    f.marker_id = 8;
    f.pos = open[static_cast<std::size_t>(rng.uniform_int(0, static_cast<int>(open.size()) - 1))];
    std::vector<board::GridPos> path;
    board::GridPos at = f.pos;
    for (int i = 0, len = rng.uniform_int(1, 6); i < len; ++i) {
      const auto next = board::neighbors(at)[static_cast<std::size_t>(rng.uniform_int(0, 3))];
      if (!b.in_bounds(next) || !b.walkable(next)) continue;
      path.push_back(next);
      at = next;
    }
    if (path.empty()) path.push_back(f.pos);
    programs += 2;
    valid += motion::validate_program(motion::to_program(motion::compile_move_job(f, path, cfg)), cfg.machine).empty();
    const auto flag = static_cast<board::DamageFlag>(rng.uniform_int(0, 2));
    valid += motion::validate_program(motion::to_program(motion::compile_cut_job(f, flag, cfg)), cfg.machine).empty();
  }
  const auto bad = [](motion::ProgramKind k, std::vector<std::string> body) {
    motion::GCodeProgram p;
    p.kind = k;
    p.lines = {"G90", "G21"};
    p.lines.insert(p.lines.end(), body.begin(), body.end());
    return p;
  };
  const std::vector<std::pair<std::string, motion::GCodeProgram>> invalid{
      {"ENVELOPE", bad(motion::ProgramKind::PickPlace, {"G0 X450 Y10 F6000"})},
      {"ENVELOPE", bad(motion::ProgramKind::PickPlace, {"G0 Z90 F6000"})},
      {"LASER_OUTSIDE_CUT", bad(motion::ProgramKind::PickPlace, {"; STAGE CUT", "M3 S800", "M5"})},
      {"LASER_OUTSIDE_CUT", bad(motion::ProgramKind::Cut, {"; STAGE TRAVERSE", "M3 S800", "M5"})},
      {"MAGNET_MISUSE", bad(motion::ProgramKind::PickPlace, {"; STAGE TRAVERSE", "M810 S1", "M810 S0"})},
      {"MAGNET_MISUSE", bad(motion::ProgramKind::Cut, {"; STAGE GRIP", "M810 S1", "; STAGE RELEASE", "M810 S0"})},
  };
  int rejected = 0;
  for (const auto& [code, prog] : invalid) {
    const auto v = motion::validate_program(prog, base.machine);
    rejected += std::any_of(v.begin(), v.end(), [&](const motion::Violation& x) { return x.code == code; });
  }
  return {valid == programs && programs == 2000 && rejected == static_cast<int>(invalid.size()),
          std::to_string(valid) + "/" + std::to_string(programs) + " fuzzed programs valid, " +
              std::to_string(rejected) + "/" + std::to_string(invalid.size()) + " invalid programs rejected"};
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string script_path(const std::string& name) { return std::string(DM_ASSET_DIR) + "/scripts/" + name; }

Outcome determinism() {
  const auto dir = std::filesystem::temp_directory_path() / "dm_acceptance";
  std::filesystem::create_directories(dir);
  const auto script = cli::load_script(script_path("win_path.json"));
  cli::PlayOptions a, b;
  a.pacing = b.pacing = false;
  a.log_path = (dir / "a.jsonl").string();
  b.log_path = (dir / "b.jsonl").string();
  const auto ra = cli::play(board::default_config(), script, a);
  const auto rb = cli::play(board::default_config(), script, b);
  const bool bytes = slurp(a.log_path) == slurp(b.log_path) && !slurp(a.log_path).empty();
  const auto rep = session::replay_log_file(a.log_path);
  const bool hashes = rep.state_hash == ra.state_hash && rep.world_hash == ra.world_hash;
  return {!ra.error && !rb.error && bytes && hashes,
          std::string("logs ") + (bytes ? "byte-equal" : "DIFFER") + " (" + std::to_string(ra.log_records) +
              " records), replay state " + rep.state_hash.substr(0, 12) + (hashes ? " matches" : " MISMATCH")};
}

Outcome full_game() {
  const auto dir = std::filesystem::temp_directory_path() / "dm_acceptance";
  std::filesystem::create_directories(dir);
  cli::PlayOptions o;
  o.pacing = true;
  o.speed = 1000.0;
  const auto t0 = Clock::now();
  const auto win = cli::play(board::default_config(), cli::load_script(script_path("win_path.json")), o);
  const double secs = seconds_since(t0);

  cli::PlayOptions k;
  k.pacing = false;
  k.log_path = (dir / "key.jsonl").string();
  const auto key = cli::play(board::default_config(), cli::load_script(script_path("key_failure.json")), k);
  int woke = 0, spiders = 0, failed = 0;
  std::ifstream in(k.log_path);
  for (std::string line; std::getline(in, line);) {
    const auto j = Json::parse(line);
    if (j["type"] != "GAME_EVENT") continue;
    const auto& e = j["payload"];
    if (e["kind"] == "KEY_RESULT" && e["payload"]["success"] == false) ++failed;
    if (failed && e["kind"] == "DRAGON_WOKE") ++woke;
    if (failed && e["kind"] == "SPIDER_SPAWNED" && e["payload"]["reason"] == "KEY_FAILURE") ++spiders;
  }
  const bool win_ok = !win.error && win.outcome == engine::Outcome::Win && win.rounds <= 40 && secs < 5.0;
  const bool key_ok = !key.error && failed == 1 && woke == 1 && spiders == 2;
  return {win_ok && key_ok, "win in round " + std::to_string(win.rounds) + " (" + std::string(to_string(win.outcome)) +
                                ") in " + num(secs) + " s at 1000x; key failure -> " + std::to_string(woke) +
                                " wake, " + std::to_string(spiders) + " spiders"};
}

Outcome constants() {
  const auto cfg = board::default_config();
  const auto reloaded = board::load_config(board::default_config_path());
  const bool values = cfg.max_tokens == 4 && board::kMaxTokens == 4 && cfg.hearing_range_tiles == 3 &&
                      cfg.combat_dice == 2 && board::kCombatDice == 2 && cfg.rarity_tiers() == 3 &&
                      board::kEnvelopeX <= 400.0 && reloaded.max_tokens == 4 && reloaded.hearing_range_tiles == 3 &&
                      reloaded.combat_dice == 2;
  const auto rejects = [&](const std::function<void(board::GameConfig&)>& edit) {
    auto c = cfg;
    edit(c);
    try {
      c.validate();
      return false;
    } catch (const Error& e) {
      return e.code() == ErrorCode::InvalidConfig;
    }
  };
  const bool guarded = rejects([](auto& c) { c.max_tokens = 5; }) && rejects([](auto& c) { c.combat_dice = 3; }) &&
                       rejects([](auto& c) {
                         c.board = board::Board(14, 9);
                         c.board.at({1, 1}).kind = board::TileKind::Exit;
                       });
  bool envelope = true;
  for (int col = 0; col < cfg.board.cols(); ++col) {
    envelope = envelope && cfg.origin_mm.x + (col + 1) * cfg.cell_size_mm <= board::kEnvelopeX;
  }
  return {values && guarded && envelope,
          "token cap " + std::to_string(cfg.max_tokens) + ", hearing " + std::to_string(cfg.hearing_range_tiles) +
              ", combat dice " + std::to_string(cfg.combat_dice) + ", rarity tiers " +
              std::to_string(cfg.rarity_tiers()) + ", x-envelope " + num(board::kEnvelopeX) + " mm" +
              (guarded ? "" : ", VALIDATION GAP")};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"hu-invariance", hu_invariance},
      {"weapon-classification", weapon_classification},
      {"dice-oracle", dice_oracle},
      {"marker-round-trip", marker_round_trip},
      {"motion-correction-loop", motion_correction},
      {"compiler-safety", compiler_safety},
      {"determinism-replay", determinism},
      {"full-scripted-game", full_game},
      {"constants", constants},
  };
  const std::string filter = argc > 1 ? argv[1] : "";
  int failed = 0;
  for (const auto& [name, fn] : criteria) {
    if (!filter.empty() && name.find(filter) == std::string::npos) continue;
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    failed += !o.pass;
    std::printf("%s  %-24s %s\n", o.pass ? "PASS" : "FAIL", name.c_str(), o.detail.c_str());
    std::fflush(stdout);
  }
  return failed ? 1 : 0;
}
