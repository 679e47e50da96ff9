// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <chrono>
#include <filesystem>

#include "dm/cli/play.hpp"
#include "dm/common/error.hpp"
#include "dm/vision/calibrate.hpp"
#include "fixtures.hpp"

using namespace dm;
using namespace dm::cli;

namespace {

Script asset_script(const std::string& name) { return load_script(std::string(DM_ASSET_DIR) + "/scripts/" + name); }

PlayOptions fast() {
  PlayOptions o;
  o.pacing = false;
  return o;
}

std::vector<session::ChannelMessage> events_of(const std::string& log) {
  std::vector<session::ChannelMessage> out;
  std::ifstream in(log);
  for (std::string line; std::getline(in, line);) {
    const auto j = Json::parse(line);
    if (j["type"] == "GAME_EVENT") out.push_back(session::message_from_json(j));
  }
  return out;
}

int count_kind(const std::vector<session::ChannelMessage>& ev, const std::string& kind, const std::string& reason = {}) {
  int n = 0;
  for (const auto& m : ev) {
    if (m.payload["kind"] != kind) continue;
    if (!reason.empty() && m.payload["payload"]["reason"] != reason) continue;
    ++n;
  }
  return n;
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("win path script escapes the dungeon") {
  const auto r = play(board::default_config(), asset_script("win_path.json"), fast());
  CHECK_FALSE(r.error);
  CHECK(r.outcome == engine::Outcome::Win);
  CHECK(r.exit_code == kExitWin);
  CHECK(r.rounds <= 40);
}

TEST_CASE("play is byte-reproducible") {
  const auto dir = std::filesystem::temp_directory_path() / "dm_test_cli";
  std::filesystem::create_directories(dir);
  auto o1 = fast(), o2 = fast();
  o1.log_path = (dir / "a.jsonl").string();
  o2.log_path = (dir / "b.jsonl").string();
  const auto script = asset_script("win_path.json");
  const auto a = play(board::default_config(), script, o1);
  const auto b = play(board::default_config(), script, o2);
  CHECK(a.log_sha256 == b.log_sha256);
  CHECK(a.state_hash == b.state_hash);
  CHECK(a.world_hash == b.world_hash);
  std::ifstream fa(o1.log_path), fb(o2.log_path);
  const std::string ta((std::istreambuf_iterator<char>(fa)), {}), tb((std::istreambuf_iterator<char>(fb)), {});
  CHECK(ta == tb);
  const auto replayed = session::replay_log_file(o1.log_path);
  CHECK(replayed.state_hash == a.state_hash);
  CHECK(replayed.world_hash == a.world_hash);
}

TEST_CASE("key failure wakes the dragon and spawns two spiders") {
  const auto dir = std::filesystem::temp_directory_path() / "dm_test_cli";
  std::filesystem::create_directories(dir);
  auto o = fast();
  o.log_path = (dir / "key.jsonl").string();
  const auto r = play(board::default_config(), asset_script("key_failure.json"), o);
  CHECK_FALSE(r.error);
  CHECK(r.stopped);
  const auto ev = events_of(o.log_path);
  int failures = 0;
  for (const auto& m : ev) failures += m.payload["kind"] == "KEY_RESULT" && m.payload["payload"]["success"] == false;
  CHECK(failures == 1);
  CHECK(count_kind(ev, "DRAGON_WOKE") == 1);
  CHECK(count_kind(ev, "SPIDER_SPAWNED", "KEY_FAILURE") == 2);
}

TEST_CASE("a script that ends early is exhausted") {
  auto script = asset_script("win_path.json");
  script.actions.resize(5);
  const auto r = play(board::default_config(), script, fast());
  CHECK(r.error == std::optional<std::string>("SCRIPT_EXHAUSTED"));
  CHECK(r.exit_code == kExitData);
  CHECK(r.outcome == engine::Outcome::Ongoing);
}

TEST_CASE("a script that disagrees with the phase is a mismatch") {
  auto script = asset_script("win_path.json");
  script.actions.erase(script.actions.begin());
  const auto r = play(board::default_config(), script, fast());
  CHECK(r.error == std::optional<std::string>("SCRIPT_MISMATCH"));
}

TEST_CASE("script parsing") {
  CHECK_THROWS_AS(script_from_json(Json{{"schema", "dm.script/9"}, {"actions", Json::array()}}), Error);
  CHECK_THROWS_AS(script_from_json(Json{{"schema", "dm.script/1"}, {"actions", {{{"type", "JUMP"}}}}}), Error);
  const auto s = asset_script("win_path.json");
  CHECK(script_from_json(to_json(s)).actions.size() == s.actions.size());
  CHECK(to_json(script_from_json(to_json(s))) == to_json(s));
}

TEST_CASE("exit codes") {
  CHECK(exit_code_for(ErrorCode::Internal) == kExitInternal);
  CHECK(exit_code_for(ErrorCode::CorruptLog) == kExitData);
}

TEST_CASE("rarity calibration is deterministic and balanced") {
  vision::CorpusOptions opts;
  opts.total = 90;
  const auto& base = vision::default_baselines();
  const auto a = vision::calibrate_rarity(base, opts, 1);
  const auto b = vision::calibrate_rarity(base, opts, 1, vision::Exec::Serial);
  CHECK(a.scores == b.scores);
  CHECK(a.thresholds.legendary == b.thresholds.legendary);
  CHECK(a.thresholds.rare == b.thresholds.rare);
  for (const int n : a.tier_counts) CHECK(std::abs(n - 30) <= 2);
  CHECK(to_json(a) == to_json(b));
}

TEST_CASE("corpus generation is reproducible") {
  const auto& base = vision::default_baselines();
  const vision::CorpusOptions opts;
  const auto a = vision::generate_kind_corpus(base, WeaponKind::Axe, 10, opts, 3);
  const auto b = vision::generate_kind_corpus(base, WeaponKind::Axe, 10, opts, 3);
  REQUIRE(a.size() == 10);
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].contour == b[i].contour);
    CHECK(a[i].kind == WeaponKind::Axe);
  }
  const auto c = vision::generate_kind_corpus(base, WeaponKind::Axe, 10, opts, 4);
  CHECK_FALSE(a[0].contour == c[0].contour);
}

}  // TEST_SUITE
