// SPDX-License-Identifier: Apache-2.0
// dm: headless driver. Subcommands play, replay, calibrate-rarity, gen-corpus, serve.

#include <csignal>
#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "dm/cli/play.hpp"
#include "dm/session/server.hpp"
#include "dm/vision/calibrate.hpp"
#include "dm/vision/render.hpp"

using namespace dm;
namespace fs = std::filesystem;

namespace {

board::GameConfig load_cfg(const std::string& path) {
  return path.empty() ? board::default_config() : board::load_config(path);
}

void write_json(const std::string& path, const Json& j) {
  if (path.empty() || path == "-") {
    std::cout << j.dump(2) << "\n";
    return;
  }
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path);
  out << j.dump(2) << "\n";
}

Json replay_summary(const session::ReplayResult& r) {
  return Json{{"outcome", engine::to_string(r.state.outcome)},
              {"round", r.state.round},
              {"events", r.events},
              {"state_hash", r.state_hash},
              {"world_hash", r.world_hash}};
}

int outcome_exit(engine::Outcome o) { return o == engine::Outcome::Loss ? cli::kExitLoss : cli::kExitWin; }

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::IoError, "cannot create " + dir + ": " + ec.message());
}

Json gen_dice(const std::string& dir) {
  Json files = Json::array();
  for (int pips = 1; pips <= 6; ++pips) {
    const std::array<int, 1> one{pips};
    const std::string name = "die_bottom" + std::to_string(pips) + ".pgm";
    vision::write_pgm_file(dir + "/" + name, vision::render_dice(one));
    files.push_back({{"file", name}, {"bottom_pips", pips}, {"value", 7 - pips}});
  }
  return files;
}

Json gen_markers(const std::string& dir) {
  std::vector<vision::TokenPlacement> sheet;
  Json cells = Json::array();
  for (int id = 0; id < vision::kDictionarySize; ++id) {
    for (int rot = 0; rot < 4; ++rot) {
      const Vec2 c{20.0 + 20.0 * id, 20.0 + 20.0 * rot};
      sheet.push_back({static_cast<vision::TokenId>(id), c, rot});
      cells.push_back({{"id", id}, {"rotation", rot}, {"center_mm", to_json(c)}});
    }
  }
  const double w = 20.0 * (vision::kDictionarySize + 1), h = 20.0 * 5;
  vision::write_pgm_file(dir + "/marker_sheet.pgm", vision::render_tokens(sheet, 0.5, 12.0, w, h));
  return Json{{"file", "marker_sheet.pgm"}, {"cells", cells}};
}

Json gen_weapons(const std::string& dir, WeaponKind kind, int count, std::uint64_t seed) {
  const auto samples = vision::generate_kind_corpus(vision::default_baselines(), kind, count, {}, seed);
  Json files = Json::array();
  for (std::size_t i = 0; i < samples.size(); ++i) {
    char name[64];
    std::snprintf(name, sizeof name, "%s_%03zu.pgm", std::string(to_string(kind)).c_str(), i);
    vision::write_pgm_file(dir + "/" + name, vision::render_contour(samples[i].contour));
    files.push_back({{"file", name}, {"noise", samples[i].noise}, {"shear", samples[i].shear}});
  }
  return files;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"DungeonMaker headless driver"};
  app.require_subcommand(1);
  std::string config_path;
  app.add_option("--config", config_path, "Game configuration JSON")->check(CLI::ExistingFile);

  auto* play = app.add_subcommand("play", "Run a scripted game against the simulator");
  std::string script_path, out_path, replay_path;
  std::optional<std::uint64_t> seed;
  std::optional<double> speed;
  bool no_pacing = false;
  play->add_option("--script", script_path, "Script JSON")->check(CLI::ExistingFile);
  play->add_option("--seed", seed, "Seed override");
  play->add_option("--speed", speed, "Simulator speed multiplier");
  play->add_option("--out", out_path, "Session log (JSON lines)");
  play->add_option("--replay", replay_path, "Replay a session log instead of playing")->check(CLI::ExistingFile);
  play->add_flag("--no-pacing", no_pacing, "Run the simulator without wall-clock pacing");

  auto* replay = app.add_subcommand("replay", "Rebuild state from a session log");
  std::string log_path;
  replay->add_option("log", log_path, "Session log")->required()->check(CLI::ExistingFile);

  auto* calib = app.add_subcommand("calibrate-rarity", "Tercile rarity thresholds from a generated corpus");
  vision::CorpusOptions copts;
  std::uint64_t calib_seed = 1;
  std::string calib_out;
  calib->add_option("-n,--samples", copts.total, "Total corpus size")->check(CLI::PositiveNumber);
  calib->add_option("--seed", calib_seed, "Corpus seed");
  calib->add_option("--max-noise", copts.max_noise, "Vertex noise fraction");
  calib->add_option("--max-shear", copts.max_shear, "Shear factor");
  calib->add_option("--out", calib_out, "Result JSON (stdout when omitted)");
  bool with_scores = false;
  calib->add_flag("--scores", with_scores, "Include per-sample scores");

  auto* gen = app.add_subcommand("gen-corpus", "Render dice, marker and weapon rasters");
  std::string gen_out;
  std::string set = "all";
  std::string weapon = "AXE";
  int count = 100;
  std::uint64_t gen_seed = 3;
  gen->add_option("--out", gen_out, "Output directory")->required();
  gen->add_option("--set", set, "dice|markers|weapons|all")->check(CLI::IsMember({"dice", "markers", "weapons", "all"}));
  gen->add_option("--weapon", weapon, "AXE|SWORD|BOW")->check(CLI::IsMember({"AXE", "SWORD", "BOW"}));
  gen->add_option("--count", count, "Weapon rasters")->check(CLI::PositiveNumber);
  gen->add_option("--seed", gen_seed, "Weapon corpus seed");

  auto* serve = app.add_subcommand("serve", "Run the session server");
  session::ServerOptions sopts;
  serve->add_option("--address", sopts.address, "Bind address");
  serve->add_option("--port", sopts.port, "Port (0 for ephemeral)");
  serve->add_option("--log-dir", sopts.log_dir, "Directory for per-session logs");
  bool serve_no_pacing = false;
  serve->add_flag("--no-pacing", serve_no_pacing, "Run motion without wall-clock pacing");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : cli::kExitUsage;
  }

  try {
    if (*play) {
      if (!replay_path.empty()) {
        const auto r = session::replay_log_file(replay_path);
        write_json("-", replay_summary(r));
        return outcome_exit(r.state.outcome);
      }
      if (script_path.empty()) {
        std::cerr << "play: --script or --replay is required\n";
        return cli::kExitUsage;
      }
      cli::PlayOptions po;
      po.log_path = out_path;
      po.seed = seed;
      po.speed = speed;
      po.pacing = !no_pacing;
      const auto r = cli::play(load_cfg(config_path), cli::load_script(script_path), po);
      write_json("-", cli::to_json(r));
      return r.exit_code;
    }
    if (*replay) {
      const auto r = session::replay_log_file(log_path);
      write_json("-", replay_summary(r));
      return outcome_exit(r.state.outcome);
    }
    if (*calib) {
      const auto c = vision::calibrate_rarity(vision::default_baselines(), copts, calib_seed);
      Json j = vision::to_json(c);
      if (!with_scores) j.erase("scores");
      j["seed"] = calib_seed;
      write_json(calib_out, j);
      return 0;
    }
    if (*gen) {
      ensure_dir(gen_out);
      Json manifest{{"seed", gen_seed}};
      if (set == "dice" || set == "all") manifest["dice"] = gen_dice(gen_out);
      if (set == "markers" || set == "all") manifest["markers"] = gen_markers(gen_out);
      if (set == "weapons" || set == "all") {
        manifest["weapons"] = gen_weapons(gen_out, *weapon_kind_from_string(weapon), count, gen_seed);
      }
      write_json(gen_out + "/manifest.json", manifest);
      return 0;
    }
    if (*serve) {
      sopts.config_path = config_path;
      sopts.pacing = !serve_no_pacing;
      sigset_t sigs;
      sigemptyset(&sigs);
      sigaddset(&sigs, SIGINT);
      sigaddset(&sigs, SIGTERM);
      pthread_sigmask(SIG_BLOCK, &sigs, nullptr);
      session::Server server(sopts);
      const auto port = server.start();
      std::cout << "listening on " << sopts.address << ":" << port << std::endl;
      int sig = 0;
      sigwait(&sigs, &sig);
      server.stop();
      return 0;
    }
  } catch (const Error& e) {
    std::cerr << to_string(e.code()) << ": " << e.what() << "\n";
    return cli::exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::cerr << "INTERNAL: " << e.what() << "\n";
    return cli::kExitInternal;
  }
  return cli::kExitUsage;
}
