// SPDX-License-Identifier: Apache-2.0
// Authors a scripted game by greedy lookahead on the engine, executing each
// chosen action through a live session so motion outcomes are accounted for.

#include <CLI11.hpp>
#include <deque>
#include <fstream>
#include <iostream>
#include <limits>
#include <map>

#include "dm/cli/play.hpp"

using namespace dm;
using board::GridPos;

namespace {

std::map<GridPos, int> distances_to(const engine::GameState& s, const std::vector<GridPos>& goals) {
  std::map<GridPos, int> d;
  std::deque<GridPos> q;
  for (const auto g : goals) {
    d[g] = 0;
    q.push_back(g);
  }
  while (!q.empty()) {
    const GridPos p = q.front();
    q.pop_front();
    for (const auto n : board::neighbors(p)) {
      if (!s.board.in_bounds(n) || !s.board.walkable(n) || d.count(n)) continue;
      d[n] = d[p] + 1;
      q.push_back(n);
    }
  }
  return d;
}

std::vector<GridPos> goals_for(const engine::GameState& s) {
  std::vector<GridPos> out;
  if (s.hints.size() >= 3) return {s.board.exit()};
  if (s.chest_hints_found < s.cfg().chest_hints) {
    for (const auto c : s.board.cells_of(board::TileKind::Chest)) {
      if (!s.board.at(c).chest_opened) out.push_back(c);
    }
    return out;
  }
  for (const auto n : board::neighbors(s.jailer)) {
    if (s.board.in_bounds(n) && s.board.walkable(n)) out.push_back(n);
  }
  return out;
}

std::vector<std::string> best_move(const engine::GameState& s, int player) {
  const auto dist = distances_to(s, goals_for(s));
  const int budget = std::min(board::token_budget(s.cfg().base_tokens, s.players[player].figure.weapon), s.cfg().max_tokens);
  static const std::array<vision::TokenId, 4> dirs{vision::TokenId::MoveUp, vision::TokenId::MoveDown,
                                                   vision::TokenId::MoveLeft, vision::TokenId::MoveRight};
  std::vector<vision::TokenId> best;
  double best_score = std::numeric_limits<double>::infinity();
  std::vector<vision::TokenId> cur;
  const auto eval = [&] {
    try {
      const auto path = engine::plan_path(s, player, cur);
      const GridPos end = path.empty() ? s.players[player].figure.pos : path.back();
      const auto it = dist.find(end);
      double score = it == dist.end() ? 1e6 : it->second;
      if (path.size() > 1 && !s.dragon.awake) {
        for (const auto p : path) score += 0.05 * (board::manhattan(p, s.dragon.figure.pos) <= s.cfg().hearing_range_tiles);
      }
      score += 0.001 * static_cast<double>(cur.size());
      if (score < best_score) {
        best_score = score;
        best = cur;
      }
    } catch (const Error&) {
    }
  };
  const std::function<void(int)> rec = [&](int depth) {
    eval();
    if (depth == budget) return;
    for (const auto d : dirs) {
      cur.push_back(d);
      rec(depth + 1);
      cur.pop_back();
    }
  };
  rec(0);
  std::vector<std::string> out;
  for (const auto t : best) out.emplace_back(vision::to_string(t));
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Author a scripted game by greedy lookahead"};
  std::string config_path = board::default_config_path();
  std::string out_path;
  std::string mode = "win";
  std::string weapon = "BOW";
  std::uint64_t seed = 7;
  int max_rounds = 40;
  app.add_option("--config", config_path, "game config JSON");
  app.add_option("--out", out_path, "script output path")->required();
  app.add_option("--mode", mode, "win | key-failure")->check(CLI::IsMember({"win", "key-failure"}));
  app.add_option("--weapon", weapon, "weapon crafted during setup");
  app.add_option("--seed", seed, "game seed");
  app.add_option("--max-rounds", max_rounds, "give up after this many rounds");
  CLI11_PARSE(app, argc, argv);

  try {
    auto cfg = board::load_config(config_path);
    cfg.seed = seed;
    session::SessionOptions so;
    so.clock = [] { return 0.0; };
    session::Session s("author", std::make_shared<const board::GameConfig>(cfg), so);
    cli::Script script;
    script.name = mode == "win" ? "win_path" : "key_failure";
    script.seed = seed;
    const auto act = [&](cli::ScriptAction a) {
      a.player = s.state().active;
      cli::perform(s, a, script.actions.size());
      script.actions.push_back(std::move(a));
    };
    bool stop = false;
    while (!stop && s.state().phase != engine::Phase::Ended && s.state().round <= max_rounds) {
      const auto st = s.state();
      const int p = st.active;
      cli::ScriptAction a;
      switch (st.phase) {
        case engine::Phase::AwaitCraft:
          if (st.setup) {
            a.type = "CRAFT";
            a.asset = weapon;
          } else {
            a.type = "SKIP_CRAFT";
          }
          break;
        case engine::Phase::AwaitDice:
          a.type = "DICE";
          a.values = {6, 6};
          break;
        case engine::Phase::AwaitBehavior: {
          a.type = "BEHAVIOR";
          int best = -2;
          for (const auto b : {engine::Behavior::Aggressive, engine::Behavior::Defensive, engine::Behavior::Deceitful}) {
            const auto t = engine::jailer_interaction(st, p, b);
            const auto res = t.events.front().payload.at("result").get<std::string>();
            const int v = res == "WIN" ? 1 : res == "DRAW" ? 0 : -1;
            if (v > best) {
              best = v;
              a.behavior = std::string(engine::to_string(b));
            }
          }
          break;
        }
        case engine::Phase::AwaitKey:
          a.type = "KEY";
          a.asset = mode == "win" ? "KEY" : "AXE";
          stop = mode != "win";
          break;
        case engine::Phase::AwaitMove:
          a.tokens = best_move(st, p);
          a.type = a.tokens.empty() ? "PASS" : "MOVE";
          break;
        default:
          throw Error(ErrorCode::Internal, "unexpected phase " + std::string(engine::to_string(st.phase)));
      }
      act(std::move(a));
    }
    if (stop) {
      cli::ScriptAction halt;
      halt.type = "STOP";
      script.actions.push_back(halt);
    }
    const auto st = s.state();
    std::cerr << "outcome " << engine::to_string(st.outcome) << " round " << st.round << " actions "
              << script.actions.size() << " hints " << st.hints.size() << "\n";
    std::ofstream out(out_path);
    out << to_json(script).dump(1) << "\n";
    return st.outcome == engine::Outcome::Win || stop ? 0 : 1;
  } catch (const Error& e) {
    std::cerr << to_string(e.code()) << ": " << e.what() << "\n";
    return cli::exit_code_for(e.code());
  }
}
