// SPDX-License-Identifier: Apache-2.0
#include "dm/sim/trials.hpp"

#include <algorithm>

#include "dm/common/rng.hpp"
#include "dm/motion/device.hpp"
#include "dm/sim/simulator.hpp"

namespace dm::sim {

PickPlaceStats run_pick_place_trials(const board::GameConfig& cfg, int jobs, std::uint64_t seed) {
  auto opts = cfg.sim;
  opts.seed = seed;
  Simulator sim(cfg.machine, opts);
  board::Figure fig;
  fig.id = "P0";
  fig.marker_id = 8;
  fig.pos = cfg.player_starts.at(0);
  sim.place_figures({fig}, cfg);

  Rng rng(seed ^ 0x9e3779b97f4a7c15ULL);
  PickPlaceStats stats;
  for (int j = 0; j < jobs; ++j) {
    std::vector<board::GridPos> path;
    board::GridPos at = fig.pos;
    const int len = rng.uniform_int(1, 3);
    for (int k = 0; k < len; ++k) {
      std::vector<board::GridPos> options;
      for (const auto n : board::neighbors(at)) {
        if (cfg.board.in_bounds(n) && cfg.board.walkable(n) && n != fig.pos &&
            std::find(path.begin(), path.end(), n) == path.end()) {
          options.push_back(n);
        }
      }
      if (options.empty()) break;
      at = options[static_cast<std::size_t>(rng.uniform_int(0, static_cast<int>(options.size()) - 1))];
      path.push_back(at);
    }
    if (path.empty()) continue;
    const auto job = motion::compile_move_job(fig, path, cfg, "trial-" + std::to_string(j));
    const auto res = motion::run_motion_job(job, sim, cfg);
    ++stats.jobs;
    if (res.status != motion::JobStatus::Completed) continue;
    ++stats.completed;
    if (res.grip_attempts > 1) ++stats.retried;
    fig.pos = path.back();
    const auto pose = sim.board_pose(fig.id);
    if (pose) {
      stats.max_rest_error_mm =
          std::max(stats.max_rest_error_mm, distance(pose->position(), motion::cell_center(fig.pos, cfg)));
    }
  }
  return stats;
}

}  // namespace dm::sim
