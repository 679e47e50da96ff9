// SPDX-License-Identifier: Apache-2.0
#include "dm/motion/machine.hpp"

namespace dm::motion {

Json to_json(const MachinePos& p) { return Json::array({p.x, p.y, p.z}); }

MachinePos machine_pos_from_json(const Json& j, std::string_view where) {
  if (!j.is_array() || j.size() != 3 || !j[0].is_number() || !j[1].is_number() || !j[2].is_number()) {
    throw Error(ErrorCode::SchemaError, std::string(where) + ": expected [x, y, z]");
  }
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

bool in_envelope(const MachinePos& p, const board::MachineConfig& m) {
  return p.x >= 0 && p.x <= board::kEnvelopeX && p.y >= 0 && p.y <= board::kEnvelopeY && p.z >= 0 &&
         p.z <= m.z_max;
}

Vec2 cell_center(board::GridPos p, const board::GameConfig& cfg) {
  if (!cfg.board.in_bounds(p)) {
    throw Error(ErrorCode::OutOfEnvelope, "cell " + board::to_string(p) + " is off the board");
  }
  return {cfg.origin_mm.x + p.col * cfg.cell_size_mm + cfg.cell_size_mm / 2,
          cfg.origin_mm.y + p.row * cfg.cell_size_mm + cfg.cell_size_mm / 2};
}

MachinePos grid_to_machine(board::GridPos p, const board::GameConfig& cfg) {
  const Vec2 c = cell_center(p, cfg);
  const MachinePos out{c.x, c.y, cfg.machine.travel_z};
  if (!in_envelope(out, cfg.machine)) {
    throw Error(ErrorCode::OutOfEnvelope, "cell " + board::to_string(p) + " lies outside the work envelope");
  }
  return out;
}

}  // namespace dm::motion
