// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "dm/board/config.hpp"
#include "dm/common/geometry.hpp"
#include "dm/common/json.hpp"

namespace dm::motion {

/// Machine-frame coordinates (mm). The machine y axis grows with board rows.
struct MachinePos {
  double x = 0;
  double y = 0;
  double z = 0;
  Vec2 xy() const { return {x, y}; }
  friend bool operator==(const MachinePos&, const MachinePos&) = default;
};

Json to_json(const MachinePos& p);
MachinePos machine_pos_from_json(const Json& j, std::string_view where);

bool in_envelope(const MachinePos& p, const board::MachineConfig& m);

/// Cell centre at travel height. Throws OutOfEnvelope for cells off the
/// board or outside the work envelope.
MachinePos grid_to_machine(board::GridPos p, const board::GameConfig& cfg);
/// Planar cell centre without envelope checks beyond board bounds.
Vec2 cell_center(board::GridPos p, const board::GameConfig& cfg);

}  // namespace dm::motion
