// SPDX-License-Identifier: Apache-2.0
#include "dm/board/grid.hpp"

namespace dm::board {

std::string to_string(GridPos p) { return "(" + std::to_string(p.col) + "," + std::to_string(p.row) + ")"; }

Json to_json(GridPos p) { return Json::array({p.col, p.row}); }

GridPos grid_pos_from_json(const Json& j, std::string_view where) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number_integer() || !j[1].is_number_integer()) {
    throw Error(ErrorCode::SchemaError, std::string(where) + ": expected [col, row]");
  }
  return {j[0].get<int>(), j[1].get<int>()};
}

}  // namespace dm::board
