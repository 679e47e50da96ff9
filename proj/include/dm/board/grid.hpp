// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <compare>
#include <cstdlib>
#include <string>

#include "dm/common/json.hpp"

namespace dm::board {

/// Cell address; row 0 is the top (far) edge of the board.
struct GridPos {
  int col = 0;
  int row = 0;
  friend constexpr auto operator<=>(const GridPos&, const GridPos&) = default;
};

inline int manhattan(GridPos a, GridPos b) { return std::abs(a.col - b.col) + std::abs(a.row - b.row); }

enum class Direction { Up, Down, Left, Right };

inline GridPos step(GridPos p, Direction d) {
  switch (d) {
    case Direction::Up: return {p.col, p.row - 1};
    case Direction::Down: return {p.col, p.row + 1};
    case Direction::Left: return {p.col - 1, p.row};
    case Direction::Right: return {p.col + 1, p.row};
  }
  return p;
}

/// 4-neighbourhood in a fixed order: up, down, left, right.
inline std::array<GridPos, 4> neighbors(GridPos p) {
  return {step(p, Direction::Up), step(p, Direction::Down), step(p, Direction::Left), step(p, Direction::Right)};
}

std::string to_string(GridPos p);
Json to_json(GridPos p);
GridPos grid_pos_from_json(const Json& j, std::string_view where);

}  // namespace dm::board
