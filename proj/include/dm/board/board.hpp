// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <span>
#include <string>
#include <vector>

#include "dm/board/grid.hpp"

namespace dm::board {

enum class TileKind { Floor, Wall, Hole, Chest, Exit };

struct Tile {
  TileKind kind = TileKind::Floor;
  bool chest_opened = false;  // CHEST only
  friend bool operator==(const Tile&, const Tile&) = default;
};

/// Map character: `.` floor, `#` wall, `O` hole, `C` chest, `E` exit.
char tile_char(TileKind k);
TileKind tile_from_char(char c);

class Board {
 public:
  Board() = default;
  Board(int cols, int rows);
  /// Parses the ASCII map (one string per row). Requires a rectangular map
  /// with exactly one exit.
  static Board from_ascii(std::span<const std::string> rows);
  std::vector<std::string> to_ascii() const;

  int cols() const { return cols_; }
  int rows() const { return rows_; }
  bool in_bounds(GridPos p) const { return p.col >= 0 && p.row >= 0 && p.col < cols_ && p.row < rows_; }
  const Tile& at(GridPos p) const;
  Tile& at(GridPos p);

  /// Terrain alone admits a figure (FLOOR, CHEST or EXIT).
  bool walkable(GridPos p) const;
  GridPos exit() const;
  std::vector<GridPos> cells_of(TileKind k) const;  // row-major order

  friend bool operator==(const Board&, const Board&) = default;

 private:
  int cols_ = 0;
  int rows_ = 0;
  std::vector<Tile> tiles_;
};

/// Terrain admits a figure and no other tangible figure stands there.
/// Throws OutOfBounds.
bool passable(const Board& board, std::span<const GridPos> tangible_figures, GridPos p);

}  // namespace dm::board
