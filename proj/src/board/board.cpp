// SPDX-License-Identifier: Apache-2.0
#include "dm/board/board.hpp"

#include <algorithm>

#include "dm/common/error.hpp"

namespace dm::board {

char tile_char(TileKind k) {
  switch (k) {
    case TileKind::Floor: return '.';
    case TileKind::Wall: return '#';
    case TileKind::Hole: return 'O';
    case TileKind::Chest: return 'C';
    case TileKind::Exit: return 'E';
  }
  return '?';
}

TileKind tile_from_char(char c) {
  switch (c) {
    case '.': return TileKind::Floor;
    case '#': return TileKind::Wall;
    case 'O': return TileKind::Hole;
    case 'C': return TileKind::Chest;
    case 'E': return TileKind::Exit;
    default: throw Error(ErrorCode::InvalidConfig, std::string("unknown map character '") + c + "'");
  }
}

Board::Board(int cols, int rows) : cols_(cols), rows_(rows) {
  if (cols <= 0 || rows <= 0) throw Error(ErrorCode::InvalidConfig, "board dimensions must be positive");
  tiles_.resize(static_cast<std::size_t>(cols) * static_cast<std::size_t>(rows));
}

Board Board::from_ascii(std::span<const std::string> rows) {
  if (rows.empty() || rows.front().empty()) throw Error(ErrorCode::InvalidConfig, "empty board map");
  Board b(static_cast<int>(rows.front().size()), static_cast<int>(rows.size()));
  int exits = 0;
  for (int r = 0; r < b.rows_; ++r) {
    const std::string& line = rows[static_cast<std::size_t>(r)];
    if (static_cast<int>(line.size()) != b.cols_) {
      throw Error(ErrorCode::InvalidConfig, "board map row " + std::to_string(r) + " has wrong length");
    }
    for (int c = 0; c < b.cols_; ++c) {
      const TileKind k = tile_from_char(line[static_cast<std::size_t>(c)]);
      b.at({c, r}).kind = k;
      exits += k == TileKind::Exit;
    }
  }
  if (exits != 1) throw Error(ErrorCode::InvalidConfig, "board needs exactly one exit, found " + std::to_string(exits));
  return b;
}

std::vector<std::string> Board::to_ascii() const {
  std::vector<std::string> out;
  for (int r = 0; r < rows_; ++r) {
    std::string line;
    for (int c = 0; c < cols_; ++c) line += tile_char(at({c, r}).kind);
    out.push_back(std::move(line));
  }
  return out;
}

const Tile& Board::at(GridPos p) const {
  if (!in_bounds(p)) throw Error(ErrorCode::OutOfBounds, "cell " + to_string(p) + " is off the board");
  return tiles_[static_cast<std::size_t>(p.row) * static_cast<std::size_t>(cols_) + static_cast<std::size_t>(p.col)];
}

Tile& Board::at(GridPos p) { return const_cast<Tile&>(std::as_const(*this).at(p)); }

bool Board::walkable(GridPos p) const {
  if (!in_bounds(p)) return false;
  const TileKind k = at(p).kind;
  return k == TileKind::Floor || k == TileKind::Chest || k == TileKind::Exit;
}

GridPos Board::exit() const {
  const auto e = cells_of(TileKind::Exit);
  if (e.empty()) throw Error(ErrorCode::InvalidConfig, "board has no exit");
  return e.front();
}

std::vector<GridPos> Board::cells_of(TileKind k) const {
  std::vector<GridPos> out;
  for (int r = 0; r < rows_; ++r) {
    for (int c = 0; c < cols_; ++c) {
      if (at({c, r}).kind == k) out.push_back({c, r});
    }
  }
  return out;
}

bool passable(const Board& board, std::span<const GridPos> tangible_figures, GridPos p) {
  if (!board.in_bounds(p)) throw Error(ErrorCode::OutOfBounds, "cell " + to_string(p) + " is off the board");
  if (!board.walkable(p)) return false;
  return std::find(tangible_figures.begin(), tangible_figures.end(), p) == tangible_figures.end();
}

}  // namespace dm::board
