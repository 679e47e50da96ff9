// SPDX-License-Identifier: Apache-2.0
#pragma once

// DM-16 fiducial format: 6x6 cells with a one-cell dark border around a 4x4
// payload. Payload bits are row-major, MSB first (cell (r, c) is bit
// 15 - (4r + c)); 1 = dark cell. Rotation index k means the printed grid is
// the canonical grid turned clockwise k quarter turns.

#include <array>
#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "dm/common/geometry.hpp"
#include "dm/vision/raster.hpp"

namespace dm::vision {

enum class TokenId : std::uint8_t {
  MoveUp = 0,
  MoveDown,
  MoveLeft,
  MoveRight,
  Aggressive,
  Defensive,
  Deceitful,
  Confirm,
  Reserved8,
  Reserved9,
  Reserved10,
  Reserved11,
  Reserved12,
  Reserved13,
  Reserved14,
  Reserved15,
};

inline constexpr int kDictionarySize = 16;
inline constexpr int kMarkerCells = 6;
inline constexpr int kMinRotationalDistance = 6;

std::string_view to_string(TokenId id);
std::optional<TokenId> token_from_string(std::string_view s);
inline bool is_move_token(TokenId id) { return static_cast<int>(id) <= static_cast<int>(TokenId::MoveRight); }
inline bool is_behavior_token(TokenId id) {
  return id == TokenId::Aggressive || id == TokenId::Defensive || id == TokenId::Deceitful;
}

using Codeword = std::uint16_t;

Codeword rotate_cw(Codeword w);
Codeword rotate_cw(Codeword w, int quarter_turns);
int hamming(Codeword a, Codeword b);
/// min over k of hamming(a, rotate_cw(b, k)).
int rotational_distance(Codeword a, Codeword b);
/// min over k in 1..3 of hamming(w, rotate_cw(w, k)).
int self_rotation_distance(Codeword w);

/// Greedy selection over a seeded shuffle of all 16-bit words; a pass that
/// ends with fewer than 16 words is restarted with a fresh shuffle from the
/// same stream.
std::array<Codeword, kDictionarySize> generate_dm16_dictionary(std::uint64_t seed = 42);
const std::array<Codeword, kDictionarySize>& dm16_dictionary();

struct CodeMatch {
  int id = 0;
  int rotation = 0;
  int errors = 0;
};

std::optional<CodeMatch> match_codeword(Codeword observed, int max_errors = 1);

struct TokenDetection {
  TokenId id = TokenId::MoveUp;
  Vec2 center;  // mm
  int rotation = 0;
};

struct MarkerOptions {
  double mm_per_pixel = 0.5;
  int min_cell_px = 2;
  int max_bit_errors = 1;
};

/// Finds axis-aligned DM-16 markers. Squares that fail the border check or
/// sit farther than max_bit_errors from every codeword are skipped.
std::vector<TokenDetection> decode_markers(const Raster& r, const MarkerOptions& opts = {});

/// Draws a marker with its top-left corner at pixel (x0, y0). flip_mask is
/// XOR-ed onto the printed payload (after rotation) to inject bit errors.
void draw_marker(Raster& r, Codeword canonical, int x0, int y0, int cell_px, int rotation,
                 Codeword flip_mask = 0);

}  // namespace dm::vision
