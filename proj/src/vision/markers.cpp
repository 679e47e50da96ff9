// SPDX-License-Identifier: Apache-2.0
#include "dm/vision/markers.hpp"

#include <algorithm>
#include <bit>
#include <numeric>

#include "dm/common/rng.hpp"
#include "dm/vision/kernels.hpp"

namespace dm::vision {

namespace {

constexpr std::array<std::string_view, kDictionarySize> kTokenNames = {
    "MOVE_UP",    "MOVE_DOWN",  "MOVE_LEFT",  "MOVE_RIGHT", "AGGRESSIVE", "DEFENSIVE",
    "DECEITFUL",  "CONFIRM",    "RESERVED_8", "RESERVED_9", "RESERVED_10", "RESERVED_11",
    "RESERVED_12", "RESERVED_13", "RESERVED_14", "RESERVED_15"};

inline int bit_index(int r, int c) { return 15 - (4 * r + c); }
inline int get_bit(Codeword w, int r, int c) { return (w >> bit_index(r, c)) & 1; }

}  // namespace

std::string_view to_string(TokenId id) { return kTokenNames[static_cast<std::size_t>(id)]; }

std::optional<TokenId> token_from_string(std::string_view s) {
  for (std::size_t i = 0; i < kTokenNames.size(); ++i) {
    if (kTokenNames[i] == s) return static_cast<TokenId>(i);
  }
  // Short aliases for scripts.
  if (s == "UP") return TokenId::MoveUp;
  if (s == "DOWN") return TokenId::MoveDown;
  if (s == "LEFT") return TokenId::MoveLeft;
  if (s == "RIGHT") return TokenId::MoveRight;
  return std::nullopt;
}

Codeword rotate_cw(Codeword w) {
  Codeword out = 0;
  for (int r = 0; r < 4; ++r) {
    for (int c = 0; c < 4; ++c) {
      // Rotated cell (r, c) comes from source cell (3 - c, r).
      if (get_bit(w, 3 - c, r)) out |= static_cast<Codeword>(1u << bit_index(r, c));
    }
  }
  return out;
}

Codeword rotate_cw(Codeword w, int quarter_turns) {
  quarter_turns = ((quarter_turns % 4) + 4) % 4;
  for (int i = 0; i < quarter_turns; ++i) w = rotate_cw(w);
  return w;
}

int hamming(Codeword a, Codeword b) { return std::popcount(static_cast<unsigned>(a ^ b)); }

int rotational_distance(Codeword a, Codeword b) {
  int best = 16;
  for (int k = 0; k < 4; ++k) best = std::min(best, hamming(a, rotate_cw(b, k)));
  return best;
}

int self_rotation_distance(Codeword w) {
  int best = 16;
  for (int k = 1; k < 4; ++k) best = std::min(best, hamming(w, rotate_cw(w, k)));
  return best;
}

std::array<Codeword, kDictionarySize> generate_dm16_dictionary(std::uint64_t seed) {
  Rng rng(seed);
  std::vector<Codeword> candidates(1u << 16);
  for (;;) {
    std::iota(candidates.begin(), candidates.end(), Codeword{0});
    // Fisher-Yates driven by the counted stream (std::shuffle is not portable).
    for (int i = static_cast<int>(candidates.size()) - 1; i > 0; --i) {
      std::swap(candidates[static_cast<std::size_t>(i)], candidates[static_cast<std::size_t>(rng.uniform_int(0, i))]);
    }
    std::vector<Codeword> chosen;
    for (Codeword w : candidates) {
      if (self_rotation_distance(w) < kMinRotationalDistance) continue;
      const bool far = std::all_of(chosen.begin(), chosen.end(), [w](Codeword d) {
        return rotational_distance(d, w) >= kMinRotationalDistance;
      });
      if (!far) continue;
      chosen.push_back(w);
      if (chosen.size() == kDictionarySize) break;
    }
    if (chosen.size() == kDictionarySize) {
      std::array<Codeword, kDictionarySize> out{};
      std::copy(chosen.begin(), chosen.end(), out.begin());
      return out;
    }
  }
}

const std::array<Codeword, kDictionarySize>& dm16_dictionary() {
  static const auto dict = generate_dm16_dictionary(42);
  return dict;
}

std::optional<CodeMatch> match_codeword(Codeword observed, int max_errors) {
  const auto& dict = dm16_dictionary();
  std::optional<CodeMatch> best;
  for (int id = 0; id < kDictionarySize; ++id) {
    for (int k = 0; k < 4; ++k) {
      const int e = hamming(observed, rotate_cw(dict[static_cast<std::size_t>(id)], k));
      if (e <= max_errors && (!best || e < best->errors)) best = CodeMatch{id, k, e};
    }
  }
  return best;
}

void draw_marker(Raster& r, Codeword canonical, int x0, int y0, int cell_px, int rotation, Codeword flip_mask) {
  const Codeword printed = static_cast<Codeword>(rotate_cw(canonical, rotation) ^ flip_mask);
  for (int gr = 0; gr < kMarkerCells; ++gr) {
    for (int gc = 0; gc < kMarkerCells; ++gc) {
      const bool border = gr == 0 || gc == 0 || gr == kMarkerCells - 1 || gc == kMarkerCells - 1;
      const bool dark = border || get_bit(printed, gr - 1, gc - 1);
      r.fill_rect(x0 + gc * cell_px, y0 + gr * cell_px, x0 + (gc + 1) * cell_px, y0 + (gr + 1) * cell_px,
                  dark ? 1 : 0);
    }
  }
}

namespace {

bool contains(const ComponentStats& outer, const ComponentStats& inner) {
  return outer.label != inner.label && inner.min_x >= outer.min_x && inner.max_x <= outer.max_x &&
         inner.min_y >= outer.min_y && inner.max_y <= outer.max_y;
}

// Majority vote over the central half of a cell.
int sample_cell(const Raster& r, const ComponentStats& s, double cw, double ch, int gr, int gc) {
  const int xa = s.min_x + static_cast<int>(std::floor((gc + 0.25) * cw));
  const int xb = s.min_x + static_cast<int>(std::ceil((gc + 0.75) * cw));
  const int ya = s.min_y + static_cast<int>(std::floor((gr + 0.25) * ch));
  const int yb = s.min_y + static_cast<int>(std::ceil((gr + 0.75) * ch));
  int dark = 0, total = 0;
  for (int y = ya; y < yb; ++y) {
    for (int x = xa; x < xb; ++x) {
      dark += r.get(x, y);
      ++total;
    }
  }
  return 2 * dark > total ? 1 : 0;
}

}  // namespace

std::vector<TokenDetection> decode_markers(const Raster& r, const MarkerOptions& opts) {
  const Components comps = label_components(r);
  std::vector<const ComponentStats*> squares;
  for (const auto& s : comps.stats) {
    const int w = s.bbox_width();
    const int h = s.bbox_height();
    if (w < kMarkerCells * opts.min_cell_px || h < kMarkerCells * opts.min_cell_px) continue;
    if (std::abs(w - h) > std::max(1, w / 10)) continue;
    squares.push_back(&s);
  }
  std::vector<TokenDetection> out;
  for (const ComponentStats* s : squares) {
    const bool nested = std::any_of(squares.begin(), squares.end(),
                                    [s](const ComponentStats* o) { return contains(*o, *s); });
    if (nested) continue;
    const double cw = s->bbox_width() / static_cast<double>(kMarkerCells);
    const double ch = s->bbox_height() / static_cast<double>(kMarkerCells);
    bool border_ok = true;
    Codeword payload = 0;
    for (int gr = 0; gr < kMarkerCells && border_ok; ++gr) {
      for (int gc = 0; gc < kMarkerCells; ++gc) {
        const int bit = sample_cell(r, *s, cw, ch, gr, gc);
        const bool border = gr == 0 || gc == 0 || gr == kMarkerCells - 1 || gc == kMarkerCells - 1;
        if (border) {
          if (!bit) { border_ok = false; break; }
        } else if (bit) {
          payload |= static_cast<Codeword>(1u << bit_index(gr - 1, gc - 1));
        }
      }
    }
    if (!border_ok) continue;
    const auto m = match_codeword(payload, opts.max_bit_errors);
    if (!m) continue;
    const double cx = (s->min_x + s->max_x + 1) * 0.5 * opts.mm_per_pixel;
    const double cy = (s->min_y + s->max_y + 1) * 0.5 * opts.mm_per_pixel;
    out.push_back({static_cast<TokenId>(m->id), {cx, cy}, m->rotation});
  }
  return out;
}

}  // namespace dm::vision
