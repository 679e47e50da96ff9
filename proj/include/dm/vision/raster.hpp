// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace dm::vision {

/// Binary plate image, row-major, 1 = dark/ink, 0 = background.
class Raster {
 public:
  Raster(int width, int height);
  Raster(int width, int height, std::vector<std::uint8_t> bits);

  int width() const { return width_; }
  int height() const { return height_; }
  std::span<const std::uint8_t> bits() const { return bits_; }
  std::span<std::uint8_t> bits() { return bits_; }

  bool in_bounds(int x, int y) const { return x >= 0 && y >= 0 && x < width_ && y < height_; }
  std::uint8_t at(int x, int y) const { return bits_[index(x, y)]; }
  /// Out-of-bounds reads as background.
  std::uint8_t get(int x, int y) const { return in_bounds(x, y) ? at(x, y) : 0; }
  void set(int x, int y, std::uint8_t v) { bits_[index(x, y)] = v ? 1 : 0; }
  void fill_rect(int x0, int y0, int x1, int y1, std::uint8_t v);

  std::size_t count_dark() const;

  friend bool operator==(const Raster&, const Raster&) = default;

 private:
  std::size_t index(int x, int y) const {
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) + static_cast<std::size_t>(x);
  }

  int width_;
  int height_;
  std::vector<std::uint8_t> bits_;
};

// PGM (P5) I/O. Pixels darker than half of maxval read as ink; ink is written as 0.
Raster read_pgm(std::istream& in);
Raster read_pgm(std::span<const std::uint8_t> bytes);
Raster read_pgm_file(const std::string& path);
void write_pgm(std::ostream& out, const Raster& r);
std::vector<std::uint8_t> encode_pgm(const Raster& r);
void write_pgm_file(const std::string& path, const Raster& r);

/// Raw bitmap: width*height bytes, any nonzero byte is ink.
Raster from_raw(int width, int height, std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> to_raw(const Raster& r);

}  // namespace dm::vision
