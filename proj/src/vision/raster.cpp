// SPDX-License-Identifier: Apache-2.0
#include "dm/vision/raster.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

#include "dm/common/error.hpp"

namespace dm::vision {

Raster::Raster(int width, int height) : Raster(width, height, {}) {}

Raster::Raster(int width, int height, std::vector<std::uint8_t> bits)
    : width_(width), height_(height), bits_(std::move(bits)) {
  if (width <= 0 || height <= 0) throw Error(ErrorCode::BadPgm, "raster dimensions must be positive");
  const auto n = static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
  if (bits_.empty()) bits_.assign(n, 0);
  if (bits_.size() != n) throw Error(ErrorCode::BadPgm, "raster bit count does not match width*height");
  for (auto& b : bits_) b = b ? 1 : 0;
}

void Raster::fill_rect(int x0, int y0, int x1, int y1, std::uint8_t v) {
  x0 = std::max(x0, 0);
  y0 = std::max(y0, 0);
  x1 = std::min(x1, width_);
  y1 = std::min(y1, height_);
  for (int y = y0; y < y1; ++y) {
    for (int x = x0; x < x1; ++x) set(x, y, v);
  }
}

std::size_t Raster::count_dark() const {
  return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), std::uint8_t{1}));
}

namespace {

// Reads the next header token, skipping whitespace and '#' comments.
std::string next_token(std::istream& in) {
  std::string tok;
  int c = in.get();
  for (;;) {
    while (c != EOF && std::isspace(c)) c = in.get();
    if (c == '#') {
      while (c != EOF && c != '\n') c = in.get();
      continue;
    }
    break;
  }
  while (c != EOF && !std::isspace(c)) {
    tok += static_cast<char>(c);
    c = in.get();
  }
  if (tok.empty()) throw Error(ErrorCode::BadPgm, "truncated header");
  return tok;
}

int parse_positive(const std::string& tok, const char* what) {
  int v = 0;
  try {
    std::size_t used = 0;
    v = std::stoi(tok, &used);
    if (used != tok.size()) throw std::invalid_argument(tok);
  } catch (const std::exception&) {
    throw Error(ErrorCode::BadPgm, std::string("bad ") + what);
  }
  if (v <= 0) throw Error(ErrorCode::BadPgm, std::string("non-positive ") + what);
  return v;
}

}  // namespace

Raster read_pgm(std::istream& in) {
  if (next_token(in) != "P5") throw Error(ErrorCode::BadPgm, "not a P5 file");
  const int w = parse_positive(next_token(in), "width");
  const int h = parse_positive(next_token(in), "height");
  const int maxval = parse_positive(next_token(in), "maxval");
  if (maxval > 65535) throw Error(ErrorCode::BadPgm, "maxval out of range");
  // next_token consumed the single whitespace byte after maxval.
  const int bytes_per_px = maxval < 256 ? 1 : 2;
  const auto n = static_cast<std::size_t>(w) * static_cast<std::size_t>(h);
  std::vector<char> data(n * bytes_per_px);
  in.read(data.data(), static_cast<std::streamsize>(data.size()));
  if (static_cast<std::size_t>(in.gcount()) != data.size()) throw Error(ErrorCode::BadPgm, "truncated pixel data");
  std::vector<std::uint8_t> bits(n);
  const int half = (maxval + 1) / 2;
  for (std::size_t i = 0; i < n; ++i) {
    int v = 0;
    if (bytes_per_px == 1) {
      v = static_cast<unsigned char>(data[i]);
    } else {
      v = (static_cast<unsigned char>(data[2 * i]) << 8) | static_cast<unsigned char>(data[2 * i + 1]);
    }
    bits[i] = v < half ? 1 : 0;
  }
  return Raster(w, h, std::move(bits));
}

Raster read_pgm(std::span<const std::uint8_t> bytes) {
  std::string s(reinterpret_cast<const char*>(bytes.data()), bytes.size());
  std::istringstream in(s);
  return read_pgm(in);
}

Raster read_pgm_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path);
  return read_pgm(in);
}

void write_pgm(std::ostream& out, const Raster& r) {
  const auto bytes = encode_pgm(r);
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

std::vector<std::uint8_t> encode_pgm(const Raster& r) {
  const std::string header = "P5\n" + std::to_string(r.width()) + " " + std::to_string(r.height()) + "\n255\n";
  std::vector<std::uint8_t> out(header.begin(), header.end());
  out.reserve(out.size() + r.bits().size());
  for (std::uint8_t b : r.bits()) out.push_back(b ? 0 : 255);
  return out;
}

void write_pgm_file(const std::string& path, const Raster& r) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path);
  write_pgm(out, r);
}

Raster from_raw(int width, int height, std::span<const std::uint8_t> bytes) {
  return Raster(width, height, std::vector<std::uint8_t>(bytes.begin(), bytes.end()));
}

std::vector<std::uint8_t> to_raw(const Raster& r) {
  return {r.bits().begin(), r.bits().end()};
}

}  // namespace dm::vision
