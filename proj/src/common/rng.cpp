// SPDX-License-Identifier: Apache-2.0
#include "dm/common/rng.hpp"

#include <cmath>
#include <stdexcept>

#include "dm/common/geometry.hpp"

namespace dm {

int Rng::uniform_int(int lo, int hi) {
  if (hi < lo) throw std::invalid_argument("uniform_int: empty range");
  const auto range = static_cast<std::uint64_t>(static_cast<std::int64_t>(hi) - lo) + 1;
  // 2^64 mod range; values at or above it form whole multiples of range.
  const std::uint64_t threshold = (0 - range) % range;
  for (;;) {
    const std::uint64_t x = next();
    if (x >= threshold) return lo + static_cast<int>(x % range);
  }
}

double Rng::uniform01() {
  return static_cast<double>(next() >> 11) * 0x1.0p-53;
}

double Rng::normal() {
  // 1 - u keeps the log argument in (0, 1].
  const double u1 = 1.0 - uniform01();
  const double u2 = uniform01();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * kPi * u2);
}

}  // namespace dm
