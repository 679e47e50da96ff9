// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <random>

namespace dm {

// Counted, platform-stable random stream. Only the raw mt19937_64 output is
// used (its sequence is fixed by the standard); all distributions are
// implemented here so every draw is reproducible from (seed, draws).
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0) : seed_(seed), engine_(seed) {}

  std::uint64_t next() {
    ++draws_;
    return engine_();
  }

  /// Uniform integer in [lo, hi], rejection-sampled.
  int uniform_int(int lo, int hi);
  /// Uniform double in [0, 1) from 53 bits of one draw.
  double uniform01();
  /// Standard normal via Box-Muller; always consumes exactly two draws.
  double normal();

  /// Skips `n` draws.
  void advance(std::uint64_t n) {
    engine_.discard(n);
    draws_ += n;
  }

  std::uint64_t seed() const { return seed_; }
  std::uint64_t draws() const { return draws_; }

  /// Rebuilds the stream positioned after `draws` draws from `seed`.
  static Rng restore(std::uint64_t seed, std::uint64_t draws) {
    Rng r(seed);
    r.advance(draws);
    return r;
  }

  friend bool operator==(const Rng& a, const Rng& b) {
    return a.seed_ == b.seed_ && a.draws_ == b.draws_ && a.engine_ == b.engine_;
  }

 private:
  std::uint64_t seed_;
  std::uint64_t draws_ = 0;
  std::mt19937_64 engine_;
};

}  // namespace dm
