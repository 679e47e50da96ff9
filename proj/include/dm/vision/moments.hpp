// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <span>

#include "dm/common/geometry.hpp"
#include "dm/vision/contour.hpp"

namespace dm::vision {

/// Raw area moments m_pq of a filled polygon, up to third order.
struct RawMoments {
  double m00 = 0, m10 = 0, m01 = 0;
  double m20 = 0, m11 = 0, m02 = 0;
  double m30 = 0, m21 = 0, m12 = 0, m03 = 0;
};

/// Exact moments of the filled polygon via Green's theorem. Orientation is
/// preserved: clockwise input yields negated moments.
RawMoments polygon_moments(std::span<const Vec2> points);

/// The seven classical moment invariants.
struct HuVector {
  std::array<double, 7> h{};

  double operator[](std::size_t i) const { return h[i]; }
};

/// Hu invariants of the filled contour; throws DegenerateContour if
/// |signed area| < 1e-9 mm^2.
HuVector hu_moments(const Contour& c);

/// Hu invariants from raw moments (orientation-normalized internally).
HuVector hu_from_raw(const RawMoments& m);

enum class MirrorPolicy {
  Strict,          // m_7 keeps its sign: a mirrored shape scores > 0
  TolerateMirror,  // m_7 uses |h_7|, so mirror images match
};

/// I1 log-moment distance: sum_i |1/m_i(a) - 1/m_i(b)| with
/// m_i = sign(h_i) * log10|h_i|, skipping terms where either |h_i| < 1e-12.
double match_hu(const HuVector& a, const HuVector& b, MirrorPolicy policy = MirrorPolicy::Strict);
double match_shapes(const Contour& a, const Contour& b, MirrorPolicy policy = MirrorPolicy::Strict);

inline constexpr double kHuEpsilon = 1e-12;

}  // namespace dm::vision
