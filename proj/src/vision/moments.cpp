// SPDX-License-Identifier: Apache-2.0
#include "dm/vision/moments.hpp"

#include <cmath>
#include <vector>

#include "dm/common/error.hpp"

namespace dm::vision {

RawMoments polygon_moments(std::span<const Vec2> points) {
  RawMoments m;
  const std::size_t n = points.size();
  for (std::size_t i = 0; i < n; ++i) {
    const double x0 = points[i].x, y0 = points[i].y;
    const double x1 = points[(i + 1) % n].x, y1 = points[(i + 1) % n].y;
    const double a = x0 * y1 - x1 * y0;
    m.m00 += a;
    m.m10 += a * (x0 + x1);
    m.m01 += a * (y0 + y1);
    m.m20 += a * (x0 * x0 + x0 * x1 + x1 * x1);
    m.m02 += a * (y0 * y0 + y0 * y1 + y1 * y1);
    m.m11 += a * (x0 * y1 + 2 * x0 * y0 + 2 * x1 * y1 + x1 * y0);
    m.m30 += a * (x0 * x0 * x0 + x0 * x0 * x1 + x0 * x1 * x1 + x1 * x1 * x1);
    m.m03 += a * (y0 * y0 * y0 + y0 * y0 * y1 + y0 * y1 * y1 + y1 * y1 * y1);
    m.m21 += a * (x0 * x0 * (3 * y0 + y1) + 2 * x0 * x1 * (y0 + y1) + x1 * x1 * (y0 + 3 * y1));
    m.m12 += a * (y0 * y0 * (3 * x0 + x1) + 2 * y0 * y1 * (x0 + x1) + y1 * y1 * (x0 + 3 * x1));
  }
  m.m00 /= 2;
  m.m10 /= 6;
  m.m01 /= 6;
  m.m20 /= 12;
  m.m02 /= 12;
  m.m11 /= 24;
  m.m30 /= 20;
  m.m03 /= 20;
  m.m21 /= 60;
  m.m12 /= 60;
  return m;
}

HuVector hu_from_raw(const RawMoments& raw) {
  RawMoments m = raw;
  if (m.m00 < 0) {
    for (double* v : {&m.m00, &m.m10, &m.m01, &m.m20, &m.m11, &m.m02, &m.m30, &m.m21, &m.m12, &m.m03}) *v = -*v;
  }
  const double cx = m.m10 / m.m00;
  const double cy = m.m01 / m.m00;
  const double mu20 = m.m20 - cx * m.m10;
  const double mu02 = m.m02 - cy * m.m01;
  const double mu11 = m.m11 - cx * m.m01;
  const double mu30 = m.m30 - 3 * cx * m.m20 + 2 * cx * cx * m.m10;
  const double mu03 = m.m03 - 3 * cy * m.m02 + 2 * cy * cy * m.m01;
  const double mu21 = m.m21 - 2 * cx * m.m11 - cy * m.m20 + 2 * cx * cx * m.m01;
  const double mu12 = m.m12 - 2 * cy * m.m11 - cx * m.m02 + 2 * cy * cy * m.m10;

  const double s2 = m.m00 * m.m00;               // m00^(1 + 2/2)
  const double s3 = s2 * std::sqrt(m.m00);       // m00^(1 + 3/2)
  const double n20 = mu20 / s2, n02 = mu02 / s2, n11 = mu11 / s2;
  const double n30 = mu30 / s3, n03 = mu03 / s3, n21 = mu21 / s3, n12 = mu12 / s3;

  const double t0 = n30 + n12;
  const double t1 = n21 + n03;
  const double q0 = n30 - 3 * n12;
  const double q1 = 3 * n21 - n03;

  HuVector hu;
  hu.h[0] = n20 + n02;
  hu.h[1] = (n20 - n02) * (n20 - n02) + 4 * n11 * n11;
  hu.h[2] = q0 * q0 + q1 * q1;
  hu.h[3] = t0 * t0 + t1 * t1;
  hu.h[4] = q0 * t0 * (t0 * t0 - 3 * t1 * t1) + q1 * t1 * (3 * t0 * t0 - t1 * t1);
  hu.h[5] = (n20 - n02) * (t0 * t0 - t1 * t1) + 4 * n11 * t0 * t1;
  hu.h[6] = q1 * t0 * (t0 * t0 - 3 * t1 * t1) - q0 * t1 * (3 * t0 * t0 - t1 * t1);
  return hu;
}

HuVector hu_moments(const Contour& c) {
  if (c.points.size() < 3) throw Error(ErrorCode::DegenerateContour, "contour needs >= 3 points");
  // Central moments are translation invariant; centering on the vertex mean
  // keeps the raw sums small.
  Vec2 mean{};
  for (Vec2 p : c.points) mean = mean + p;
  mean = mean * (1.0 / static_cast<double>(c.points.size()));
  std::vector<Vec2> local;
  local.reserve(c.points.size());
  for (Vec2 p : c.points) local.push_back(p - mean);
  const RawMoments m = polygon_moments(local);
  if (!(std::abs(m.m00) >= 1e-9)) throw Error(ErrorCode::DegenerateContour, "zero signed area");
  return hu_from_raw(m);
}

double match_hu(const HuVector& a, const HuVector& b, MirrorPolicy policy) {
  double sum = 0.0;
  for (std::size_t i = 0; i < 7; ++i) {
    double ha = a.h[i];
    double hb = b.h[i];
    if (std::abs(ha) < kHuEpsilon || std::abs(hb) < kHuEpsilon) continue;
    if (i == 6 && policy == MirrorPolicy::TolerateMirror) {
      ha = std::abs(ha);
      hb = std::abs(hb);
    }
    const double ma = (ha > 0 ? 1.0 : -1.0) * std::log10(std::abs(ha));
    const double mb = (hb > 0 ? 1.0 : -1.0) * std::log10(std::abs(hb));
    if (ma == 0.0 || mb == 0.0) continue;  // |h| == 1 has no finite reciprocal
    sum += std::abs(1.0 / ma - 1.0 / mb);
  }
  return sum;
}

double match_shapes(const Contour& a, const Contour& b, MirrorPolicy policy) {
  return match_hu(hu_moments(a), hu_moments(b), policy);
}

}  // namespace dm::vision
