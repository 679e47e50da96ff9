// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>

namespace dm {

/// Planar point or vector in millimeters (plate or machine frame).
struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  friend constexpr Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
  friend constexpr Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
  friend constexpr Vec2 operator*(Vec2 a, double s) { return {a.x * s, a.y * s}; }
  friend constexpr Vec2 operator*(double s, Vec2 a) { return {a.x * s, a.y * s}; }
  friend constexpr bool operator==(Vec2 a, Vec2 b) = default;
};

inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Vec2 a) { return std::hypot(a.x, a.y); }
inline double distance(Vec2 a, Vec2 b) { return norm(a - b); }

/// Counter-clockwise rotation by `radians` (in the frame's own handedness).
inline Vec2 rotate(Vec2 v, double radians) {
  const double c = std::cos(radians);
  const double s = std::sin(radians);
  return {c * v.x - s * v.y, s * v.x + c * v.y};
}

inline constexpr double kPi = 3.14159265358979323846;
inline double deg_to_rad(double deg) { return deg * kPi / 180.0; }
inline double rad_to_deg(double rad) { return rad * 180.0 / kPi; }

/// Rigid planar pose: position plus heading in degrees.
struct Pose {
  double x = 0.0;
  double y = 0.0;
  double theta_deg = 0.0;

  Vec2 position() const { return {x, y}; }
  /// Maps a point from the body frame into the world frame.
  Vec2 to_world(Vec2 local) const { return position() + rotate(local, deg_to_rad(theta_deg)); }
  friend bool operator==(const Pose&, const Pose&) = default;
};

}  // namespace dm
