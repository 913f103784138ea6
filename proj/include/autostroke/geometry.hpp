#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <vector>

namespace autostroke {

// Canvas convention: origin top-left, x to the right, y down. Angles and
// rotations are plain 2x2 matrix algebra on (x, y); a positive angle turns +x
// toward +y, which reads as counter-clockwise once the y axis is flipped up.

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  constexpr Vec2& operator+=(Vec2 o) { x += o.x; y += o.y; return *this; }
  constexpr Vec2& operator-=(Vec2 o) { x -= o.x; y -= o.y; return *this; }
  constexpr Vec2& operator*=(double s) { x *= s; y *= s; return *this; }
  constexpr Vec2& operator/=(double s) { x /= s; y /= s; return *this; }

  friend constexpr Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
  friend constexpr Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
  friend constexpr Vec2 operator-(Vec2 a) { return {-a.x, -a.y}; }
  friend constexpr Vec2 operator*(Vec2 a, double s) { return {a.x * s, a.y * s}; }
  friend constexpr Vec2 operator*(double s, Vec2 a) { return {a.x * s, a.y * s}; }
  friend constexpr Vec2 operator/(Vec2 a, double s) { return {a.x / s, a.y / s}; }
  friend constexpr bool operator==(Vec2 a, Vec2 b) = default;
};

constexpr double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
constexpr double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
constexpr double squared_norm(Vec2 a) { return dot(a, a); }
inline double norm(Vec2 a) { return std::hypot(a.x, a.y); }
inline double distance(Vec2 a, Vec2 b) { return norm(a - b); }
constexpr double squared_distance(Vec2 a, Vec2 b) { return squared_norm(a - b); }

/// Unit vector along `a`, or the zero vector when |a| < eps.
inline Vec2 normalized(Vec2 a, double eps = 1e-9) {
  const double n = norm(a);
  if (n < eps) return {};
  return a / n;
}

constexpr Vec2 perp(Vec2 a) { return {-a.y, a.x}; }

/// Proper 2D rotation stored as (cos, sin).
struct Rotation {
  double c = 1.0;
  double s = 0.0;

  static Rotation from_angle(double radians) { return {std::cos(radians), std::sin(radians)}; }

  /// Rotation taking +x onto the (unit) direction `d`; identity for a zero vector.
  static Rotation aligning_x_to(Vec2 d) {
    const Vec2 u = normalized(d);
    if (u == Vec2{}) return {};
    return {u.x, u.y};
  }

  /// Rotation taking direction `from` onto direction `to`.
  static Rotation between(Vec2 from, Vec2 to) {
    const Vec2 a = normalized(from);
    const Vec2 b = normalized(to);
    if (a == Vec2{} || b == Vec2{}) return {};
    return Rotation{dot(a, b), cross(a, b)}.renormalized();
  }

  Rotation renormalized() const {
    const double n = std::hypot(c, s);
    return n > 0 ? Rotation{c / n, s / n} : Rotation{};
  }

  constexpr Vec2 apply(Vec2 v) const { return {c * v.x - s * v.y, s * v.x + c * v.y}; }
  constexpr Vec2 apply_inverse(Vec2 v) const { return {c * v.x + s * v.y, -s * v.x + c * v.y}; }
  constexpr Rotation inverse() const { return {c, -s}; }
  constexpr Rotation operator*(Rotation o) const { return {c * o.c - s * o.s, s * o.c + c * o.s}; }
  constexpr double determinant() const { return c * c + s * s; }
  double angle() const { return std::atan2(s, c); }
};

/// Squared distance from `p` to segment [a, b].
inline double squared_distance_to_segment(Vec2 p, Vec2 a, Vec2 b) {
  const Vec2 ab = b - a;
  const double len2 = squared_norm(ab);
  if (len2 <= 0.0) return squared_distance(p, a);
  const double t = std::clamp(dot(p - a, ab) / len2, 0.0, 1.0);
  return squared_distance(p, a + ab * t);
}

/// Even-odd point-in-polygon test; the polygon is implicitly closed.
inline bool point_in_polygon(Vec2 p, std::span<const Vec2> poly) {
  bool inside = false;
  const std::size_t n = poly.size();
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const Vec2 a = poly[i];
    const Vec2 b = poly[j];
    if ((a.y > p.y) != (b.y > p.y)) {
      const double xcross = (b.x - a.x) * (p.y - a.y) / (b.y - a.y) + a.x;
      if (p.x < xcross) inside = !inside;
    }
  }
  return inside;
}

constexpr double kPi = 3.14159265358979323846;

}  // namespace autostroke
