#pragma once

#include <cmath>

namespace superdiff {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  constexpr Vec2& operator+=(Vec2 o) noexcept { x += o.x; y += o.y; return *this; }
  constexpr Vec2& operator-=(Vec2 o) noexcept { x -= o.x; y -= o.y; return *this; }
  constexpr Vec2& operator*=(double s) noexcept { x *= s; y *= s; return *this; }

  friend constexpr Vec2 operator+(Vec2 a, Vec2 b) noexcept { return {a.x + b.x, a.y + b.y}; }
  friend constexpr Vec2 operator-(Vec2 a, Vec2 b) noexcept { return {a.x - b.x, a.y - b.y}; }
  friend constexpr Vec2 operator-(Vec2 a) noexcept { return {-a.x, -a.y}; }
  friend constexpr Vec2 operator*(double s, Vec2 a) noexcept { return {s * a.x, s * a.y}; }
  friend constexpr Vec2 operator*(Vec2 a, double s) noexcept { return {s * a.x, s * a.y}; }
  friend constexpr bool operator==(Vec2 a, Vec2 b) noexcept = default;
};

constexpr double dot(Vec2 a, Vec2 b) noexcept { return a.x * b.x + a.y * b.y; }
constexpr double cross(Vec2 a, Vec2 b) noexcept { return a.x * b.y - a.y * b.x; }
inline double norm(Vec2 a) noexcept { return std::hypot(a.x, a.y); }
/// Counterclockwise quarter turn.
constexpr Vec2 perp(Vec2 a) noexcept { return {-a.y, a.x}; }

struct Vec2i {
  long long x = 0;
  long long y = 0;

  constexpr Vec2i& operator+=(Vec2i o) noexcept { x += o.x; y += o.y; return *this; }
  friend constexpr Vec2i operator+(Vec2i a, Vec2i b) noexcept { return {a.x + b.x, a.y + b.y}; }
  friend constexpr Vec2i operator-(Vec2i a, Vec2i b) noexcept { return {a.x - b.x, a.y - b.y}; }
  friend constexpr Vec2i operator-(Vec2i a) noexcept { return {-a.x, -a.y}; }
  friend constexpr bool operator==(Vec2i a, Vec2i b) noexcept = default;
};

constexpr Vec2 to_real(Vec2i v) noexcept {
  return {static_cast<double>(v.x), static_cast<double>(v.y)};
}

/// Small symmetric-or-not 2x2 matrix; d = 1 quantities live in xx.
struct Mat2 {
  double xx = 0.0;
  double xy = 0.0;
  double yx = 0.0;
  double yy = 0.0;

  friend constexpr Mat2 operator*(double s, const Mat2& m) noexcept {
    return {s * m.xx, s * m.xy, s * m.yx, s * m.yy};
  }
  friend constexpr Mat2 operator*(const Mat2& a, const Mat2& b) noexcept {
    return {a.xx * b.xx + a.xy * b.yx, a.xx * b.xy + a.xy * b.yy,
            a.yx * b.xx + a.yy * b.yx, a.yx * b.xy + a.yy * b.yy};
  }
  friend constexpr bool operator==(const Mat2& a, const Mat2& b) noexcept = default;

  static constexpr Mat2 identity() noexcept { return {1.0, 0.0, 0.0, 1.0}; }
};

/// Spectral norm: largest singular value.
inline double operator_norm(const Mat2& m) noexcept {
  const double a = m.xx * m.xx + m.yx * m.yx;
  const double b = m.xx * m.xy + m.yx * m.yy;
  const double d = m.xy * m.xy + m.yy * m.yy;
  const double half_trace = 0.5 * (a + d);
  const double gap = std::hypot(0.5 * (a - d), b);
  return std::sqrt(half_trace + gap);
}

}  // namespace superdiff
