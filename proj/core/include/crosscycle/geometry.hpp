#pragma once

#include <cmath>
#include <string_view>

namespace crosscycle {

enum class Side { Left, Right };

[[nodiscard]] constexpr std::string_view to_string(Side s) noexcept {
  return s == Side::Right ? "right" : "left";
}

[[nodiscard]] constexpr Side opposite(Side s) noexcept {
  return s == Side::Right ? Side::Left : Side::Right;
}

/// +1 for the right half plane, -1 for the left one.
[[nodiscard]] constexpr double side_sign(Side s) noexcept { return s == Side::Right ? 1.0 : -1.0; }

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  constexpr Vec2& operator+=(Vec2 o) noexcept {
    x += o.x;
    y += o.y;
    return *this;
  }
  friend constexpr Vec2 operator+(Vec2 a, Vec2 b) noexcept { return {a.x + b.x, a.y + b.y}; }
  friend constexpr Vec2 operator-(Vec2 a, Vec2 b) noexcept { return {a.x - b.x, a.y - b.y}; }
  friend constexpr Vec2 operator*(double s, Vec2 a) noexcept { return {s * a.x, s * a.y}; }
  friend constexpr bool operator==(Vec2, Vec2) = default;
};

[[nodiscard]] inline double norm(Vec2 v) noexcept { return std::hypot(v.x, v.y); }

/// Row-major 2x2 matrix.
struct Mat2 {
  double a11 = 0.0, a12 = 0.0;
  double a21 = 0.0, a22 = 0.0;

  [[nodiscard]] constexpr double trace() const noexcept { return a11 + a22; }
  [[nodiscard]] constexpr double det() const noexcept { return a11 * a22 - a12 * a21; }
  friend constexpr Vec2 operator*(const Mat2& m, Vec2 v) noexcept {
    return {m.a11 * v.x + m.a12 * v.y, m.a21 * v.x + m.a22 * v.y};
  }
  friend constexpr bool operator==(const Mat2&, const Mat2&) = default;
};

}  // namespace crosscycle
