#pragma once

#include <cmath>

namespace tg {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
  Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
  Vec2 operator*(double s) const { return {x * s, y * s}; }
  Vec2 operator/(double s) const { return {x / s, y / s}; }
  Vec2& operator+=(Vec2 o) { x += o.x; y += o.y; return *this; }

  double dot(Vec2 o) const { return x * o.x + y * o.y; }
  double norm2() const { return x * x + y * y; }
  double norm() const { return std::sqrt(norm2()); }
  Vec2 normalized() const {
    double n = norm();
    return n > 0.0 ? Vec2{x / n, y / n} : Vec2{0.0, 0.0};
  }
  /// Counter-clockwise perpendicular.
  Vec2 perp() const { return {-y, x}; }
};

inline Vec2 operator*(double s, Vec2 v) { return {v.x * s, v.y * s}; }

/// Symmetric 2x2 matrix [[xx, xy], [xy, yy]].
struct SymMat2 {
  double xx = 0.0;
  double xy = 0.0;
  double yy = 0.0;

  double det() const { return xx * yy - xy * xy; }
  double trace() const { return xx + yy; }

  double min_eigenvalue() const {
    double h = 0.5 * (xx + yy);
    double r = std::sqrt(0.25 * (xx - yy) * (xx - yy) + xy * xy);
    return h - r;
  }
  double max_eigenvalue() const {
    double h = 0.5 * (xx + yy);
    double r = std::sqrt(0.25 * (xx - yy) * (xx - yy) + xy * xy);
    return h + r;
  }

  bool positive_definite() const { return xx > 0.0 && det() > 0.0; }

  /// Unit eigenvector for the largest eigenvalue. For (near-)isotropic
  /// matrices the direction is arbitrary; (1, 0) is returned.
  Vec2 principal_axis() const {
    double lam = max_eigenvalue();
    Vec2 a{xy, lam - xx};
    Vec2 b{lam - yy, xy};
    Vec2 v = a.norm2() >= b.norm2() ? a : b;
    double n = v.norm();
    if (n <= 1e-12 * (std::fabs(lam) + 1.0)) return {1.0, 0.0};
    return v / n;
  }

  SymMat2 operator+(SymMat2 o) const { return {xx + o.xx, xy + o.xy, yy + o.yy}; }
  SymMat2 operator*(double s) const { return {xx * s, xy * s, yy * s}; }
};

}  // namespace tg
