#pragma once

#include <array>
#include <cmath>

namespace indi {

/// 3-component vector. Units are given by context (m, m/s, m/s^2, rad/s, N, ...).
/// NED convention throughout: x north, y east, z down.
struct Vec3 {
  double x{0.0}, y{0.0}, z{0.0};

  constexpr Vec3() = default;
  constexpr Vec3(double x_, double y_, double z_) : x(x_), y(y_), z(z_) {}

  constexpr Vec3 operator+(const Vec3& v) const { return {x + v.x, y + v.y, z + v.z}; }
  constexpr Vec3 operator-(const Vec3& v) const { return {x - v.x, y - v.y, z - v.z}; }
  constexpr Vec3 operator-() const { return {-x, -y, -z}; }
  constexpr Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
  constexpr Vec3 operator/(double s) const { return {x / s, y / s, z / s}; }

  Vec3& operator+=(const Vec3& v) {
    x += v.x;
    y += v.y;
    z += v.z;
    return *this;
  }
  Vec3& operator-=(const Vec3& v) {
    x -= v.x;
    y -= v.y;
    z -= v.z;
    return *this;
  }
  Vec3& operator*=(double s) {
    x *= s;
    y *= s;
    z *= s;
    return *this;
  }

  constexpr double dot(const Vec3& v) const { return x * v.x + y * v.y + z * v.z; }
  constexpr Vec3 cross(const Vec3& v) const {
    return {y * v.z - z * v.y, z * v.x - x * v.z, x * v.y - y * v.x};
  }

  double norm() const { return std::sqrt(x * x + y * y + z * z); }
  constexpr double norm_squared() const { return x * x + y * y + z * z; }

  bool finite() const { return std::isfinite(x) && std::isfinite(y) && std::isfinite(z); }

  double operator[](int i) const { return i == 0 ? x : (i == 1 ? y : z); }
};

constexpr inline Vec3 operator*(double s, const Vec3& v) { return v * s; }

/// Rotor-indexed quantity (speeds, commands, increments).
using Vec4 = std::array<double, 4>;

constexpr inline Vec4 operator+(const Vec4& a, const Vec4& b) {
  return {a[0] + b[0], a[1] + b[1], a[2] + b[2], a[3] + b[3]};
}
constexpr inline Vec4 operator-(const Vec4& a, const Vec4& b) {
  return {a[0] - b[0], a[1] - b[1], a[2] - b[2], a[3] - b[3]};
}
constexpr inline Vec4 operator*(const Vec4& a, double s) {
  return {a[0] * s, a[1] * s, a[2] * s, a[3] * s};
}

inline bool finite(const Vec4& a) {
  return std::isfinite(a[0]) && std::isfinite(a[1]) && std::isfinite(a[2]) && std::isfinite(a[3]);
}

/// Backward difference quotient, (current - previous) / dt.
inline double finite_difference(double current, double previous, double dt) {
  return (current - previous) / dt;
}

inline Vec3 finite_difference(const Vec3& current, const Vec3& previous, double dt) {
  return (current - previous) / dt;
}

inline Vec4 finite_difference(const Vec4& current, const Vec4& previous, double dt) {
  return (current - previous) * (1.0 / dt);
}

constexpr double kGravity = 9.81;  // m/s^2, NED +down

}  // namespace indi
