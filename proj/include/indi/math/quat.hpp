#pragma once

#include <cmath>

#include "indi/errors.hpp"
#include "indi/math/mat3.hpp"
#include "indi/math/vec3.hpp"

namespace indi {

/// ZYX (yaw-pitch-roll) Euler angles, radians.
struct EulerAngles {
  double phi{0.0};    // roll
  double theta{0.0};  // pitch
  double psi{0.0};    // yaw
};

/// Unit quaternion, scalar-first, representing the body-to-NED rotation.
struct Quat {
  double w{1.0}, x{0.0}, y{0.0}, z{0.0};

  constexpr Quat() = default;
  constexpr Quat(double w_, double x_, double y_, double z_) : w(w_), x(x_), y(y_), z(z_) {}

  double norm() const { return std::sqrt(w * w + x * x + y * y + z * z); }

  Quat normalized() const {
    const double n = norm();
    return {w / n, x / n, y / n, z / n};
  }

  constexpr Quat conjugate() const { return {w, -x, -y, -z}; }

  /// Hamilton product.
  constexpr Quat operator*(const Quat& q) const {
    return {w * q.w - x * q.x - y * q.y - z * q.z,
            w * q.x + x * q.w + y * q.z - z * q.y,
            w * q.y - x * q.z + y * q.w + z * q.x,
            w * q.z + x * q.y - y * q.x + z * q.w};
  }

  constexpr Quat operator-() const { return {-w, -x, -y, -z}; }

  /// Vector (imaginary) part.
  constexpr Vec3 vec() const { return {x, y, z}; }

  bool finite() const {
    return std::isfinite(w) && std::isfinite(x) && std::isfinite(y) && std::isfinite(z);
  }
};

/// Body-to-NED rotation matrix of q. Requires unit norm within 1e-6.
inline Mat3 quat_to_rotation(const Quat& q) {
  if (std::abs(q.norm() - 1.0) > 1e-6) {
    throw ContractViolation("quat_to_rotation: quaternion norm deviates from 1 by > 1e-6");
  }
  Mat3 r;
  const double w = q.w, x = q.x, y = q.y, z = q.z;
  r.m[0][0] = 1.0 - 2.0 * (y * y + z * z);
  r.m[0][1] = 2.0 * (x * y - w * z);
  r.m[0][2] = 2.0 * (x * z + w * y);
  r.m[1][0] = 2.0 * (x * y + w * z);
  r.m[1][1] = 1.0 - 2.0 * (x * x + z * z);
  r.m[1][2] = 2.0 * (y * z - w * x);
  r.m[2][0] = 2.0 * (x * z - w * y);
  r.m[2][1] = 2.0 * (y * z + w * x);
  r.m[2][2] = 1.0 - 2.0 * (x * x + y * y);
  return r;
}

inline Quat quat_from_euler(const EulerAngles& e) {
  const double cr = std::cos(e.phi * 0.5), sr = std::sin(e.phi * 0.5);
  const double cp = std::cos(e.theta * 0.5), sp = std::sin(e.theta * 0.5);
  const double cy = std::cos(e.psi * 0.5), sy = std::sin(e.psi * 0.5);
  return {cr * cp * cy + sr * sp * sy,
          sr * cp * cy - cr * sp * sy,
          cr * sp * cy + sr * cp * sy,
          cr * cp * sy - sr * sp * cy};
}

/// Extracts ZYX Euler angles. Throws SingularAttitude when |theta| is within
/// 1e-6 rad of +-pi/2, where roll and yaw become indistinguishable.
inline EulerAngles euler_from_quat(const Quat& q) {
  constexpr double kHalfPi = 1.5707963267948966;
  const double sinp = 2.0 * (q.w * q.y - q.z * q.x);
  EulerAngles e;
  e.theta = std::abs(sinp) >= 1.0 ? std::copysign(kHalfPi, sinp) : std::asin(sinp);
  if (std::abs(e.theta) >= kHalfPi - 1e-6) {
    throw SingularAttitude("euler_from_quat: |theta| within 1e-6 of pi/2");
  }
  e.phi = std::atan2(2.0 * (q.w * q.x + q.y * q.z), 1.0 - 2.0 * (q.x * q.x + q.y * q.y));
  e.psi = std::atan2(2.0 * (q.w * q.z + q.x * q.y), 1.0 - 2.0 * (q.y * q.y + q.z * q.z));
  return e;
}

/// Shortest-arc error quaternion q^-1 (x) q_ref, sign-flipped so the scalar
/// part is non-negative. Its vector part drives the attitude PD.
inline Quat shortest_arc_error(const Quat& q_ref, const Quat& q) {
  Quat err = q.conjugate() * q_ref;
  if (err.w < 0.0) err = -err;
  return err;
}

/// Rotates a body-frame vector into NED.
inline Vec3 rotate(const Quat& q, const Vec3& v) {
  // q (x) [0, v] (x) q*
  const Quat p{0.0, v.x, v.y, v.z};
  const Quat r = q * p * q.conjugate();
  return {r.x, r.y, r.z};
}

}  // namespace indi
