// Independent reference implementations used only by the tests. These stay
// deliberately separate from the library code paths they check.
#pragma once

#include <cmath>
#include <complex>
#include <random>

#include "indi/math/mat3.hpp"
#include "indi/math/quat.hpp"
#include "indi/math/vec3.hpp"

namespace oracle {

/// Unit step response of wn^2 / (s^2 + 2 zeta wn s + wn^2), evaluated in
/// closed form (underdamped, critically damped and overdamped branches).
inline double second_order_step(double t, double wn, double zeta) {
  if (t <= 0.0) return 0.0;
  if (zeta < 1.0) {
    const double wd = wn * std::sqrt(1.0 - zeta * zeta);
    return 1.0 - std::exp(-zeta * wn * t) *
                     (std::cos(wd * t) + zeta / std::sqrt(1.0 - zeta * zeta) * std::sin(wd * t));
  }
  if (zeta == 1.0) {
    return 1.0 - (1.0 + wn * t) * std::exp(-wn * t);
  }
  const double r1 = -wn * (zeta - std::sqrt(zeta * zeta - 1.0));
  const double r2 = -wn * (zeta + std::sqrt(zeta * zeta - 1.0));
  return 1.0 - (r2 * std::exp(r1 * t) - r1 * std::exp(r2 * t)) / (r2 - r1);
}

/// Central-difference Jacobian of the NED thrust vector with respect to
/// (phi, theta, T), column by column.
template <typename F>
inline indi::Mat3 central_difference_jacobian(F&& f, const indi::EulerAngles& eta, double thrust,
                                              double h) {
  indi::Mat3 j;
  const auto fill_col = [&](int col, const indi::Vec3& plus, const indi::Vec3& minus) {
    const indi::Vec3 d = (plus - minus) / (2.0 * h);
    j.m[0][col] = d.x;
    j.m[1][col] = d.y;
    j.m[2][col] = d.z;
  };
  fill_col(0, f({eta.phi + h, eta.theta, eta.psi}, thrust),
           f({eta.phi - h, eta.theta, eta.psi}, thrust));
  fill_col(1, f({eta.phi, eta.theta + h, eta.psi}, thrust),
           f({eta.phi, eta.theta - h, eta.psi}, thrust));
  fill_col(2, f({eta.phi, eta.theta, eta.psi}, thrust + h),
           f({eta.phi, eta.theta, eta.psi}, thrust - h));
  return j;
}

/// Direct trigonometric evaluation of the rotated body-Z thrust direction,
/// written out independently of the library's rotation code.
inline indi::Vec3 tilted_thrust_direction(double phi, double theta, double psi) {
  using std::cos;
  using std::sin;
  return {sin(phi) * sin(psi) + cos(phi) * cos(psi) * sin(theta),
          cos(phi) * sin(psi) * sin(theta) - cos(psi) * sin(phi),
          cos(phi) * cos(theta)};
}

inline std::complex<double> cubic_eval(double c2, double c1, double c0,
                                       std::complex<double> z) {
  return ((z + c2) * z + c1) * z + c0;
}

inline indi::Quat random_unit_quat(std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  indi::Quat q{n(rng), n(rng), n(rng), n(rng)};
  return q.normalized();
}

}  // namespace oracle
