#pragma once

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <array>
#include <complex>

#include "indi/control/effectiveness.hpp"
#include "indi/errors.hpp"
#include "indi/math/actuator.hpp"
#include "indi/math/quat.hpp"
#include "indi/math/sync_filter.hpp"
#include "indi/math/vec3.hpp"

namespace indi {

struct AttitudeGains {
  double k_eta{10.7};    // 1/s, attitude error -> rate reference
  double k_omega{28.0};  // 1/s, rate error -> angular acceleration

  void validate() const {
    if (!(k_eta > 0.0) || !(k_omega > 0.0)) {
      throw ContractViolation("AttitudeGains must be positive");
    }
  }
};

/// Quaternion PD producing the angular-acceleration virtual control.
///
/// The proportional gain is doubled on the quaternion error vector because the
/// error quaternion carries half the rotation angle in its vector part, which
/// recovers the small-angle cascade K_omega * (K_eta * eta_err - Omega).
/// Shortest-arc sign handling makes the law immune to the quaternion double
/// cover.
inline Vec3 attitude_pd(const Quat& q_ref, const Quat& q, const Vec3& omega_body,
                        const AttitudeGains& gains) {
  const Quat err = shortest_arc_error(q_ref, q);
  const Vec3 rate_ref = err.vec() * (2.0 * gains.k_eta);
  return (rate_ref - omega_body) * gains.k_omega;
}

/// Poles of the small-angle attitude closed loop built from first-order
/// actuator dynamics with pole parameter alpha, sample time ts and the PD
/// gains. Sorted by real part descending, complex-conjugate pairs adjacent.
inline std::array<std::complex<double>, 3> closed_loop_poles(const AttitudeGains& gains,
                                                             double alpha, double ts) {
  if (!(ts > 0.0) || !(alpha > 0.0) || alpha > 1.0) {
    throw ContractViolation("closed_loop_poles: need ts > 0 and 0 < alpha <= 1");
  }
  // z^3 + c2 z^2 + c1 z + c0
  const double c2 = -(3.0 - alpha);
  const double c1 = 3.0 - 2.0 * alpha + gains.k_omega * alpha * ts;
  const double c0 = -1.0 + alpha - gains.k_omega * alpha * ts +
                    gains.k_omega * gains.k_eta * alpha * ts * ts;
  Eigen::Matrix3d companion = Eigen::Matrix3d::Zero();
  companion(0, 0) = -c2;
  companion(0, 1) = -c1;
  companion(0, 2) = -c0;
  companion(1, 0) = 1.0;
  companion(2, 1) = 1.0;
  const Eigen::EigenSolver<Eigen::Matrix3d> solver(companion);
  std::array<std::complex<double>, 3> poles;
  for (int i = 0; i < 3; ++i) poles[i] = solver.eigenvalues()(i);
  std::sort(poles.begin(), poles.end(), [](const auto& a, const auto& b) {
    if (a.real() != b.real()) return a.real() > b.real();
    return a.imag() > b.imag();
  });
  return poles;
}

/// Incremental attitude/rate inversion.
///
/// Per tick: filter the gyro rates and differentiate them (in that order), and
/// filter the rotor-speed feedback with the identically parameterized filter.
/// The rotor command is the filtered feedback plus
///   (G1+G2)^-1 * ([nu - dOmega_f; T_tilde] + G2 * increment(k-1)),
/// clamped to the speed envelope afterwards. The stored increment is the
/// unclamped one, matching the tap point of the delay path.
class InnerLoop {
 public:
  InnerLoop(double filter_omega_n, double filter_zeta, double sample_time, double min_speed,
            double max_speed)
      : gyro_filter_(filter_omega_n, filter_zeta, sample_time),
        rotor_filter_(filter_omega_n, filter_zeta, sample_time),
        ts_(sample_time),
        min_speed_(min_speed),
        max_speed_(max_speed) {
    prev_increment_.setZero();
  }

  /// Warm-starts both filters on the current measurements and clears the
  /// increment memory, so engagement produces no transient command.
  void engage(const Vec3& gyro, const Vec4& rotor_speeds) {
    gyro_filter_.reset(gyro);
    rotor_filter_.reset(rotor_speeds);
    omega_f_ = rotor_speeds;
    rates_f_ = gyro;
    prev_rates_f_ = gyro;
    dOmega_f_ = {0.0, 0.0, 0.0};
    prev_increment_.setZero();
  }

  Vec4 step(const EffectivenessModel& eff, const Vec3& nu, double thrust_increment,
            const Vec3& gyro, const Vec4& rotor_speeds) {
    if (!nu.finite() || !std::isfinite(thrust_increment) || !gyro.finite() ||
        !finite(rotor_speeds)) {
      throw ContractViolation("InnerLoop::step: non-finite input");
    }
    prev_rates_f_ = rates_f_;
    rates_f_ = gyro_filter_.step(gyro);
    dOmega_f_ = finite_difference(rates_f_, prev_rates_f_, ts_);
    omega_f_ = rotor_filter_.step(rotor_speeds);

    Eigen::Vector4d target;
    target << nu.x - dOmega_f_.x, nu.y - dOmega_f_.y, nu.z - dOmega_f_.z, thrust_increment;
    target += eff.g2() * prev_increment_;
    const Eigen::Vector4d increment = eff.sum_inverse() * target;
    prev_increment_ = increment;

    Vec4 command;
    for (int i = 0; i < 4; ++i) {
      command[i] = std::clamp(omega_f_[i] + increment(i), min_speed_, max_speed_);
    }
    return command;
  }

  // Telemetry.
  const Vec4& filtered_rotor_speeds() const { return omega_f_; }
  const Vec3& filtered_rates() const { return rates_f_; }
  const Vec3& filtered_angular_accel() const { return dOmega_f_; }
  Vec4 last_increment() const {
    return {prev_increment_(0), prev_increment_(1), prev_increment_(2), prev_increment_(3)};
  }

 private:
  SyncFilter<3> gyro_filter_;
  SyncFilter<4> rotor_filter_;
  double ts_;
  double min_speed_, max_speed_;
  Vec3 rates_f_{}, prev_rates_f_{}, dOmega_f_{};
  Vec4 omega_f_{};
  Eigen::Vector4d prev_increment_;
};

}  // namespace indi
