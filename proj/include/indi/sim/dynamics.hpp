#pragma once

#include <cmath>

#include "indi/math/actuator.hpp"
#include "indi/math/quat.hpp"
#include "indi/math/vec3.hpp"
#include "indi/sim/vehicle.hpp"
#include "indi/sim/wind.hpp"

namespace indi::sim {

/// Signed total thrust along body Z (negative = lifting).
inline double total_thrust(const VehicleParams& p, const Vec4& rotor) {
  double sum = 0.0;
  for (double w : rotor) sum += w * w;
  return -p.thrust_coeff * sum;
}

/// Aerodynamic body torque from the rotor set (arm geometry plus drag torque).
inline Vec3 rotor_torque(const VehicleParams& p, const Vec4& rotor) {
  Vec3 tau{};
  for (int i = 0; i < 4; ++i) {
    const double w2 = rotor[i] * rotor[i];
    tau.x += -p.thrust_coeff * w2 * p.rotor_y(i);
    tau.y += p.thrust_coeff * w2 * p.rotor_x(i);
    tau.z += -p.torque_coeff * w2 * p.spin_dirs[i];
  }
  return tau;
}

/// Linear drag on the airframe, NED, from the velocity relative to the air.
inline Vec3 drag_force_ned(const VehicleParams& p, const Vec3& xi_dot, const Vec3& wind) {
  const Vec3 rel = xi_dot - wind;
  return {-p.drag_coeff.x * rel.x, -p.drag_coeff.y * rel.y, -p.drag_coeff.z * rel.z};
}

/// Specific force the accelerometer sees (body frame, no bias/noise).
/// On the ground the vehicle is held, so the reading is -g rotated to body.
inline Vec3 specific_force_body(const VehicleState& s, const VehicleParams& p,
                                const Vec3& wind) {
  const Mat3 r_nb = quat_to_rotation(s.q);
  if (s.on_ground) {
    return r_nb.transposed() * Vec3{0.0, 0.0, -kGravity};
  }
  const Vec3 thrust_body{0.0, 0.0, total_thrust(p, s.rotor)};
  const Vec3 drag_body = r_nb.transposed() * drag_force_ned(p, s.xi_dot, wind);
  return (thrust_body + drag_body) / p.mass;
}

/// True linear acceleration in NED at the current state.
inline Vec3 linear_acceleration(const VehicleState& s, const VehicleParams& p,
                                const Vec3& wind) {
  if (s.on_ground) return {};
  const Vec3 thrust_ned = quat_to_rotation(s.q) * Vec3{0.0, 0.0, total_thrust(p, s.rotor)};
  return Vec3{0.0, 0.0, kGravity} + (thrust_ned + drag_force_ned(p, s.xi_dot, wind)) / p.mass;
}

/// Advances the vehicle by one control period.
///
/// Rotor speeds follow the discrete first-order actuator model and are then
/// held for the step; the yaw reaction of the rotor spin-up acts as a constant
/// torque over the same interval. Rigid-body states integrate with fixed-step
/// RK4, evaluating the wind at every stage position. The quaternion is
/// renormalized afterwards.
///
/// While on the ground only the rotors advance: the ground holds position,
/// velocity and attitude, and shields the airframe from wind drag. The
/// vehicle lifts off once thrust alone accelerates it upward.
inline void dynamics_step(VehicleState& s, const VehicleParams& p, const Vec4& commands,
                          const WindField& wind, double ts, double t0 = 0.0,
                          const Vec3& turbulence = {}) {
  const Vec4 prev_rotor = s.rotor;
  for (int i = 0; i < 4; ++i) {
    s.rotor[i] = actuator_first_order_step(s.rotor[i], commands[i], p.actuator_alpha,
                                           p.rotor_min, p.rotor_max);
  }

  if (s.on_ground) {
    const Vec3 thrust_ned = quat_to_rotation(s.q) * Vec3{0.0, 0.0, total_thrust(p, s.rotor)};
    if (thrust_ned.z + p.mass * kGravity < 0.0) {
      s.on_ground = false;  // thrust beats weight: release
    } else {
      return;
    }
  }

  double reaction_z = 0.0;
  for (int i = 0; i < 4; ++i) {
    reaction_z += -p.rotor_inertia * p.spin_dirs[i] * (s.rotor[i] - prev_rotor[i]) / ts;
  }
  const Vec3 torque = rotor_torque(p, s.rotor) + Vec3{0.0, 0.0, reaction_z};
  const double thrust = total_thrust(p, s.rotor);

  struct Deriv {
    Vec3 d_xi, d_xi_dot, d_omega;
    Quat d_q;
  };
  const auto f = [&](const Vec3& xi, const Vec3& xi_dot, const Quat& q, const Vec3& om,
                     double t) -> Deriv {
    const Quat qn = q.normalized();
    const Mat3 r = quat_to_rotation(qn);
    const Vec3 w = wind.base_velocity(xi, t) + turbulence * wind.turbulence_factor(xi, t);
    const Vec3 accel =
        Vec3{0.0, 0.0, kGravity} +
        (r * Vec3{0.0, 0.0, thrust} + drag_force_ned(p, xi_dot, w)) / p.mass;
    const Quat dq = q * Quat{0.0, om.x, om.y, om.z};
    const Vec3 i_om{p.inertia.x * om.x, p.inertia.y * om.y, p.inertia.z * om.z};
    const Vec3 gyro_term = om.cross(i_om);
    const Vec3 d_om{(torque.x - gyro_term.x) / p.inertia.x,
                    (torque.y - gyro_term.y) / p.inertia.y,
                    (torque.z - gyro_term.z) / p.inertia.z};
    return {xi_dot, accel, d_om, Quat{0.5 * dq.w, 0.5 * dq.x, 0.5 * dq.y, 0.5 * dq.z}};
  };

  const auto k1 = f(s.xi, s.xi_dot, s.q, s.omega_body, t0);
  const auto qa = [&](const Quat& q, const Quat& dq, double h) {
    return Quat{q.w + h * dq.w, q.x + h * dq.x, q.y + h * dq.y, q.z + h * dq.z};
  };
  const double h2 = ts / 2.0;
  const auto k2 = f(s.xi + k1.d_xi * h2, s.xi_dot + k1.d_xi_dot * h2, qa(s.q, k1.d_q, h2),
                    s.omega_body + k1.d_omega * h2, t0 + h2);
  const auto k3 = f(s.xi + k2.d_xi * h2, s.xi_dot + k2.d_xi_dot * h2, qa(s.q, k2.d_q, h2),
                    s.omega_body + k2.d_omega * h2, t0 + h2);
  const auto k4 = f(s.xi + k3.d_xi * ts, s.xi_dot + k3.d_xi_dot * ts, qa(s.q, k3.d_q, ts),
                    s.omega_body + k3.d_omega * ts, t0 + ts);

  const double w6 = ts / 6.0;
  s.xi += (k1.d_xi + (k2.d_xi + k3.d_xi) * 2.0 + k4.d_xi) * w6;
  s.xi_dot += (k1.d_xi_dot + (k2.d_xi_dot + k3.d_xi_dot) * 2.0 + k4.d_xi_dot) * w6;
  s.omega_body += (k1.d_omega + (k2.d_omega + k3.d_omega) * 2.0 + k4.d_omega) * w6;
  s.q = Quat{s.q.w + w6 * (k1.d_q.w + 2.0 * (k2.d_q.w + k3.d_q.w) + k4.d_q.w),
             s.q.x + w6 * (k1.d_q.x + 2.0 * (k2.d_q.x + k3.d_q.x) + k4.d_q.x),
             s.q.y + w6 * (k1.d_q.y + 2.0 * (k2.d_q.y + k3.d_q.y) + k4.d_q.y),
             s.q.z + w6 * (k1.d_q.z + 2.0 * (k2.d_q.z + k3.d_q.z) + k4.d_q.z)}
            .normalized();
}

}  // namespace indi::sim
