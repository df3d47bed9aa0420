#pragma once

#include <Eigen/Dense>
#include <array>
#include <cmath>

#include "indi/control/adaptation.hpp"
#include "indi/control/effectiveness.hpp"
#include "indi/errors.hpp"
#include "indi/math/quat.hpp"
#include "indi/math/vec3.hpp"

namespace indi::sim {

/// Physical description of the quadrotor. X configuration: rotors 0..3 sit at
/// (+l,+b), (+l,-b), (-l,-b), (-l,+b) in the body XY plane with spin signs
/// (+,-,+,-); per-rotor thrust k_t w^2 pulls along -Z (body Z points down).
struct VehicleParams {
  double mass{0.5};  // kg
  Vec3 inertia{2.8e-3, 2.2e-3, 4.6e-3};  // kg m^2, diagonal
  double arm_l{0.089};  // m, rotor offset along body X
  double arm_b{0.115};  // m, rotor offset along body Y
  double thrust_coeff{2.503e-6};   // N/(rad/s)^2
  double torque_coeff{4.0e-8};     // N m/(rad/s)^2
  double rotor_inertia{5.0e-7};    // kg m^2, spin axis
  std::array<double, 4> spin_dirs{1.0, -1.0, 1.0, -1.0};
  double actuator_alpha{0.1};
  double rotor_min{300.0};  // rad/s, idle
  double rotor_max{1200.0};
  Vec3 drag_coeff{0.18, 0.18, 0.12};  // N/(m/s), NED diagonal

  void validate() const {
    if (!(mass > 0.0) || !(inertia.x > 0.0) || !(inertia.y > 0.0) || !(inertia.z > 0.0) ||
        !(arm_l > 0.0) || !(arm_b > 0.0) || !(thrust_coeff > 0.0) || !(torque_coeff > 0.0) ||
        !(rotor_inertia >= 0.0)) {
      throw ContractViolation("VehicleParams: mass, inertia, arms and coefficients must be positive");
    }
    if (drag_coeff.x < 0.0 || drag_coeff.y < 0.0 || drag_coeff.z < 0.0) {
      throw ContractViolation("VehicleParams: drag coefficients must be non-negative");
    }
    if (!(rotor_max > rotor_min) || rotor_min < 0.0) {
      throw ContractViolation("VehicleParams: need 0 <= rotor_min < rotor_max");
    }
    for (double s : spin_dirs) {
      if (s != 1.0 && s != -1.0) {
        throw ContractViolation("VehicleParams: spin directions must be +-1");
      }
    }
  }

  double rotor_x(int i) const { return (i == 0 || i == 1) ? arm_l : -arm_l; }
  double rotor_y(int i) const { return (i == 0 || i == 3) ? arm_b : -arm_b; }

  /// Rotor speed that balances gravity.
  double hover_speed() const { return std::sqrt(mass * kGravity / (4.0 * thrust_coeff)); }

  /// Exact thrust curve of the quadratic rotor model.
  ThrustCurve thrust_curve() const { return {0.0, 0.0, thrust_coeff, rotor_min, rotor_max}; }

  /// Effectiveness pair linearized about hover. G2 carries the yaw reaction of
  /// the rotor inertia with the sample time factored out.
  EffectivenessModel nominal_effectiveness(double sample_time) const {
    const double wh = hover_speed();
    Eigen::Matrix4d g1 = Eigen::Matrix4d::Zero();
    Eigen::Matrix4d g2 = Eigen::Matrix4d::Zero();
    for (int i = 0; i < 4; ++i) {
      g1(0, i) = -2.0 * thrust_coeff * wh * rotor_y(i) / inertia.x;
      g1(1, i) = 2.0 * thrust_coeff * wh * rotor_x(i) / inertia.y;
      g1(2, i) = -2.0 * torque_coeff * wh * spin_dirs[i] / inertia.z;
      g1(3, i) = -2.0 * thrust_coeff * wh;
      g2(2, i) = -rotor_inertia * spin_dirs[i] / (inertia.z * sample_time);
    }
    return EffectivenessModel(g1, g2, sample_time);
  }
};

/// Full rigid-body state. Positions/velocities in NED, rates in body axes.
struct VehicleState {
  Vec3 xi{};        // m
  Vec3 xi_dot{};    // m/s
  Quat q{};         // body -> NED
  Vec3 omega_body{};  // rad/s
  Vec4 rotor{};     // rad/s
  bool on_ground{false};

  bool finite() const {
    return xi.finite() && xi_dot.finite() && q.finite() && omega_body.finite() &&
           indi::finite(rotor);
  }
};

}  // namespace indi::sim
