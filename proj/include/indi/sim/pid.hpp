#pragma once

#include <algorithm>
#include <cmath>

#include "indi/errors.hpp"
#include "indi/math/vec3.hpp"

namespace indi::sim {

/// Cascade gains acting directly on position and velocity. The proportional
/// gain maps position error to a velocity reference, the derivative gain maps
/// velocity error to a hover-equivalent attitude command (multiply by g for
/// acceleration), and the integral gain acts on the position error directly.
struct PidAxisGains {
  double p{0.65};  // (m/s)/m
  double i{0.05};  // rad/(m s)
  double d{0.20};  // rad/(m/s)
};

struct PidConfig {
  PidAxisGains horizontal{};
  PidAxisGains vertical{};
  double integrator_limit{0.6};  // rad-equivalent
  double attitude_limit{0.7};     // rad
  double thrust_min{-16.0};       // N
  double thrust_max{-0.1};        // N
  double mass{0.5};               // kg

  void validate() const {
    if (!(mass > 0.0) || !(integrator_limit > 0.0) || !(attitude_limit > 0.0)) {
      throw ContractViolation("PidConfig: mass and limits must be positive");
    }
  }
};

struct PidCommand {
  double phi_c{0.0};
  double theta_c{0.0};
  double t_c{0.0};        // N, absolute
  Vec3 accel_equiv{};     // m/s^2, logged alongside the INDI virtual control
};

/// Position PID baseline. Horizontal commands map through the yaw angle to
/// roll/pitch references; the vertical channel commands absolute thrust.
/// Trapezoidal integrator, clamped per axis.
class PidController {
 public:
  explicit PidController(const PidConfig& cfg) : cfg_(cfg) { cfg_.validate(); }

  PidCommand step(const Vec3& xi_ref, const Vec3& xi, const Vec3& xi_dot, double psi,
                  double ts) {
    const Vec3 e = xi_ref - xi;
    integrator_ += (e + prev_error_) * (0.5 * ts);
    prev_error_ = e;
    const double lim_h = cfg_.integrator_limit / std::max(cfg_.horizontal.i, 1e-12);
    const double lim_v = cfg_.integrator_limit / std::max(cfg_.vertical.i, 1e-12);
    integrator_.x = std::clamp(integrator_.x, -lim_h, lim_h);
    integrator_.y = std::clamp(integrator_.y, -lim_h, lim_h);
    integrator_.z = std::clamp(integrator_.z, -lim_v, lim_v);

    // hover-equivalent attitude units (rad)
    const auto& h = cfg_.horizontal;
    const auto& v = cfg_.vertical;
    const double att_n = h.d * (h.p * e.x - xi_dot.x) + h.i * integrator_.x;
    const double att_e = h.d * (h.p * e.y - xi_dot.y) + h.i * integrator_.y;
    const double att_d = v.d * (v.p * e.z - xi_dot.z) + v.i * integrator_.z;

    const double cy = std::cos(psi), sy = std::sin(psi);
    PidCommand cmd;
    cmd.theta_c = std::clamp(-(att_n * cy + att_e * sy), -cfg_.attitude_limit,
                             cfg_.attitude_limit);
    cmd.phi_c =
        std::clamp(att_e * cy - att_n * sy, -cfg_.attitude_limit, cfg_.attitude_limit);
    const double accel_d = kGravity * att_d;
    cmd.t_c = std::clamp(cfg_.mass * (accel_d - kGravity), cfg_.thrust_min, cfg_.thrust_max);
    cmd.accel_equiv = {kGravity * att_n, kGravity * att_e, accel_d};
    return cmd;
  }

  void reset() {
    integrator_ = {};
    prev_error_ = {};
  }

  const Vec3& integrator() const { return integrator_; }

 private:
  PidConfig cfg_;
  Vec3 integrator_{};
  Vec3 prev_error_{};
};

}  // namespace indi::sim
