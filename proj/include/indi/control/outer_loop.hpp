#pragma once

#include <algorithm>
#include <cmath>
#include <optional>

#include "indi/errors.hpp"
#include "indi/math/mat3.hpp"
#include "indi/math/quat.hpp"
#include "indi/math/sync_filter.hpp"
#include "indi/math/vec3.hpp"

namespace indi {

struct PositionGains {
  double k_xi{0.70};      // 1/s, position error -> velocity reference
  double k_xi_dot{1.4715};  // 1/s, velocity error -> acceleration

  void validate() const {
    if (!(k_xi > 0.0) || !(k_xi_dot > 0.0)) {
      throw ContractViolation("PositionGains must be positive");
    }
  }
};

/// Acceleration reference for the outer loop. Callers hold position/velocity
/// between fixes (zero-order hold); this is the pure cascade law.
inline Vec3 position_pd(const Vec3& xi_ref, const Vec3& xi, const Vec3& xi_dot,
                        const PositionGains& gains) {
  return ((xi_ref - xi) * gains.k_xi - xi_dot) * gains.k_xi_dot;
}

/// Rotor thrust expressed in NED via the ZYX attitude. With body Z down,
/// hover thrust is negative; rows are the three NED components.
inline Vec3 thrust_vector_ned(const EulerAngles& eta, double thrust) {
  const double sp = std::sin(eta.phi), cp = std::cos(eta.phi);
  const double st = std::sin(eta.theta), ct = std::cos(eta.theta);
  const double sy = std::sin(eta.psi), cy = std::cos(eta.psi);
  return {(sp * sy + cp * cy * st) * thrust,
          (cp * sy * st - cy * sp) * thrust,
          (cp * ct) * thrust};
}

/// Jacobian of thrust_vector_ned with respect to (phi, theta, thrust).
inline Mat3 effectiveness_jacobian(const EulerAngles& eta, double thrust) {
  const double sp = std::sin(eta.phi), cp = std::cos(eta.phi);
  const double st = std::sin(eta.theta), ct = std::cos(eta.theta);
  const double sy = std::sin(eta.psi), cy = std::cos(eta.psi);
  Mat3 g;
  g.m[0][0] = (cp * sy - sp * cy * st) * thrust;
  g.m[0][1] = (cp * cy * ct) * thrust;
  g.m[0][2] = sp * sy + cp * cy * st;
  g.m[1][0] = (-sp * sy * st - cy * cp) * thrust;
  g.m[1][1] = (cp * sy * ct) * thrust;
  g.m[1][2] = cp * sy * st - cy * sp;
  g.m[2][0] = -ct * sp * thrust;
  g.m[2][1] = -st * cp * thrust;
  g.m[2][2] = cp * ct;
  return g;
}

struct ThrustVectorInversion {
  double phi{0.0};
  double theta{0.0};
  double thrust{0.0};   // N, negative when the vector points up
  bool infeasible{false};  // an arcsine argument had to be saturated
};

/// Exact inversion of thrust_vector_ned at a known yaw: recovers the roll and
/// pitch angles and the signed thrust magnitude that reproduce `tn`. The
/// thrust takes the negative norm (body Z down, lifting thrust negative).
/// Arguments nudged outside [-1, 1] by round-off are saturated and flagged.
inline ThrustVectorInversion invert_thrust_vector(const Vec3& tn, double psi) {
  ThrustVectorInversion r;
  const double norm = tn.norm();
  if (norm <= 0.0) {
    r.infeasible = true;
    return r;
  }
  r.thrust = -norm;
  const double sy = std::sin(psi), cy = std::cos(psi);
  const auto saturate = [&r](double a) {
    if (a > 1.0 || a < -1.0) {
      r.infeasible = true;
      return std::clamp(a, -1.0, 1.0);
    }
    return a;
  };
  r.phi = std::asin(saturate((sy * tn.x - cy * tn.y) / r.thrust));
  const double cphi = std::cos(r.phi);
  if (cphi < 1e-9) {
    r.infeasible = true;
    r.theta = 0.0;
  } else {
    r.theta = std::asin(saturate((cy * tn.x + sy * tn.y) / (r.thrust * cphi)));
  }
  return r;
}

/// Output of one outer-loop tick: absolute roll/pitch commands plus the
/// thrust increment handed to the inner loop.
struct ThrustVectorCommand {
  double phi_c{0.0};
  double theta_c{0.0};
  double t_tilde{0.0};  // N, increment relative to the filtered thrust
  double t_c{0.0};      // N, absolute (negative at hover)
  bool fallback{false};          // inversion skipped, previous command held
  bool attitude_clamped{false};  // |phi_c| or |theta_c| hit the limit
  bool infeasible{false};        // arcsine argument had to be saturated
};

struct OuterLoopConfig {
  double mass{0.5};  // kg
  double filter_omega_n{50.0};
  double filter_zeta{0.55};
  double sample_time{1.0 / 512.0};
  double attitude_limit{0.7};   // rad
  double thrust_floor{0.5};     // N, |T_f| below this makes the inversion singular
  double pitch_guard{1.4};      // rad, |theta_f| beyond this makes it singular
  double thrust_min{-16.0};     // N, most negative commandable total thrust
  double thrust_max{-0.1};      // N, least negative commandable total thrust
  double bias_omega_n{0.25};    // rad/s
  double bias_zeta{0.85};
  double fix_timeout{5.0};      // s, bias estimate freezes without velocity fixes
};

/// Accelerometer-bias estimator: the NED acceleration and the
/// finite-differenced velocity fixes pass through identical slow second-order
/// filters; the difference of the two outputs is the bias. Starts from zero
/// state (the bias is unknown at engagement) and freezes when fixes stop.
class BiasEstimator {
 public:
  BiasEstimator(double omega_n, double zeta, double sample_time, double fix_timeout)
      : accel_filter_(omega_n, zeta, sample_time),
        vel_accel_filter_(omega_n, zeta, sample_time),
        ts_(sample_time),
        fix_timeout_(fix_timeout) {}

  const Vec3& step(const Vec3& accel_ned, const std::optional<Vec3>& velocity_fix) {
    now_ += ts_;
    if (velocity_fix) {
      if (have_fix_) {
        held_fd_accel_ = finite_difference(*velocity_fix, prev_fix_, now_ - prev_fix_time_);
      }
      prev_fix_ = *velocity_fix;
      prev_fix_time_ = now_;
      have_fix_ = true;
    }
    stale_ = !have_fix_ || (now_ - prev_fix_time_) > fix_timeout_;
    if (!stale_) {
      bias_ = accel_filter_.step(accel_ned) - vel_accel_filter_.step(held_fd_accel_);
    }
    return bias_;
  }

  const Vec3& bias() const { return bias_; }
  bool stale() const { return stale_; }

 private:
  SyncFilter<3> accel_filter_;
  SyncFilter<3> vel_accel_filter_;
  double ts_;
  double fix_timeout_;
  double now_{0.0};
  Vec3 held_fd_accel_{};
  Vec3 prev_fix_{};
  double prev_fix_time_{0.0};
  bool have_fix_{false};
  bool stale_{true};
  Vec3 bias_{};
};

/// Incremental linear-acceleration controller.
///
/// Both inversion flavors share the same filtered feedback: the bias-corrected
/// NED acceleration and the (roll, pitch, thrust) triple each pass through a
/// SyncFilter with the same parameters as the inner loop, which is what lets
/// the thrust increment cross loop boundaries unchanged.
class OuterLoop {
 public:
  explicit OuterLoop(const OuterLoopConfig& cfg)
      : cfg_(cfg),
        accel_filter_(cfg.filter_omega_n, cfg.filter_zeta, cfg.sample_time),
        feedback_filter_(cfg.filter_omega_n, cfg.filter_zeta, cfg.sample_time),
        bias_estimator_(cfg.bias_omega_n, cfg.bias_zeta, cfg.sample_time, cfg.fix_timeout) {
    if (!(cfg.mass > 0.0)) throw ContractViolation("OuterLoop: mass must be positive");
  }

  /// Warm start on current measurements; clears any held command.
  void engage(const Vec3& accel_ned, const EulerAngles& eta, double thrust_est) {
    accel_filter_.reset(accel_ned - bias());
    feedback_filter_.reset(std::array<double, 3>{eta.phi, eta.theta, thrust_est});
    accel_f_ = accel_ned - bias();
    phi_f_ = eta.phi;
    theta_f_ = eta.theta;
    t_f_ = thrust_est;
    last_ = ThrustVectorCommand{eta.phi, eta.theta, 0.0, thrust_est, false, false, false};
  }

  /// Updates the bias estimate; call once per tick before the inversion step.
  const Vec3& update_bias(const Vec3& accel_ned, const std::optional<Vec3>& velocity_fix) {
    return bias_estimator_.step(accel_ned, velocity_fix);
  }

  /// Linearized inversion: u_c = u_f + m G^-1(eta_f, T_f) (nu - accel_f).
  ThrustVectorCommand linear_step(const Vec3& nu, const Vec3& accel_ned,
                                  const EulerAngles& eta_meas, double thrust_est) {
    advance_filters(nu, accel_ned, eta_meas, thrust_est);
    if (singular()) return hold_previous();

    const Mat3 g = effectiveness_jacobian({phi_f_, theta_f_, eta_meas.psi}, t_f_);
    const Vec3 delta = g.inverse() * ((nu - accel_f_) * cfg_.mass);

    ThrustVectorCommand cmd;
    cmd.phi_c = phi_f_ + delta.x;
    cmd.theta_c = theta_f_ + delta.y;
    cmd.t_c = std::clamp(t_f_ + delta.z, cfg_.thrust_min, cfg_.thrust_max);
    finish(cmd);
    return cmd;
  }

  /// Nonlinear inversion: the commanded thrust vector is the filtered one plus
  /// m (nu - accel_f); roll, pitch and thrust are recovered exactly from it.
  ThrustVectorCommand nonlinear_step(const Vec3& nu, const Vec3& accel_ned,
                                     const EulerAngles& eta_meas, double thrust_est) {
    advance_filters(nu, accel_ned, eta_meas, thrust_est);
    if (singular()) return hold_previous();

    const Vec3 tn_f = thrust_vector_ned({phi_f_, theta_f_, eta_meas.psi}, t_f_);
    const Vec3 tn_new = (nu - accel_f_) * cfg_.mass + tn_f;
    if (tn_new.norm() < cfg_.thrust_floor) return hold_previous();

    const ThrustVectorInversion inv = invert_thrust_vector(tn_new, eta_meas.psi);
    ThrustVectorCommand cmd;
    cmd.phi_c = inv.phi;
    cmd.theta_c = inv.theta;
    cmd.infeasible = inv.infeasible;
    cmd.t_c = std::clamp(inv.thrust, cfg_.thrust_min, cfg_.thrust_max);
    finish(cmd);
    return cmd;
  }

  // Telemetry.
  const Vec3& filtered_accel() const { return accel_f_; }
  double filtered_phi() const { return phi_f_; }
  double filtered_theta() const { return theta_f_; }
  double filtered_thrust() const { return t_f_; }
  const Vec3& bias() const { return bias_estimator_.bias(); }
  bool bias_stale() const { return bias_estimator_.stale(); }
  const ThrustVectorCommand& last_command() const { return last_; }
  const OuterLoopConfig& config() const { return cfg_; }

 private:
  void advance_filters(const Vec3& nu, const Vec3& accel_ned, const EulerAngles& eta_meas,
                       double thrust_est) {
    if (!nu.finite() || !accel_ned.finite() || !std::isfinite(thrust_est)) {
      throw ContractViolation("OuterLoop: non-finite input");
    }
    accel_f_ = accel_filter_.step(accel_ned - bias());
    const auto fb = feedback_filter_.step(std::array<double, 3>{eta_meas.phi, eta_meas.theta,
                                                                thrust_est});
    phi_f_ = fb[0];
    theta_f_ = fb[1];
    t_f_ = fb[2];
  }

  bool singular() const {
    return std::abs(t_f_) < cfg_.thrust_floor || std::abs(theta_f_) > cfg_.pitch_guard;
  }

  ThrustVectorCommand hold_previous() {
    ThrustVectorCommand cmd = last_;
    cmd.fallback = true;
    cmd.t_tilde = cmd.t_c - t_f_;
    last_ = cmd;
    return cmd;
  }

  void finish(ThrustVectorCommand& cmd) {
    const double lim = cfg_.attitude_limit;
    if (std::abs(cmd.phi_c) > lim || std::abs(cmd.theta_c) > lim) cmd.attitude_clamped = true;
    cmd.phi_c = std::clamp(cmd.phi_c, -lim, lim);
    cmd.theta_c = std::clamp(cmd.theta_c, -lim, lim);
    cmd.t_tilde = cmd.t_c - t_f_;
    last_ = cmd;
  }

  OuterLoopConfig cfg_;
  SyncFilter<3> accel_filter_;
  SyncFilter<3> feedback_filter_;  // roll, pitch, thrust
  BiasEstimator bias_estimator_;
  Vec3 accel_f_{};
  double phi_f_{0.0}, theta_f_{0.0}, t_f_{0.0};
  ThrustVectorCommand last_{};
};

}  // namespace indi
