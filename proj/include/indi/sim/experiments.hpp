#pragma once

#include <cmath>
#include <vector>

#include "indi/control/inner_loop.hpp"
#include "indi/math/quat.hpp"
#include "indi/sim/dynamics.hpp"
#include "indi/sim/scenario.hpp"
#include "indi/sim/vehicle.hpp"

namespace indi::sim {

struct StepResponseResult {
  std::vector<double> time;
  std::vector<double> designed;
  std::vector<double> simulated;
  double max_deviation_fraction{0.0};  // of step magnitude
  double t_max_deviation{0.0};
};

/// Roll response of the designed small-angle closed loop: first-order actuator
/// dynamics behind the PD cascade, forward-Euler integrators. Difference
/// equation of the discrete transfer function, unit gain at DC.
inline std::vector<double> designed_attitude_step(const AttitudeGains& gains, double alpha,
                                                  double ts, double step, long n) {
  const double ko = gains.k_omega, ke = gains.k_eta;
  const double d1 = 3.0 - alpha;
  const double d2 = 3.0 - 2.0 * alpha + ko * alpha * ts;
  const double d3 = 1.0 - alpha + ko * alpha * ts - ko * ke * alpha * ts * ts;
  const double num = ko * ke * alpha * ts * ts;
  std::vector<double> y(n, 0.0);
  for (long k = 1; k < n; ++k) {
    const double y1 = y[k - 1];
    const double y2 = k >= 2 ? y[k - 2] : 0.0;
    const double y3 = k >= 3 ? y[k - 3] : 0.0;
    const double u3 = k >= 3 ? step : 0.0;  // reference applied at t = 0
    y[k] = d1 * y1 - d2 * y2 + d3 * y3 + num * u3;
  }
  return y;
}

/// Perfect-model attitude step: zero noise, zero wind, simulator-derived
/// effectiveness. Compares the flown roll angle against the designed
/// closed-loop response, both sampled on the same tick grid.
inline StepResponseResult attitude_step_experiment(const VehicleParams& p,
                                                   const ControlParams& c, double step_rad,
                                                   double duration) {
  const double ts = c.sample_time();
  const long n = static_cast<long>(std::llround(duration / ts));
  const EffectivenessModel eff = p.nominal_effectiveness(ts);

  VehicleState state;
  state.xi = {0.0, 0.0, -1.5};
  state.rotor.fill(p.hover_speed());
  InnerLoop inner(c.filter_omega_n, c.filter_zeta, ts, p.rotor_min, p.rotor_max);
  inner.engage({}, state.rotor);
  const Quat q_ref = quat_from_euler({step_rad, 0.0, 0.0});
  const WindField calm{};

  StepResponseResult r;
  r.time.reserve(n);
  r.simulated.reserve(n);
  for (long k = 0; k < n; ++k) {
    r.time.push_back(k * ts);
    r.simulated.push_back(euler_from_quat(state.q).phi);
    const Vec3 nu = attitude_pd(q_ref, state.q, state.omega_body, c.attitude);
    const Vec4 cmd = inner.step(eff, nu, 0.0, state.omega_body, state.rotor);
    dynamics_step(state, p, cmd, calm, ts);
  }
  r.designed = designed_attitude_step(c.attitude, p.actuator_alpha, ts, step_rad, n);

  for (long k = 0; k < n; ++k) {
    const double dev = std::abs(r.simulated[k] - r.designed[k]) / std::abs(step_rad);
    if (dev > r.max_deviation_fraction) {
      r.max_deviation_fraction = dev;
      r.t_max_deviation = k * ts;
    }
  }
  return r;
}

struct RateStepResult {
  std::vector<double> time;
  std::vector<double> reference;  // actuator-model step response
  std::vector<double> measured;   // finite-differenced body rate
  double max_deviation_fraction{0.0};  // of step magnitude, after the settle window
};

/// Closed-loop angular-acceleration step under a perfect model. The response
/// from the virtual control to the achieved angular acceleration should be
/// the bare actuator dynamics; deviations are evaluated after `settle` s.
/// axis selects roll (0), pitch (1) or yaw (2) — yaw exercises the
/// rotor-inertia lag path of the inversion.
inline RateStepResult rate_step_experiment(const VehicleParams& p, const ControlParams& c,
                                           double nu_step, double duration, double settle,
                                           int axis = 0) {
  const double ts = c.sample_time();
  const long n = static_cast<long>(std::llround(duration / ts));
  const EffectivenessModel eff = p.nominal_effectiveness(ts);

  VehicleState state;
  state.xi = {0.0, 0.0, -1.5};
  state.rotor.fill(p.hover_speed());
  InnerLoop inner(c.filter_omega_n, c.filter_zeta, ts, p.rotor_min, p.rotor_max);
  inner.engage({}, state.rotor);
  Vec3 nu{};
  (axis == 0 ? nu.x : axis == 1 ? nu.y : nu.z) = nu_step;
  const WindField calm{};

  RateStepResult r;
  double y = 0.0;  // actuator model state
  double prev_rate = 0.0;
  for (long k = 0; k < n; ++k) {
    const Vec4 cmd = inner.step(eff, nu, 0.0, state.omega_body, state.rotor);
    dynamics_step(state, p, cmd, calm, ts);
    y = (1.0 - p.actuator_alpha) * y + p.actuator_alpha * nu_step;
    r.time.push_back((k + 1) * ts);
    r.reference.push_back(y);
    const double rate = axis == 0 ? state.omega_body.x
                        : axis == 1 ? state.omega_body.y
                                    : state.omega_body.z;
    r.measured.push_back((rate - prev_rate) / ts);
    prev_rate = rate;
  }
  for (long k = 0; k < n; ++k) {
    if (r.time[k] < settle) continue;
    const double dev = std::abs(r.measured[k] - r.reference[k]) / std::abs(nu_step);
    r.max_deviation_fraction = std::max(r.max_deviation_fraction, dev);
  }
  return r;
}

}  // namespace indi::sim
