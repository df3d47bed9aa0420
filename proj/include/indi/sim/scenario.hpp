#pragma once

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "indi/control/adaptation.hpp"
#include "indi/control/inner_loop.hpp"
#include "indi/control/outer_loop.hpp"
#include "indi/errors.hpp"
#include "indi/math/quat.hpp"
#include "indi/math/sync_filter.hpp"
#include "indi/math/vec3.hpp"
#include "indi/sim/dynamics.hpp"
#include "indi/sim/pid.hpp"
#include "indi/sim/sensors.hpp"
#include "indi/sim/vehicle.hpp"
#include "indi/sim/wind.hpp"

namespace indi::sim {

enum class ControllerKind { indi_linear, indi_nonlinear, pid };

struct ControlParams {
  double sample_rate{512.0};  // Hz
  AttitudeGains attitude{};
  PositionGains position{};
  double filter_omega_n{50.0};
  double filter_zeta{0.55};
  double attitude_limit{0.7};  // rad
  double yaw_ref{0.0};         // rad, held for the whole run
  double thrust_floor{0.5};    // N
  double pitch_guard{1.4};     // rad
  double bias_omega_n{0.25};   // rad/s
  double bias_zeta{0.85};
  PidAxisGains pid_horizontal{};
  PidAxisGains pid_vertical{};
  double pid_integrator_limit{0.6};  // rad-equivalent, enough to trim the jet drag

  double sample_time() const { return 1.0 / sample_rate; }

  void validate() const {
    if (!(sample_rate > 0.0)) throw ContractViolation("ControlParams: sample_rate must be > 0");
    attitude.validate();
    position.validate();
    if (!(filter_omega_n > 0.0) || !(filter_zeta > 0.0) || !(bias_omega_n > 0.0) ||
        !(bias_zeta > 0.0)) {
      throw ContractViolation("ControlParams: filter parameters must be positive");
    }
  }
};

enum class ThrustTarget { curve, accel };

struct AdaptationConfig {
  bool enabled{false};
  double mu_speed{1e-3};
  double mu_accel{1e-4};
  ThrustTarget thrust_target{ThrustTarget::curve};
  double initial_scale{1.0};  // scales the nominal G the adapter starts from
};

struct Waypoint {
  double t{0.0};
  Vec3 pos{};
};

/// Overrides the position loop with a fixed acceleration reference while
/// t_begin <= t < t_end (INDI controllers only).
struct AccelWindow {
  double t_begin{0.0};
  double t_end{0.0};
  Vec3 nu{};
};

struct ScenarioConfig {
  std::string name{"scenario"};
  ControllerKind controller{ControllerKind::indi_linear};
  double duration{10.0};  // s
  std::uint64_t seed{1};
  std::string output_path{"out"};
  VehicleParams vehicle{};
  ControlParams control{};
  WindField wind{};
  SensorModels sensors{};
  AdaptationConfig adaptation{};
  std::vector<Waypoint> waypoints{};
  std::vector<AccelWindow> accel_schedule{};
  Vec3 start_position{0.0, 0.0, -1.5};
  bool start_on_ground{false};
  double ground_level{0.0};  // NED z of the ground plane
  // optional bench-measured thrust samples (omega_rad_s, thrust_N CSV); when
  // set, the controllers estimate thrust from the fitted curve instead of
  // the exact rotor model
  std::string thrust_curve_csv{};

  void validate() const {
    if (!(duration > 0.0)) throw ConfigError("scenario: duration must be positive");
    try {
      vehicle.validate();
      control.validate();
      wind.validate();
      sensors.validate();
    } catch (const ContractViolation& e) {
      throw ConfigError(std::string("scenario '") + name + "': " + e.what());
    }
    for (std::size_t i = 1; i < waypoints.size(); ++i) {
      if (waypoints[i].t < waypoints[i - 1].t) {
        throw ConfigError("scenario: waypoints must be sorted by time");
      }
    }
    for (const auto& w : accel_schedule) {
      if (!(w.t_end > w.t_begin)) {
        throw ConfigError("scenario: acceleration window must have t_end > t_begin");
      }
    }
  }
};

/// Tick-indexed telemetry table. The column set is fixed, so traces from any
/// two runs line up column for column.
struct Trace {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
  std::vector<double> event_times;  // reference switches, seconds

  int col(const std::string& name) const {
    for (std::size_t i = 0; i < columns.size(); ++i) {
      if (columns[i] == name) return static_cast<int>(i);
    }
    throw ConfigError("trace: missing column '" + name + "'");
  }

  double at(std::size_t row, int c) const { return rows[row][c]; }
  std::size_t size() const { return rows.size(); }
};

inline const std::vector<std::string>& trace_columns() {
  static const std::vector<std::string> cols = {
      "tick", "time_s", "pos_n", "pos_e", "pos_d", "ref_n", "ref_e", "ref_d", "vel_n", "vel_e",
      "vel_d", "phi", "theta", "psi", "rate_p", "rate_q", "rate_r", "rotor_0", "rotor_1",
      "rotor_2", "rotor_3", "cmd_0", "cmd_1", "cmd_2", "cmd_3", "nu_n", "nu_e", "nu_d",
      "accel_f_n", "accel_f_e", "accel_f_d", "accel_n", "accel_e", "accel_d", "bias_n",
      "bias_e", "bias_d", "phi_c", "theta_c", "t_tilde", "t_cmd", "t_filt", "thrust_true",
      "nu_p", "nu_q", "nu_r", "saturated", "fallback", "infeasible", "att_clamped",
      "bias_stale", "wind_n", "wind_e", "wind_d", "fix"};
  return cols;
}

/// Runs the full cascaded loop (position -> outer -> inner -> actuators ->
/// rigid body -> sensors) at the configured rate. Bit-reproducible for a
/// fixed seed; throws NumericFailure with the offending tick if any state
/// goes non-finite.
inline Trace run_scenario(const ScenarioConfig& cfg) {
  cfg.validate();
  const VehicleParams& p = cfg.vehicle;
  const double ts = cfg.control.sample_time();
  const long n_ticks = static_cast<long>(std::llround(cfg.duration / ts));

  VehicleState state;
  state.xi = cfg.start_position;
  state.q = quat_from_euler({0.0, 0.0, cfg.control.yaw_ref});
  state.on_ground = cfg.start_on_ground;
  if (cfg.start_on_ground) state.xi.z = cfg.ground_level;
  state.rotor.fill(cfg.start_on_ground ? p.rotor_min : p.hover_speed());

  EffectivenessModel eff = p.nominal_effectiveness(ts);
  ThrustCurve curve = p.thrust_curve();
  if (!cfg.thrust_curve_csv.empty()) {
    std::ifstream in(cfg.thrust_curve_csv);
    if (!in) throw ConfigError("cannot open thrust curve file '" + cfg.thrust_curve_csv + "'");
    curve = fit_thrust_curve(load_thrust_samples(in)).curve;
    curve.omega_min = std::min(curve.omega_min, p.rotor_min);
    curve.omega_max = std::max(curve.omega_max, p.rotor_max);
  }

  InnerLoop inner(cfg.control.filter_omega_n, cfg.control.filter_zeta, ts, p.rotor_min,
                  p.rotor_max);
  OuterLoopConfig ocfg;
  ocfg.mass = p.mass;
  ocfg.filter_omega_n = cfg.control.filter_omega_n;
  ocfg.filter_zeta = cfg.control.filter_zeta;
  ocfg.sample_time = ts;
  ocfg.attitude_limit = cfg.control.attitude_limit;
  ocfg.thrust_floor = cfg.control.thrust_floor;
  ocfg.pitch_guard = cfg.control.pitch_guard;
  ocfg.thrust_min = -4.0 * p.thrust_coeff * p.rotor_max * p.rotor_max;
  ocfg.thrust_max = -4.0 * p.thrust_coeff * p.rotor_min * p.rotor_min;
  ocfg.bias_omega_n = cfg.control.bias_omega_n;
  ocfg.bias_zeta = cfg.control.bias_zeta;
  OuterLoop outer(ocfg);

  PidConfig pid_cfg;
  pid_cfg.horizontal = cfg.control.pid_horizontal;
  pid_cfg.vertical = cfg.control.pid_vertical;
  pid_cfg.integrator_limit = cfg.control.pid_integrator_limit;
  pid_cfg.attitude_limit = cfg.control.attitude_limit;
  pid_cfg.thrust_min = ocfg.thrust_min;
  pid_cfg.thrust_max = ocfg.thrust_max;
  pid_cfg.mass = p.mass;
  PidController pid(pid_cfg);
  SyncFilter<1> pid_thrust_filter(cfg.control.filter_omega_n, cfg.control.filter_zeta, ts);
  SyncFilter<3> accel_log_filter(cfg.control.filter_omega_n, cfg.control.filter_zeta, ts);

  LmsStepSizes mu;
  mu.speed = cfg.adaptation.mu_speed;
  mu.accel = cfg.adaptation.mu_accel;
  LmsAdapter adapter(eff.stacked() * cfg.adaptation.initial_scale, mu, ts);
  SyncFilter<1> sfz_filter(cfg.control.filter_omega_n, cfg.control.filter_zeta, ts);
  Vec4 prev_omega_f{}, prev_delta_omega_f{};
  Vec3 prev_domega_f{};
  double prev_t_f = 0.0, prev_sfz_f = 0.0;

  SensorModels sensor_models = cfg.sensors;
  sensor_models.seed = cfg.seed;  // the scenario seed drives every noise stream
  SensorSim sensors(sensor_models, cfg.control.sample_rate);
  std::mt19937_64 wind_rng(cfg.seed ^ 0x9e3779b97f4a7c15ULL);
  std::normal_distribution<double> gauss(0.0, 1.0);

  std::vector<Waypoint> wps = cfg.waypoints;
  if (wps.empty()) wps.push_back({0.0, cfg.start_position});

  Trace trace;
  trace.columns = trace_columns();
  trace.rows.reserve(n_ticks);
  for (std::size_t i = 1; i < wps.size(); ++i) {
    if (wps[i].t > 0.0 && wps[i].t <= (n_ticks - 1) * ts) {
      trace.event_times.push_back(wps[i].t);
    }
  }

  Vec3 held_pos = cfg.start_position, held_vel{};
  std::size_t active_wp = 0;

  for (long k = 0; k < n_ticks; ++k) {
    const double t = k * ts;
    while (active_wp + 1 < wps.size() && wps[active_wp + 1].t <= t) ++active_wp;
    const Vec3 xi_ref = wps[active_wp].pos;

    Vec3 turb{};
    if (cfg.wind.turbulence_sigma > 0.0) {
      turb = Vec3{gauss(wind_rng), gauss(wind_rng), gauss(wind_rng)} * cfg.wind.turbulence_sigma;
    }
    const Vec3 wind_here = cfg.wind.base_velocity(state.xi, t) +
                           turb * cfg.wind.turbulence_factor(state.xi, t);

    const SensorReading reading = sensors.sample(state, p, wind_here, k);
    if (reading.has_fix) {
      held_pos = reading.pos_fix;
      held_vel = reading.vel_fix;
    }

    const EulerAngles eta_meas = euler_from_quat(state.q);
    const Vec3 accel_ned =
        quat_to_rotation(state.q) * reading.accel_body + Vec3{0.0, 0.0, kGravity};
    const double t_est = curve.total_thrust(state.rotor);

    if (k == 0) {
      inner.engage(reading.gyro, state.rotor);
      outer.engage(accel_ned, eta_meas, t_est);
      pid_thrust_filter.reset(t_est);
      accel_log_filter.reset(accel_ned);
      sfz_filter.reset(reading.accel_body.z);
      prev_sfz_f = reading.accel_body.z;
    }
    outer.update_bias(accel_ned,
                      reading.has_fix ? std::optional<Vec3>(reading.vel_fix) : std::nullopt);

    Vec3 nu = position_pd(xi_ref, held_pos, held_vel, cfg.control.position);
    for (const auto& w : cfg.accel_schedule) {
      if (t >= w.t_begin && t < w.t_end && cfg.controller != ControllerKind::pid) {
        nu = w.nu;
        break;
      }
    }

    ThrustVectorCommand cmd;
    Vec3 nu_logged = nu;
    Vec3 accel_f_logged;
    double t_filt_logged = t_est;
    switch (cfg.controller) {
      case ControllerKind::indi_linear:
        cmd = outer.linear_step(nu, accel_ned, eta_meas, t_est);
        accel_f_logged = outer.filtered_accel();
        t_filt_logged = outer.filtered_thrust();
        break;
      case ControllerKind::indi_nonlinear:
        cmd = outer.nonlinear_step(nu, accel_ned, eta_meas, t_est);
        accel_f_logged = outer.filtered_accel();
        t_filt_logged = outer.filtered_thrust();
        break;
      case ControllerKind::pid: {
        const PidCommand pc = pid.step(xi_ref, held_pos, held_vel, eta_meas.psi, ts);
        const double t_f_pid = pid_thrust_filter.step(t_est);
        cmd.phi_c = pc.phi_c;
        cmd.theta_c = pc.theta_c;
        cmd.t_c = pc.t_c;
        cmd.t_tilde = pc.t_c - t_f_pid;
        nu_logged = pc.accel_equiv;
        accel_f_logged = accel_log_filter.step(accel_ned - outer.bias());
        t_filt_logged = t_f_pid;
        break;
      }
    }

    const Quat q_ref = quat_from_euler({cmd.phi_c, cmd.theta_c, cfg.control.yaw_ref});
    const Vec3 nu_inner = attitude_pd(q_ref, state.q, reading.gyro, cfg.control.attitude);
    const Vec4 rotor_cmd = inner.step(eff, nu_inner, cmd.t_tilde, reading.gyro, state.rotor);

    bool saturated = false;
    {
      const Vec4 inc = inner.last_increment();
      const Vec4& wf = inner.filtered_rotor_speeds();
      for (int i = 0; i < 4; ++i) {
        const double raw = wf[i] + inc[i];
        if (raw < p.rotor_min || raw > p.rotor_max) saturated = true;
      }
    }

    if (cfg.adaptation.enabled) {
      const Vec4& omega_f = inner.filtered_rotor_speeds();
      double t_f_now = t_filt_logged;
      double sfz_now = prev_sfz_f;
      if (cfg.adaptation.thrust_target == ThrustTarget::accel) {
        sfz_now = sfz_filter.step(reading.accel_body.z);
      }
      if (k > 0) {
        const Vec4 d_omega_f = omega_f - prev_omega_f;
        const Vec4 d_domega_f = finite_difference(d_omega_f, prev_delta_omega_f, ts);
        const Vec3 d_dOmega_f = inner.filtered_angular_accel() - prev_domega_f;
        const double d_thrust = cfg.adaptation.thrust_target == ThrustTarget::curve
                                    ? (t_f_now - prev_t_f)
                                    : p.mass * (sfz_now - prev_sfz_f);
        adapter.step(d_omega_f, d_domega_f, d_dOmega_f, d_thrust);
        eff = EffectivenessModel(adapter.g1(), adapter.g2(), ts);
        prev_delta_omega_f = d_omega_f;
      }
      prev_omega_f = omega_f;
      prev_domega_f = inner.filtered_angular_accel();
      prev_t_f = t_f_now;
      prev_sfz_f = sfz_now;
    }

    std::vector<double> row;
    row.reserve(trace.columns.size());
    row.push_back(static_cast<double>(k));
    row.push_back(t);
    row.insert(row.end(), {state.xi.x, state.xi.y, state.xi.z});
    row.insert(row.end(), {xi_ref.x, xi_ref.y, xi_ref.z});
    row.insert(row.end(), {state.xi_dot.x, state.xi_dot.y, state.xi_dot.z});
    row.insert(row.end(), {eta_meas.phi, eta_meas.theta, eta_meas.psi});
    row.insert(row.end(), {state.omega_body.x, state.omega_body.y, state.omega_body.z});
    row.insert(row.end(), {state.rotor[0], state.rotor[1], state.rotor[2], state.rotor[3]});
    row.insert(row.end(), {rotor_cmd[0], rotor_cmd[1], rotor_cmd[2], rotor_cmd[3]});
    row.insert(row.end(), {nu_logged.x, nu_logged.y, nu_logged.z});
    row.insert(row.end(), {accel_f_logged.x, accel_f_logged.y, accel_f_logged.z});
    row.insert(row.end(), {accel_ned.x, accel_ned.y, accel_ned.z});
    row.insert(row.end(), {outer.bias().x, outer.bias().y, outer.bias().z});
    row.insert(row.end(), {cmd.phi_c, cmd.theta_c, cmd.t_tilde, cmd.t_c, t_filt_logged,
                           total_thrust(p, state.rotor)});
    row.insert(row.end(), {nu_inner.x, nu_inner.y, nu_inner.z});
    row.push_back(saturated ? 1.0 : 0.0);
    row.push_back(cmd.fallback ? 1.0 : 0.0);
    row.push_back(cmd.infeasible ? 1.0 : 0.0);
    row.push_back(cmd.attitude_clamped ? 1.0 : 0.0);
    row.push_back(outer.bias_stale() ? 1.0 : 0.0);
    row.insert(row.end(), {wind_here.x, wind_here.y, wind_here.z});
    row.push_back(reading.has_fix ? 1.0 : 0.0);
    trace.rows.push_back(std::move(row));

    dynamics_step(state, p, rotor_cmd, cfg.wind, ts, t, turb);
    if (!state.finite()) {
      throw NumericFailure("run_scenario: non-finite state at tick " + std::to_string(k + 1) +
                           " (t = " + std::to_string((k + 1) * ts) + " s)");
    }
  }
  return trace;
}

}  // namespace indi::sim
