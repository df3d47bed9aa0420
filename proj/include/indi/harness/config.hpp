#pragma once

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "indi/errors.hpp"
#include "indi/sim/scenario.hpp"

namespace indi::harness {

namespace detail {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

inline std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

struct KeyContext {
  int line;
  std::string section;
  std::string key;
  std::string value;

  [[noreturn]] void fail(const std::string& why) const {
    throw ConfigError("line " + std::to_string(line) + ": " + why + " for key '" + key +
                      "' in [" + section + "]");
  }

  double num() const {
    std::size_t pos = 0;
    double v = 0.0;
    try {
      v = std::stod(value, &pos);
    } catch (...) {
      fail("expected a number, got '" + value + "'");
    }
    if (trim(value.substr(pos)) != "") fail("trailing characters in '" + value + "'");
    return v;
  }

  std::uint64_t uint() const {
    try {
      return std::stoull(value);
    } catch (...) {
      fail("expected an unsigned integer, got '" + value + "'");
    }
  }

  bool boolean() const {
    if (value == "true" || value == "1" || value == "on") return true;
    if (value == "false" || value == "0" || value == "off") return false;
    fail("expected true/false, got '" + value + "'");
  }

  std::vector<double> nums(std::size_t count) const {
    std::istringstream ss(value);
    std::vector<double> out;
    double v;
    while (ss >> v) out.push_back(v);
    std::string rest;
    if (ss.clear(), ss >> rest) fail("non-numeric token '" + rest + "'");
    if (out.size() != count) {
      fail("expected " + std::to_string(count) + " numbers, got " + std::to_string(out.size()));
    }
    return out;
  }
};

}  // namespace detail

/// Parses the flat key-value scenario format: `[section]` headers,
/// `key = value` lines, `#` comments. Unknown sections or keys are errors.
inline sim::ScenarioConfig parse_scenario(const std::string& text) {
  using detail::KeyContext;
  sim::ScenarioConfig cfg;
  cfg.waypoints.clear();

  std::istringstream in(text);
  std::string line, section;
  int lineno = 0;
  bool saw_waypoint = false;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') {
        throw ConfigError("line " + std::to_string(lineno) + ": unterminated section header");
      }
      section = detail::trim(line.substr(1, line.size() - 2));
      if (section != "scenario" && section != "vehicle" && section != "control" &&
          section != "wind" && section != "sensors" && section != "adaptation" &&
          section != "world" && section != "waypoints" && section != "maneuvers") {
        throw ConfigError("line " + std::to_string(lineno) + ": unknown section [" + section +
                          "]");
      }
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("line " + std::to_string(lineno) + ": expected 'key = value', got '" +
                        line + "'");
    }
    KeyContext kc{lineno, section, detail::trim(line.substr(0, eq)),
                  detail::trim(line.substr(eq + 1))};
    if (kc.key.empty()) kc.fail("empty key");

    if (section == "scenario") {
      if (kc.key == "name") {
        cfg.name = kc.value;
      } else if (kc.key == "controller") {
        if (kc.value == "indi-linear") {
          cfg.controller = sim::ControllerKind::indi_linear;
        } else if (kc.value == "indi-nonlinear") {
          cfg.controller = sim::ControllerKind::indi_nonlinear;
        } else if (kc.value == "pid") {
          cfg.controller = sim::ControllerKind::pid;
        } else {
          kc.fail("controller must be indi-linear, indi-nonlinear or pid");
        }
      } else if (kc.key == "duration_s") {
        cfg.duration = kc.num();
      } else if (kc.key == "seed") {
        cfg.seed = kc.uint();
      } else if (kc.key == "output") {
        cfg.output_path = kc.value;
      } else {
        kc.fail("unknown key");
      }
    } else if (section == "vehicle") {
      auto& v = cfg.vehicle;
      if (kc.key == "mass_kg") {
        v.mass = kc.num();
      } else if (kc.key == "inertia_xx") {
        v.inertia.x = kc.num();
      } else if (kc.key == "inertia_yy") {
        v.inertia.y = kc.num();
      } else if (kc.key == "inertia_zz") {
        v.inertia.z = kc.num();
      } else if (kc.key == "arm_l_m") {
        v.arm_l = kc.num();
      } else if (kc.key == "arm_b_m") {
        v.arm_b = kc.num();
      } else if (kc.key == "thrust_coeff") {
        v.thrust_coeff = kc.num();
      } else if (kc.key == "torque_coeff") {
        v.torque_coeff = kc.num();
      } else if (kc.key == "rotor_inertia") {
        v.rotor_inertia = kc.num();
      } else if (kc.key == "actuator_alpha") {
        v.actuator_alpha = kc.num();
      } else if (kc.key == "rotor_min_rad_s") {
        v.rotor_min = kc.num();
      } else if (kc.key == "rotor_max_rad_s") {
        v.rotor_max = kc.num();
      } else if (kc.key == "drag_n") {
        v.drag_coeff.x = kc.num();
      } else if (kc.key == "drag_e") {
        v.drag_coeff.y = kc.num();
      } else if (kc.key == "drag_d") {
        v.drag_coeff.z = kc.num();
      } else if (kc.key == "spin_dirs") {
        const auto s = kc.nums(4);
        for (int i = 0; i < 4; ++i) v.spin_dirs[i] = s[i];
      } else if (kc.key == "thrust_curve_csv") {
        cfg.thrust_curve_csv = kc.value;
      } else {
        kc.fail("unknown key");
      }
    } else if (section == "control") {
      auto& c = cfg.control;
      if (kc.key == "sample_rate_hz") {
        c.sample_rate = kc.num();
      } else if (kc.key == "k_eta") {
        c.attitude.k_eta = kc.num();
      } else if (kc.key == "k_omega") {
        c.attitude.k_omega = kc.num();
      } else if (kc.key == "k_xi") {
        c.position.k_xi = kc.num();
      } else if (kc.key == "k_xi_dot") {
        c.position.k_xi_dot = kc.num();
      } else if (kc.key == "filter_omega_n") {
        c.filter_omega_n = kc.num();
      } else if (kc.key == "filter_zeta") {
        c.filter_zeta = kc.num();
      } else if (kc.key == "attitude_limit_rad") {
        c.attitude_limit = kc.num();
      } else if (kc.key == "yaw_ref_rad") {
        c.yaw_ref = kc.num();
      } else if (kc.key == "thrust_floor_n") {
        c.thrust_floor = kc.num();
      } else if (kc.key == "pitch_guard_rad") {
        c.pitch_guard = kc.num();
      } else if (kc.key == "bias_omega_n") {
        c.bias_omega_n = kc.num();
      } else if (kc.key == "bias_zeta") {
        c.bias_zeta = kc.num();
      } else if (kc.key == "pid_p") {
        c.pid_horizontal.p = kc.num();
      } else if (kc.key == "pid_i") {
        c.pid_horizontal.i = kc.num();
      } else if (kc.key == "pid_d") {
        c.pid_horizontal.d = kc.num();
      } else if (kc.key == "pid_vp") {
        c.pid_vertical.p = kc.num();
      } else if (kc.key == "pid_vi") {
        c.pid_vertical.i = kc.num();
      } else if (kc.key == "pid_vd") {
        c.pid_vertical.d = kc.num();
      } else if (kc.key == "pid_integrator_limit") {
        c.pid_integrator_limit = kc.num();
      } else {
        kc.fail("unknown key");
      }
    } else if (section == "wind") {
      auto& w = cfg.wind;
      if (kc.key == "mode") {
        if (kc.value == "constant") {
          w.mode = sim::WindMode::constant;
        } else if (kc.value == "windtunnel-jet") {
          w.mode = sim::WindMode::windtunnel_jet;
        } else if (kc.value == "gust-step") {
          w.mode = sim::WindMode::gust_step;
        } else {
          kc.fail("mode must be constant, windtunnel-jet or gust-step");
        }
      } else if (kc.key == "wind_n") {
        w.wind.x = kc.num();
      } else if (kc.key == "wind_e") {
        w.wind.y = kc.num();
      } else if (kc.key == "wind_d") {
        w.wind.z = kc.num();
      } else if (kc.key == "jet_speed") {
        w.jet_speed = kc.num();
      } else if (kc.key == "jet_center_n") {
        w.jet_center.x = kc.num();
      } else if (kc.key == "jet_center_e") {
        w.jet_center.y = kc.num();
      } else if (kc.key == "jet_center_d") {
        w.jet_center.z = kc.num();
      } else if (kc.key == "jet_half_width") {
        w.jet_half_width = kc.num();
      } else if (kc.key == "blend_width") {
        w.blend_width = kc.num();
      } else if (kc.key == "turbulence_sigma") {
        w.turbulence_sigma = kc.num();
      } else if (kc.key == "gust_time_s") {
        w.gust_time = kc.num();
      } else {
        kc.fail("unknown key");
      }
    } else if (section == "sensors") {
      auto& s = cfg.sensors;
      if (kc.key == "accel_noise") {
        s.accel_noise_sigma = kc.num();
      } else if (kc.key == "accel_bias_n") {
        s.accel_bias.x = kc.num();
      } else if (kc.key == "accel_bias_e") {
        s.accel_bias.y = kc.num();
      } else if (kc.key == "accel_bias_d") {
        s.accel_bias.z = kc.num();
      } else if (kc.key == "gyro_noise") {
        s.gyro_noise_sigma = kc.num();
      } else if (kc.key == "fix_rate_hz") {
        s.fix_rate_hz = kc.num();
      } else if (kc.key == "pos_noise") {
        s.pos_noise_sigma = kc.num();
      } else if (kc.key == "vel_noise") {
        s.vel_noise_sigma = kc.num();
      } else {
        kc.fail("unknown key");
      }
    } else if (section == "adaptation") {
      auto& a = cfg.adaptation;
      if (kc.key == "enabled") {
        a.enabled = kc.boolean();
      } else if (kc.key == "mu_speed") {
        a.mu_speed = kc.num();
      } else if (kc.key == "mu_accel") {
        a.mu_accel = kc.num();
      } else if (kc.key == "thrust_target") {
        if (kc.value == "curve") {
          a.thrust_target = sim::ThrustTarget::curve;
        } else if (kc.value == "accel") {
          a.thrust_target = sim::ThrustTarget::accel;
        } else {
          kc.fail("thrust_target must be curve or accel");
        }
      } else if (kc.key == "initial_scale") {
        a.initial_scale = kc.num();
      } else {
        kc.fail("unknown key");
      }
    } else if (section == "world") {
      if (kc.key == "start_n") {
        cfg.start_position.x = kc.num();
      } else if (kc.key == "start_e") {
        cfg.start_position.y = kc.num();
      } else if (kc.key == "start_d") {
        cfg.start_position.z = kc.num();
      } else if (kc.key == "start_on_ground") {
        cfg.start_on_ground = kc.boolean();
      } else if (kc.key == "ground_d") {
        cfg.ground_level = kc.num();
      } else {
        kc.fail("unknown key");
      }
    } else if (section == "waypoints") {
      if (kc.key == "wp") {
        const auto v = kc.nums(4);
        cfg.waypoints.push_back({v[0], {v[1], v[2], v[3]}});
        saw_waypoint = true;
      } else {
        kc.fail("unknown key");
      }
    } else if (section == "maneuvers") {
      if (kc.key == "accel") {
        const auto v = kc.nums(5);
        cfg.accel_schedule.push_back({v[0], v[1], {v[2], v[3], v[4]}});
      } else {
        kc.fail("unknown key");
      }
    } else {
      throw ConfigError("line " + std::to_string(lineno) + ": key '" + kc.key +
                        "' appears before any [section]");
    }
  }
  if (!saw_waypoint) cfg.waypoints.push_back({0.0, cfg.start_position});
  cfg.validate();
  return cfg;
}

inline sim::ScenarioConfig load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_scenario(ss.str());
}

/// Canonical text form; parse(serialize(cfg)) reproduces cfg exactly.
inline std::string serialize_scenario(const sim::ScenarioConfig& cfg) {
  using detail::fmt;
  std::ostringstream o;
  o << "[scenario]\n";
  o << "name = " << cfg.name << "\n";
  o << "controller = "
    << (cfg.controller == sim::ControllerKind::indi_linear      ? "indi-linear"
        : cfg.controller == sim::ControllerKind::indi_nonlinear ? "indi-nonlinear"
                                                                : "pid")
    << "\n";
  o << "duration_s = " << fmt(cfg.duration) << "\n";
  o << "seed = " << cfg.seed << "\n";
  o << "output = " << cfg.output_path << "\n";

  const auto& v = cfg.vehicle;
  o << "\n[vehicle]\n";
  o << "mass_kg = " << fmt(v.mass) << "\n";
  o << "inertia_xx = " << fmt(v.inertia.x) << "\n";
  o << "inertia_yy = " << fmt(v.inertia.y) << "\n";
  o << "inertia_zz = " << fmt(v.inertia.z) << "\n";
  o << "arm_l_m = " << fmt(v.arm_l) << "\n";
  o << "arm_b_m = " << fmt(v.arm_b) << "\n";
  o << "thrust_coeff = " << fmt(v.thrust_coeff) << "\n";
  o << "torque_coeff = " << fmt(v.torque_coeff) << "\n";
  o << "rotor_inertia = " << fmt(v.rotor_inertia) << "\n";
  o << "actuator_alpha = " << fmt(v.actuator_alpha) << "\n";
  o << "rotor_min_rad_s = " << fmt(v.rotor_min) << "\n";
  o << "rotor_max_rad_s = " << fmt(v.rotor_max) << "\n";
  o << "drag_n = " << fmt(v.drag_coeff.x) << "\n";
  o << "drag_e = " << fmt(v.drag_coeff.y) << "\n";
  o << "drag_d = " << fmt(v.drag_coeff.z) << "\n";
  o << "spin_dirs = " << fmt(v.spin_dirs[0]) << " " << fmt(v.spin_dirs[1]) << " "
    << fmt(v.spin_dirs[2]) << " " << fmt(v.spin_dirs[3]) << "\n";
  if (!cfg.thrust_curve_csv.empty()) {
    o << "thrust_curve_csv = " << cfg.thrust_curve_csv << "\n";
  }

  const auto& c = cfg.control;
  o << "\n[control]\n";
  o << "sample_rate_hz = " << fmt(c.sample_rate) << "\n";
  o << "k_eta = " << fmt(c.attitude.k_eta) << "\n";
  o << "k_omega = " << fmt(c.attitude.k_omega) << "\n";
  o << "k_xi = " << fmt(c.position.k_xi) << "\n";
  o << "k_xi_dot = " << fmt(c.position.k_xi_dot) << "\n";
  o << "filter_omega_n = " << fmt(c.filter_omega_n) << "\n";
  o << "filter_zeta = " << fmt(c.filter_zeta) << "\n";
  o << "attitude_limit_rad = " << fmt(c.attitude_limit) << "\n";
  o << "yaw_ref_rad = " << fmt(c.yaw_ref) << "\n";
  o << "thrust_floor_n = " << fmt(c.thrust_floor) << "\n";
  o << "pitch_guard_rad = " << fmt(c.pitch_guard) << "\n";
  o << "bias_omega_n = " << fmt(c.bias_omega_n) << "\n";
  o << "bias_zeta = " << fmt(c.bias_zeta) << "\n";
  o << "pid_p = " << fmt(c.pid_horizontal.p) << "\n";
  o << "pid_i = " << fmt(c.pid_horizontal.i) << "\n";
  o << "pid_d = " << fmt(c.pid_horizontal.d) << "\n";
  o << "pid_vp = " << fmt(c.pid_vertical.p) << "\n";
  o << "pid_vi = " << fmt(c.pid_vertical.i) << "\n";
  o << "pid_vd = " << fmt(c.pid_vertical.d) << "\n";
  o << "pid_integrator_limit = " << fmt(c.pid_integrator_limit) << "\n";

  const auto& w = cfg.wind;
  o << "\n[wind]\n";
  o << "mode = "
    << (w.mode == sim::WindMode::constant         ? "constant"
        : w.mode == sim::WindMode::windtunnel_jet ? "windtunnel-jet"
                                                  : "gust-step")
    << "\n";
  o << "wind_n = " << fmt(w.wind.x) << "\n";
  o << "wind_e = " << fmt(w.wind.y) << "\n";
  o << "wind_d = " << fmt(w.wind.z) << "\n";
  o << "jet_speed = " << fmt(w.jet_speed) << "\n";
  o << "jet_center_n = " << fmt(w.jet_center.x) << "\n";
  o << "jet_center_e = " << fmt(w.jet_center.y) << "\n";
  o << "jet_center_d = " << fmt(w.jet_center.z) << "\n";
  o << "jet_half_width = " << fmt(w.jet_half_width) << "\n";
  o << "blend_width = " << fmt(w.blend_width) << "\n";
  o << "turbulence_sigma = " << fmt(w.turbulence_sigma) << "\n";
  o << "gust_time_s = " << fmt(w.gust_time) << "\n";

  const auto& s = cfg.sensors;
  o << "\n[sensors]\n";
  o << "accel_noise = " << fmt(s.accel_noise_sigma) << "\n";
  o << "accel_bias_n = " << fmt(s.accel_bias.x) << "\n";
  o << "accel_bias_e = " << fmt(s.accel_bias.y) << "\n";
  o << "accel_bias_d = " << fmt(s.accel_bias.z) << "\n";
  o << "gyro_noise = " << fmt(s.gyro_noise_sigma) << "\n";
  o << "fix_rate_hz = " << fmt(s.fix_rate_hz) << "\n";
  o << "pos_noise = " << fmt(s.pos_noise_sigma) << "\n";
  o << "vel_noise = " << fmt(s.vel_noise_sigma) << "\n";

  const auto& a = cfg.adaptation;
  o << "\n[adaptation]\n";
  o << "enabled = " << (a.enabled ? "true" : "false") << "\n";
  o << "mu_speed = " << fmt(a.mu_speed) << "\n";
  o << "mu_accel = " << fmt(a.mu_accel) << "\n";
  o << "thrust_target = " << (a.thrust_target == sim::ThrustTarget::curve ? "curve" : "accel")
    << "\n";
  o << "initial_scale = " << fmt(a.initial_scale) << "\n";

  o << "\n[world]\n";
  o << "start_n = " << fmt(cfg.start_position.x) << "\n";
  o << "start_e = " << fmt(cfg.start_position.y) << "\n";
  o << "start_d = " << fmt(cfg.start_position.z) << "\n";
  o << "start_on_ground = " << (cfg.start_on_ground ? "true" : "false") << "\n";
  o << "ground_d = " << fmt(cfg.ground_level) << "\n";

  o << "\n[waypoints]\n";
  for (const auto& wp : cfg.waypoints) {
    o << "wp = " << fmt(wp.t) << " " << fmt(wp.pos.x) << " " << fmt(wp.pos.y) << " "
      << fmt(wp.pos.z) << "\n";
  }
  if (!cfg.accel_schedule.empty()) {
    o << "\n[maneuvers]\n";
    for (const auto& m : cfg.accel_schedule) {
      o << "accel = " << fmt(m.t_begin) << " " << fmt(m.t_end) << " " << fmt(m.nu.x) << " "
        << fmt(m.nu.y) << " " << fmt(m.nu.z) << "\n";
    }
  }
  return o.str();
}

}  // namespace indi::harness
