#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include "indi/errors.hpp"
#include "indi/math/vec3.hpp"
#include "indi/sim/dynamics.hpp"
#include "indi/sim/vehicle.hpp"

namespace indi::sim {

struct SensorModels {
  double accel_noise_sigma{0.3};  // m/s^2
  Vec3 accel_bias{};              // m/s^2, body frame
  double gyro_noise_sigma{0.01};  // rad/s
  double fix_rate_hz{4.0};
  double pos_noise_sigma{0.002};  // m
  double vel_noise_sigma{0.02};   // m/s
  std::uint64_t seed{1};

  void validate() const {
    if (accel_noise_sigma < 0.0 || gyro_noise_sigma < 0.0 || pos_noise_sigma < 0.0 ||
        vel_noise_sigma < 0.0 || !(fix_rate_hz > 0.0)) {
      throw ContractViolation("SensorModels: noise levels must be >= 0 and fix rate positive");
    }
  }
};

struct SensorReading {
  Vec3 accel_body{};  // specific force, m/s^2
  Vec3 gyro{};        // rad/s
  bool has_fix{false};
  Vec3 pos_fix{};
  Vec3 vel_fix{};
};

/// Seeded sensor front end. The same seed reproduces the same reading
/// sequence bit for bit; position/velocity fixes are emitted every
/// round(control_rate / fix_rate) ticks starting at tick 0.
class SensorSim {
 public:
  SensorSim(const SensorModels& models, double control_rate_hz)
      : m_(models),
        fix_interval_(
            std::max<long>(1, std::lround(control_rate_hz / models.fix_rate_hz))),
        rng_(models.seed) {
    m_.validate();
  }

  SensorReading sample(const VehicleState& s, const VehicleParams& p, const Vec3& wind,
                       long tick) {
    SensorReading r;
    const Vec3 sf = specific_force_body(s, p, wind);
    r.accel_body = sf + m_.accel_bias + gauss3(m_.accel_noise_sigma);
    r.gyro = s.omega_body + gauss3(m_.gyro_noise_sigma);
    if (tick % fix_interval_ == 0) {
      r.has_fix = true;
      r.pos_fix = s.xi + gauss3(m_.pos_noise_sigma);
      r.vel_fix = s.xi_dot + gauss3(m_.vel_noise_sigma);
    }
    return r;
  }

  long fix_interval() const { return fix_interval_; }

 private:
  Vec3 gauss3(double sigma) {
    if (sigma <= 0.0) {
      return {};
    }
    return {sigma * normal_(rng_), sigma * normal_(rng_), sigma * normal_(rng_)};
  }

  SensorModels m_;
  long fix_interval_;
  std::mt19937_64 rng_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

}  // namespace indi::sim
