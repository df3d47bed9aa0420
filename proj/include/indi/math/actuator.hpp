#pragma once

#include <algorithm>
#include <array>

#include "indi/errors.hpp"
#include "indi/math/vec3.hpp"

namespace indi {

/// One step of the discrete first-order rotor response
/// A(z) = alpha / (z - (1 - alpha)): speed += alpha * (command - speed),
/// command and result clamped to the envelope.
inline double actuator_first_order_step(double speed, double command, double alpha,
                                        double min_speed, double max_speed) {
  const double cmd = std::clamp(command, min_speed, max_speed);
  return std::clamp(speed + alpha * (cmd - speed), min_speed, max_speed);
}

/// Discrete first-order rotor model A(z) = alpha / (z - (1 - alpha)):
/// omega(k+1) = (1 - alpha) * omega(k) + alpha * omega_c(k), clamped to the
/// speed envelope. alpha = 1 reproduces the command after one step.
class ActuatorModel {
 public:
  ActuatorModel(double alpha, double min_speed, double max_speed, const Vec4& initial = {})
      : alpha_(alpha), min_(min_speed), max_(max_speed) {
    if (!(alpha > 0.0) || alpha > 1.0 || !(max_speed > min_speed)) {
      throw ContractViolation("ActuatorModel: need 0 < alpha <= 1 and max > min");
    }
    reset(initial);
  }

  const Vec4& step(const Vec4& command) {
    for (int i = 0; i < 4; ++i) {
      speeds_[i] = actuator_first_order_step(speeds_[i], command[i], alpha_, min_, max_);
    }
    return speeds_;
  }

  void reset(const Vec4& speeds) {
    for (int i = 0; i < 4; ++i) speeds_[i] = clamp(speeds[i]);
  }

  const Vec4& speeds() const { return speeds_; }
  double alpha() const { return alpha_; }
  double min_speed() const { return min_; }
  double max_speed() const { return max_; }

  double clamp(double w) const { return std::clamp(w, min_, max_); }
  Vec4 clamp(const Vec4& w) const {
    return {clamp(w[0]), clamp(w[1]), clamp(w[2]), clamp(w[3])};
  }

 private:
  double alpha_, min_, max_;
  Vec4 speeds_{};
};

}  // namespace indi
