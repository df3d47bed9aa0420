#pragma once

#include <algorithm>
#include <cmath>

#include "indi/errors.hpp"
#include "indi/math/vec3.hpp"

namespace indi::sim {

enum class WindMode { constant, windtunnel_jet, gust_step };

/// Wind velocity field. The windtunnel jet blows along +N through a square
/// cross-section in the ED plane with a thin linear blend at the edge; the
/// gust step switches a uniform wind on at a fixed time.
struct WindField {
  WindMode mode{WindMode::constant};
  Vec3 wind{};            // m/s; constant value or gust-step target
  double jet_speed{0.0};  // m/s along +N
  Vec3 jet_center{};      // m, centre of the cross-section
  double jet_half_width{1.425};  // m (2.85 m square opening)
  double blend_width{0.1};       // m, edge transition
  double turbulence_sigma{0.0};  // m/s, white noise inside the stream
  double gust_time{0.0};         // s

  void validate() const {
    if (mode == WindMode::windtunnel_jet && (jet_speed < 0.0 || jet_speed > 30.0)) {
      throw ContractViolation("WindField: jet speed must lie in [0, 30] m/s");
    }
    if (blend_width < 0.0 || jet_half_width <= 0.0 || turbulence_sigma < 0.0) {
      throw ContractViolation("WindField: bad jet geometry or turbulence level");
    }
  }

  /// 1 deep inside the jet cross-section, 0 outside, linear over blend_width.
  double jet_factor(const Vec3& pos) const {
    if (mode != WindMode::windtunnel_jet) return 0.0;
    const double d = std::max(std::abs(pos.y - jet_center.y), std::abs(pos.z - jet_center.z));
    if (blend_width <= 0.0) return d <= jet_half_width ? 1.0 : 0.0;
    return std::clamp((jet_half_width - d) / blend_width, 0.0, 1.0);
  }

  /// Deterministic part of the wind at a point and time.
  Vec3 base_velocity(const Vec3& pos, double t) const {
    switch (mode) {
      case WindMode::constant:
        return wind;
      case WindMode::gust_step:
        return t >= gust_time ? wind : Vec3{};
      case WindMode::windtunnel_jet:
        return Vec3{jet_speed, 0.0, 0.0} * jet_factor(pos);
    }
    return {};
  }

  /// Scale applied to the per-tick turbulence sample at this point.
  double turbulence_factor(const Vec3& pos, double t) const {
    if (turbulence_sigma <= 0.0) return 0.0;
    switch (mode) {
      case WindMode::constant:
        return wind.norm() > 0.0 ? 1.0 : 0.0;
      case WindMode::gust_step:
        return t >= gust_time ? 1.0 : 0.0;
      case WindMode::windtunnel_jet:
        return jet_factor(pos);
    }
    return 0.0;
  }
};

}  // namespace indi::sim
