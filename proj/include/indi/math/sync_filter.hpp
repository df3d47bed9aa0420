#pragma once

#include <array>
#include <cmath>
#include <cstddef>

#include "indi/errors.hpp"
#include "indi/math/vec3.hpp"

namespace indi {

/// Second-order low-pass filter H(s) = wn^2 / (s^2 + 2 zeta wn s + wn^2),
/// discretized with the bilinear transform and stepped at a fixed rate.
///
/// Every feedback signal of the incremental laws must pass through a filter
/// with identical (wn, zeta, Ts) so that all terms carry the same delay.
/// Identical parameters produce bit-identical coefficients, hence bit-identical
/// outputs for identical inputs; the bilinear mapping keeps the DC gain at
/// exactly 1 so increments vanish in steady state.
///
/// N is the channel count; channels share coefficients but hold separate state.
template <std::size_t N>
class SyncFilter {
 public:
  SyncFilter(double omega_n, double zeta, double sample_time)
      : omega_n_(omega_n), zeta_(zeta), ts_(sample_time) {
    if (!(omega_n > 0.0) || !(zeta > 0.0) || !(sample_time > 0.0)) {
      throw ContractViolation("SyncFilter: omega_n, zeta and sample_time must be positive");
    }
    const double k = 2.0 / sample_time;
    const double wn2 = omega_n * omega_n;
    const double a0 = k * k + 2.0 * zeta * omega_n * k + wn2;
    b0_ = wn2 / a0;
    b1_ = 2.0 * wn2 / a0;
    b2_ = wn2 / a0;
    a1_ = (2.0 * wn2 - 2.0 * k * k) / a0;
    a2_ = (k * k - 2.0 * zeta * omega_n * k + wn2) / a0;
    s1_.fill(0.0);
    s2_.fill(0.0);
    y_.fill(0.0);
  }

  /// Advances one tick and returns the filtered sample. Direct form II transposed.
  std::array<double, N> step(const std::array<double, N>& x) {
    for (std::size_t i = 0; i < N; ++i) {
      const double y = b0_ * x[i] + s1_[i];
      s1_[i] = b1_ * x[i] - a1_ * y + s2_[i];
      s2_[i] = b2_ * x[i] - a2_ * y;
      y_[i] = y;
    }
    return y_;
  }

  Vec3 step(const Vec3& v) requires(N == 3) {
    const auto y = step(std::array<double, 3>{v.x, v.y, v.z});
    return {y[0], y[1], y[2]};
  }

  double step(double v) requires(N == 1) { return step(std::array<double, 1>{v})[0]; }

  /// Sets the state to the equilibrium of `steady`, so holding `steady` at the
  /// input reproduces it at the output from the first tick (warm start).
  void reset(const std::array<double, N>& steady) {
    for (std::size_t i = 0; i < N; ++i) {
      s2_[i] = (b2_ - a2_) * steady[i];
      s1_[i] = (b1_ - a1_) * steady[i] + s2_[i];
      y_[i] = steady[i];
    }
  }

  void reset(const Vec3& v) requires(N == 3) { reset(std::array<double, 3>{v.x, v.y, v.z}); }
  void reset(double v) requires(N == 1) { reset(std::array<double, 1>{v}); }

  const std::array<double, N>& output() const { return y_; }

  double omega_n() const { return omega_n_; }
  double zeta() const { return zeta_; }
  double sample_time() const { return ts_; }

 private:
  double omega_n_, zeta_, ts_;
  double b0_, b1_, b2_, a1_, a2_;
  std::array<double, N> s1_{}, s2_{}, y_{};
};

}  // namespace indi
