#pragma once

#include <Eigen/Dense>
#include <cmath>

#include "indi/errors.hpp"
#include "indi/math/vec3.hpp"

namespace indi {

/// Static control-effectiveness pair. Rows are roll, pitch, yaw angular
/// acceleration [rad/s^2] and thrust [N]; columns are rotors.
///
/// G1 multiplies rotor-speed deviations [rad/s]. G2 multiplies rotor-speed
/// differences between consecutive samples (the sample time is factored out,
/// so its entries are also per rad/s). The thrust row of G2 is pinned to
/// zero: thrust follows rotor speed, not rotor acceleration.
class EffectivenessModel {
 public:
  EffectivenessModel(const Eigen::Matrix4d& g1, const Eigen::Matrix4d& g2, double sample_time)
      : g1_(g1), g2_(g2), ts_(sample_time) {
    if (!(sample_time > 0.0)) {
      throw ContractViolation("EffectivenessModel: sample_time must be positive");
    }
    if (g2_.row(3).cwiseAbs().maxCoeff() != 0.0) {
      throw ContractViolation("EffectivenessModel: thrust row of G2 must be zero");
    }
    const Eigen::Matrix4d sum = g1_ + g2_;
    Eigen::JacobiSVD<Eigen::Matrix4d> svd(sum);
    const double smin = svd.singularValues()(3);
    condition_ = smin > 0.0 ? svd.singularValues()(0) / smin
                            : std::numeric_limits<double>::infinity();
    if (!(condition_ < 1e6)) {
      throw SingularInversion("EffectivenessModel: cond(G1+G2) = " + std::to_string(condition_));
    }
    sum_inverse_ = sum.inverse();
  }

  const Eigen::Matrix4d& g1() const { return g1_; }
  const Eigen::Matrix4d& g2() const { return g2_; }
  const Eigen::Matrix4d& sum_inverse() const { return sum_inverse_; }
  double sample_time() const { return ts_; }
  double condition_number() const { return condition_; }

  /// Stacked [G1 G2], the layout the LMS adapter estimates.
  Eigen::Matrix<double, 4, 8> stacked() const {
    Eigen::Matrix<double, 4, 8> g;
    g << g1_, g2_;
    return g;
  }

 private:
  Eigen::Matrix4d g1_, g2_;
  double ts_;
  Eigen::Matrix4d sum_inverse_;
  double condition_;
};

}  // namespace indi
