#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <istream>
#include <sstream>
#include <string>
#include <vector>

#include "indi/errors.hpp"
#include "indi/math/vec3.hpp"

namespace indi {

/// Gradient step sizes for the effectiveness estimator. mu1 weights the eight
/// regressor channels (rotor-speed block, then rotor-acceleration block), mu2
/// the four output rows.
struct LmsStepSizes {
  double speed{1e-3};
  double accel{1e-4};
  Eigen::Matrix<double, 4, 1> row_weights{Eigen::Matrix<double, 4, 1>::Ones()};
  // thrust responds to rotor speed, not rotor acceleration: those four
  // entries stay pinned at zero unless explicitly released
  bool freeze_g2_thrust_row{true};
};

/// Online estimator of the stacked effectiveness matrix G = [G1 G2]:
///   G(k) = G(k-1) - mu2 (G(k-1) x - y) x^T mu1
/// with x = [d_omega_f; Ts * d_domega_f] and y = [d_dOmega_f; dT].
///
/// The rotor-acceleration block is pre-scaled by the sample time so the stored
/// right half uses the same per-rad/s convention as EffectivenessModel::g2().
/// The update is applied unconditionally; step sizes must keep
/// ||I - mu2 x x^T mu1|| < 1 for the excitation at hand.
class LmsAdapter {
 public:
  LmsAdapter(const Eigen::Matrix<double, 4, 8>& initial_g, const LmsStepSizes& mu,
             double sample_time)
      : g_(initial_g), ts_(sample_time), freeze_g2_thrust_row_(mu.freeze_g2_thrust_row) {
    mu1_.setZero();
    for (int i = 0; i < 4; ++i) mu1_(i) = mu.speed;
    for (int i = 4; i < 8; ++i) mu1_(i) = mu.accel;
    mu2_ = mu.row_weights;
    if (freeze_g2_thrust_row_) g_.row(3).tail<4>().setZero();
  }

  /// One gradient step. d_domega_f is in rad/s^2; the y target stacks the
  /// filtered angular-acceleration difference [rad/s^2] and the thrust
  /// difference [N].
  const Eigen::Matrix<double, 4, 8>& step(const Vec4& d_omega_f, const Vec4& d_domega_f,
                                          const Vec3& d_dOmega_f, double d_thrust) {
    Eigen::Matrix<double, 8, 1> x;
    x << d_omega_f[0], d_omega_f[1], d_omega_f[2], d_omega_f[3],
        ts_ * d_domega_f[0], ts_ * d_domega_f[1], ts_ * d_domega_f[2], ts_ * d_domega_f[3];
    Eigen::Matrix<double, 4, 1> y;
    y << d_dOmega_f.x, d_dOmega_f.y, d_dOmega_f.z, d_thrust;
    if (!x.allFinite() || !y.allFinite()) {
      throw ContractViolation("LmsAdapter::step: non-finite regressor or target");
    }
    const Eigen::Matrix<double, 4, 1> residual = g_ * x - y;
    g_ -= mu2_.asDiagonal() * residual * (x.transpose() * mu1_.asDiagonal());
    if (freeze_g2_thrust_row_) g_.row(3).tail<4>().setZero();
    return g_;
  }

  const Eigen::Matrix<double, 4, 8>& g() const { return g_; }
  Eigen::Matrix4d g1() const { return g_.leftCols<4>(); }
  Eigen::Matrix4d g2() const { return g_.rightCols<4>(); }
  double sample_time() const { return ts_; }

 private:
  Eigen::Matrix<double, 4, 8> g_;
  Eigen::Matrix<double, 8, 1> mu1_;
  Eigen::Matrix<double, 4, 1> mu2_;
  double ts_;
  bool freeze_g2_thrust_row_;
};

/// Static per-rotor thrust model T(w) = c0 + c1 w + c2 w^2 [N], fitted from
/// bench measurements. Coefficients describe the (positive) produced thrust;
/// total_thrust applies the body-Z-down sign.
struct ThrustCurve {
  double c0{0.0};
  double c1{0.0};
  double c2{0.0};
  double omega_min{0.0};
  double omega_max{0.0};

  double per_rotor(double omega) const { return c0 + c1 * omega + c2 * omega * omega; }

  /// Signed total thrust of all four rotors (negative along body Z).
  double total_thrust(const Vec4& omega) const {
    double sum = 0.0;
    for (double w : omega) {
      if (w < omega_min - 1e-9 || w > omega_max + 1e-9) {
        throw ContractViolation("ThrustCurve: rotor speed outside operating range");
      }
      sum += per_rotor(w);
    }
    return -sum;
  }

  bool monotonic_increasing() const {
    // derivative c1 + 2 c2 w positive across the operating range
    return per_rotor_slope(omega_min) > 0.0 && per_rotor_slope(omega_max) > 0.0;
  }

  double per_rotor_slope(double omega) const { return c1 + 2.0 * c2 * omega; }
};

struct ThrustSample {
  double omega;   // rad/s
  double thrust;  // N, positive produced thrust
};

struct ThrustFit {
  ThrustCurve curve;
  double rms_residual{0.0};
};

/// Least-squares quadratic fit. Needs at least three distinct speeds.
inline ThrustFit fit_thrust_curve(const std::vector<ThrustSample>& samples) {
  if (samples.size() < 3) {
    throw ContractViolation("fit_thrust_curve: need at least 3 samples");
  }
  const int n = static_cast<int>(samples.size());
  Eigen::MatrixXd a(n, 3);
  Eigen::VectorXd b(n);
  double wmin = samples[0].omega, wmax = samples[0].omega;
  for (int i = 0; i < n; ++i) {
    const double w = samples[i].omega;
    a(i, 0) = 1.0;
    a(i, 1) = w;
    a(i, 2) = w * w;
    b(i) = samples[i].thrust;
    wmin = std::min(wmin, w);
    wmax = std::max(wmax, w);
  }
  const Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(a);
  if (qr.rank() < 3) {
    throw ContractViolation("fit_thrust_curve: rank-deficient sample set");
  }
  const Eigen::Vector3d c = qr.solve(b);
  ThrustFit fit;
  fit.curve = ThrustCurve{c(0), c(1), c(2), wmin, wmax};
  fit.rms_residual = std::sqrt((a * c - b).squaredNorm() / n);
  return fit;
}

/// Two-column CSV (omega_rad_s, thrust_N); `#` starts a comment, an optional
/// header row is skipped.
inline std::vector<ThrustSample> load_thrust_samples(std::istream& in) {
  std::vector<ThrustSample> samples;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    if (line.find_first_not_of(" \t\r\n") == std::string::npos) continue;
    for (char& ch : line) {
      if (ch == ',') ch = ' ';
    }
    std::istringstream ls(line);
    ThrustSample s{};
    if (!(ls >> s.omega >> s.thrust)) {
      if (lineno == 1) continue;  // header
      throw ConfigError("thrust samples: cannot parse line " + std::to_string(lineno));
    }
    samples.push_back(s);
  }
  return samples;
}

}  // namespace indi
