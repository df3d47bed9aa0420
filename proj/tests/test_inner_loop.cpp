#include <catch2/catch_amalgamated.hpp>
#include <cmath>
#include <random>

#include "indi/control/inner_loop.hpp"
#include "indi/sim/vehicle.hpp"
#include "oracles.hpp"

using namespace indi;

namespace {
constexpr double kTs = 1.0 / 512.0;

EffectivenessModel nominal() { return sim::VehicleParams{}.nominal_effectiveness(kTs); }
}  // namespace

TEST_CASE("equilibrium produces a zero increment") {
  const auto eff = nominal();
  const sim::VehicleParams p{};
  SECTION("zero bracket: command equals the filtered feedback exactly") {
    InnerLoop loop(50.0, 0.55, kTs, p.rotor_min, p.rotor_max);
    const Vec4 rotors{700.0, 700.0, 700.0, 700.0};
    loop.engage(Vec3{}, rotors);
    for (int k = 0; k < 20; ++k) {
      const Vec4 cmd = loop.step(eff, Vec3{}, 0.0, Vec3{}, rotors);
      const Vec4 inc = loop.last_increment();
      const Vec4& wf = loop.filtered_rotor_speeds();
      for (int i = 0; i < 4; ++i) {
        REQUIRE(inc[i] == 0.0);
        REQUIRE(cmd[i] == wf[i]);
      }
    }
  }
  SECTION("constant nonzero rates hold the command at the feedback") {
    InnerLoop loop(50.0, 0.55, kTs, p.rotor_min, p.rotor_max);
    const Vec4 rotors{700.0, 700.0, 700.0, 700.0};
    const Vec3 gyro{0.02, -0.01, 0.005};
    loop.engage(gyro, rotors);
    for (int k = 0; k < 20; ++k) {
      const Vec4 cmd = loop.step(eff, Vec3{}, 0.0, gyro, rotors);
      for (int i = 0; i < 4; ++i) REQUIRE(std::abs(cmd[i] - rotors[i]) < 1e-9);
    }
  }
}

TEST_CASE("pure thrust increment moves all rotors together") {
  const auto eff = nominal();
  const sim::VehicleParams p{};
  InnerLoop loop(50.0, 0.55, kTs, p.rotor_min, p.rotor_max);
  const Vec4 rotors{700.0, 700.0, 700.0, 700.0};
  loop.engage(Vec3{}, rotors);
  // climb: more negative thrust means faster rotors
  loop.step(eff, Vec3{}, -1.0, Vec3{}, rotors);
  const Vec4 inc = loop.last_increment();
  CHECK(inc[0] > 0.0);
  for (int i = 1; i < 4; ++i) REQUIRE(std::abs(inc[i] - inc[0]) < 1e-12);
  // analytic mixing of the symmetric thrust row
  const double want = 1.0 / (8.0 * p.thrust_coeff * p.hover_speed());
  CHECK(std::abs(inc[0] - want) < 1e-9);
}

TEST_CASE("inversion consistency holds along random trajectories") {
  const auto eff = nominal();
  const sim::VehicleParams p{};
  InnerLoop loop(50.0, 0.55, kTs, p.rotor_min, p.rotor_max);
  std::mt19937_64 rng(17);
  std::normal_distribution<double> nd(0.0, 1.0);
  Vec4 rotors{700.0, 690.0, 710.0, 701.0};
  loop.engage(Vec3{0.1, 0.0, -0.2}, rotors);

  Eigen::Vector4d prev_inc = Eigen::Vector4d::Zero();
  for (int k = 0; k < 300; ++k) {
    const Vec3 nu{5.0 * nd(rng), 5.0 * nd(rng), 2.0 * nd(rng)};
    const double t_tilde = 0.3 * nd(rng);
    const Vec3 gyro{0.5 * nd(rng), 0.5 * nd(rng), 0.2 * nd(rng)};
    for (int i = 0; i < 4; ++i) rotors[i] = 700.0 + 20.0 * nd(rng);
    loop.step(eff, nu, t_tilde, gyro, rotors);

    const Vec4 inc = loop.last_increment();
    Eigen::Vector4d dw;
    dw << inc[0], inc[1], inc[2], inc[3];
    const Eigen::Vector4d lhs = (eff.g1() + eff.g2()) * dw - eff.g2() * prev_inc;
    const Vec3 dof = loop.filtered_angular_accel();
    Eigen::Vector4d rhs;
    rhs << nu.x - dof.x, nu.y - dof.y, nu.z - dof.z, t_tilde;
    REQUIRE((lhs - rhs).cwiseAbs().maxCoeff() < 1e-9);
    prev_inc = dw;
  }
}

TEST_CASE("commands are clamped to the speed envelope") {
  const auto eff = nominal();
  const sim::VehicleParams p{};
  InnerLoop loop(50.0, 0.55, kTs, p.rotor_min, p.rotor_max);
  const Vec4 rotors{700.0, 700.0, 700.0, 700.0};
  loop.engage(Vec3{}, rotors);
  const Vec4 cmd = loop.step(eff, Vec3{2000.0, 0.0, 0.0}, 0.0, Vec3{}, rotors);
  for (int i = 0; i < 4; ++i) {
    REQUIRE(cmd[i] >= p.rotor_min);
    REQUIRE(cmd[i] <= p.rotor_max);
  }
}

TEST_CASE("non-finite inputs are rejected") {
  const auto eff = nominal();
  InnerLoop loop(50.0, 0.55, kTs, 200.0, 1200.0);
  loop.engage(Vec3{}, Vec4{700, 700, 700, 700});
  CHECK_THROWS_AS(
      loop.step(eff, Vec3{std::nan(""), 0, 0}, 0.0, Vec3{}, Vec4{700, 700, 700, 700}),
      ContractViolation);
}

TEST_CASE("attitude PD") {
  const AttitudeGains gains{10.7, 28.0};
  SECTION("zero error, zero rate gives zero control") {
    const Quat q = quat_from_euler({0.3, -0.2, 1.0});
    const Vec3 nu = attitude_pd(q, q, Vec3{}, gains);
    CHECK(nu.norm() < 1e-12);
  }
  SECTION("small roll error expands to K_omega K_eta eps") {
    const double eps = 1e-4;
    const Quat q_ref = quat_from_euler({eps, 0.0, 0.0});
    const Vec3 nu = attitude_pd(q_ref, Quat{}, Vec3{}, gains);
    CHECK(std::abs(nu.x - gains.k_omega * gains.k_eta * eps) < 10.0 * eps * eps);
    CHECK(std::abs(nu.y) < 1e-9);
    CHECK(std::abs(nu.z) < 1e-9);
  }
  SECTION("rate damping") {
    const Quat q = quat_from_euler({0.0, 0.0, 0.0});
    const Vec3 nu = attitude_pd(q, q, Vec3{1.0, 0.0, 0.0}, gains);
    CHECK(std::abs(nu.x + gains.k_omega) < 1e-12);
  }
  SECTION("double-cover invariance") {
    std::mt19937_64 rng(3);
    for (int n = 0; n < 100; ++n) {
      const Quat q_ref = oracle::random_unit_quat(rng);
      const Quat q = oracle::random_unit_quat(rng);
      const Vec3 om{0.3, -0.1, 0.2};
      const Vec3 a = attitude_pd(q_ref, q, om, gains);
      const Vec3 b = attitude_pd(-q_ref, q, om, gains);
      REQUIRE(a.x == b.x);
      REQUIRE(a.y == b.y);
      REQUIRE(a.z == b.z);
    }
  }
}

TEST_CASE("closed-loop poles") {
  SECTION("published design point") {
    const auto poles = closed_loop_poles(AttitudeGains{10.7, 28.0}, 0.1, 1.0 / 512.0);
    // complex pair first (larger real part), then the real pole
    CHECK(std::abs(poles[0].real() - 0.968) < 1e-3);
    CHECK(std::abs(std::abs(poles[0].imag()) - 0.0463) < 1e-3);
    CHECK(std::abs(poles[1].real() - 0.968) < 1e-3);
    CHECK(std::abs(poles[2].real() - 0.964) < 1e-3);
    CHECK(std::abs(poles[2].imag()) < 1e-9);
    CHECK(poles[0].imag() == -poles[1].imag());
    for (const auto& p : poles) CHECK(std::abs(p) < 1.0);
  }
  SECTION("zero rate gain factorizes the open loop") {
    const double alpha = 0.1;
    const auto poles = closed_loop_poles(AttitudeGains{5.0, 0.0}, alpha, 1.0 / 512.0);
    // z^3 - (3-a) z^2 + (3-2a) z - (1-a) = (z - 1)^2 (z - (1-a))
    CHECK(std::abs(poles[0].real() - 1.0) < 1e-6);
    CHECK(std::abs(poles[1].real() - 1.0) < 1e-6);
    CHECK(std::abs(poles[2].real() - (1.0 - alpha)) < 1e-9);
  }
  SECTION("roots satisfy the cubic") {
    const double alpha = 0.1, ts = 1.0 / 512.0;
    const AttitudeGains g{10.7, 28.0};
    const auto poles = closed_loop_poles(g, alpha, ts);
    const double c2 = -(3.0 - alpha);
    const double c1 = 3.0 - 2.0 * alpha + g.k_omega * alpha * ts;
    const double c0 =
        -1.0 + alpha - g.k_omega * alpha * ts + g.k_omega * g.k_eta * alpha * ts * ts;
    for (const auto& p : poles) {
      REQUIRE(std::abs(oracle::cubic_eval(c2, c1, c0, p)) < 1e-9);
    }
  }
}

TEST_CASE("effectiveness model validation") {
  const sim::VehicleParams p{};
  SECTION("nominal model is well conditioned") {
    const auto eff = p.nominal_effectiveness(kTs);
    CHECK(eff.condition_number() < 1e6);
  }
  SECTION("nonzero thrust row of G2 is rejected") {
    Eigen::Matrix4d g2 = Eigen::Matrix4d::Zero();
    g2(3, 0) = 1e-3;
    CHECK_THROWS_AS(EffectivenessModel(p.nominal_effectiveness(kTs).g1(), g2, kTs),
                    ContractViolation);
  }
  SECTION("singular sum is rejected") {
    CHECK_THROWS_AS(EffectivenessModel(Eigen::Matrix4d::Zero(), Eigen::Matrix4d::Zero(), kTs),
                    SingularInversion);
  }
}
