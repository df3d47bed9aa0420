// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure. Each criterion pins its tolerance in code and reports the
// measured values alongside the bound.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "indi/control/adaptation.hpp"
#include "indi/control/inner_loop.hpp"
#include "indi/control/outer_loop.hpp"
#include "indi/harness/metrics.hpp"
#include "indi/harness/trace_io.hpp"
#include "indi/sim/experiments.hpp"
#include "indi/sim/scenario.hpp"
#include "oracles.hpp"
#include "scenarios.hpp"

using namespace indi;
using namespace indi::sim;

namespace {

struct Outcome {
  bool pass{false};
  std::string detail;
};

double mean(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / v.size();
}

std::string fmt(const char* format, auto... args) {
  char buf[256];
  std::snprintf(buf, sizeof(buf), format, args...);
  return buf;
}

Outcome pole_placement() {
  const auto poles = closed_loop_poles(AttitudeGains{10.7, 28.0}, 0.1, 1.0 / 512.0);
  const double real_err = std::abs(poles[2].real() - 0.964);
  const double pair_re_err = std::max(std::abs(poles[0].real() - 0.968),
                                      std::abs(poles[1].real() - 0.968));
  const double pair_im_err = std::max(std::abs(std::abs(poles[0].imag()) - 0.0463),
                                      std::abs(std::abs(poles[1].imag()) - 0.0463));
  const bool pass = real_err < 1e-3 && pair_re_err < 1e-3 && pair_im_err < 1e-3 &&
                    std::abs(poles[2].imag()) < 1e-9;
  return {pass, fmt("poles %.4f, %.4f+-%.4fi vs 0.964, 0.968+-0.0463i (tol 1e-3)",
                    poles[2].real(), poles[0].real(), std::abs(poles[0].imag()))};
}

Outcome designed_step_response() {
  const auto r = attitude_step_experiment(VehicleParams{}, ControlParams{},
                                          10.0 * M_PI / 180.0, 1.0);
  return {r.max_deviation_fraction <= 0.064,
          fmt("max |designed - flown| = %.2f%% of step (limit 6.4%%), at t = %.3f s",
              100.0 * r.max_deviation_fraction, r.t_max_deviation)};
}

Outcome inner_loop_identity() {
  const ControlParams c{};
  const double settle = 3.0 / (c.filter_zeta * c.filter_omega_n);
  const auto r = rate_step_experiment(VehicleParams{}, c, 0.5, 0.5, settle);
  return {r.max_deviation_fraction < 0.05,
          fmt("max |dOmega - A(z) response| = %.2f%% of step after %.3f s (limit 5%%)",
              100.0 * r.max_deviation_fraction, settle)};
}

Outcome nonlinear_roundtrip() {
  std::mt19937_64 rng(1234);
  std::uniform_real_distribution<double> ang(-1.0, 1.0), yaw(0.0, 2.0 * M_PI),
      thrust(-20.0, -0.5);
  double worst = 0.0;
  for (int n = 0; n < 1000; ++n) {
    const EulerAngles eta{ang(rng), ang(rng), yaw(rng)};
    const double t = thrust(rng);
    const ThrustVectorInversion inv = invert_thrust_vector(thrust_vector_ned(eta, t), eta.psi);
    worst = std::max({worst, std::abs(inv.phi - eta.phi), std::abs(inv.theta - eta.theta),
                      std::abs(inv.thrust - t)});
    if (inv.infeasible) return {false, "inversion flagged a feasible sample"};
  }
  return {worst < 1e-9, fmt("worst recovery error %.2e over 1000 samples (limit 1e-9)", worst)};
}

Outcome jacobian_check() {
  const auto f = [](const EulerAngles& e, double t) { return thrust_vector_ned(e, t); };
  double worst = 0.0;
  for (double phi = -1.0; phi <= 1.0 + 1e-9; phi += 0.125) {
    for (double theta = -1.0; theta <= 1.0 + 1e-9; theta += 0.125) {
      for (double psi = 0.0; psi < 2.0 * M_PI; psi += M_PI / 8.0) {
        for (double t = -20.0; t <= -1.0 + 1e-9; t += 2.375) {
          const EulerAngles eta{phi, theta, psi};
          const Mat3 got = effectiveness_jacobian(eta, t);
          const Mat3 want = oracle::central_difference_jacobian(f, eta, t, 1e-6);
          for (int i = 0; i < 3; ++i) {
            for (int j = 0; j < 3; ++j) {
              worst = std::max(worst, std::abs(got(i, j) - want(i, j)));
            }
          }
        }
      }
    }
  }
  return {worst < 1e-5, fmt("worst |analytic - finite difference| = %.2e (limit 1e-5)", worst)};
}

Outcome gust_rejection_ordering() {
  std::vector<double> peaks_indi, peaks_pid, retracks;
  bool all_retracked = true;
  for (std::uint64_t seed = 1; seed <= 7; ++seed) {
    const Trace ti = run_scenario(scenarios::windtunnel_crossing(
        ControllerKind::indi_linear, seed));
    const auto mi = harness::metrics_from_trace(ti, ti.event_times);
    peaks_indi.push_back(mi.peak_n);
    const auto& entry = mi.events.at(0);
    all_retracked = all_retracked && entry.wind_entry && entry.retracked;
    retracks.push_back(entry.retrack_s);

    const Trace tp = run_scenario(scenarios::windtunnel_crossing(ControllerKind::pid, seed));
    peaks_pid.push_back(harness::metrics_from_trace(tp, tp.event_times).peak_n);
  }
  const double mi = mean(peaks_indi), mp = mean(peaks_pid), mr = mean(retracks);
  const double worst_retrack = *std::max_element(retracks.begin(), retracks.end());
  const bool pass = mi < 0.5 * mp && all_retracked && worst_retrack <= 0.5;
  return {pass,
          fmt("north peak: INDI %.3f m vs PID %.3f m over 7 seeds (need < 0.5x); "
              "re-track after jet entry %.2f s mean, %.2f s worst (limit 0.5 s)",
              mi, mp, mr, worst_retrack)};
}

Outcome takeoff_ordering() {
  std::vector<double> peaks_indi, peaks_pid;
  for (std::uint64_t seed = 1; seed <= 12; ++seed) {
    const Trace ti = run_scenario(scenarios::takeoff_wind(ControllerKind::indi_linear, seed));
    peaks_indi.push_back(harness::metrics_from_trace(ti, {}).peak_horizontal);
    const Trace tp = run_scenario(scenarios::takeoff_wind(ControllerKind::pid, seed));
    peaks_pid.push_back(harness::metrics_from_trace(tp, {}).peak_horizontal);
  }
  const double mi = mean(peaks_indi), mp = mean(peaks_pid);
  return {mi < mp, fmt("horizontal peak: INDI %.3f m vs PID %.3f m over 12 seeds", mi, mp)};
}

Outcome increment_study() {
  std::vector<double> ratio_lin, ratio_non, az_lin, az_non;
  for (std::uint64_t seed = 1; seed <= 25; ++seed) {
    for (const auto kind : {ControllerKind::indi_linear, ControllerKind::indi_nonlinear}) {
      const Trace t = run_scenario(scenarios::accel_flip(kind, seed));
      const int ctc = t.col("t_cmd"), cvd = t.col("vel_d");
      const auto idx = [&](double tt) { return static_cast<std::size_t>(std::lround(tt * 512.0)); };
      const double pre = std::abs(t.at(idx(2.4), ctc));
      const double at_flip = std::abs(t.at(idx(2.5), ctc));
      // mean vertical acceleration over the maneuver, from the velocity change
      const double az = (t.at(idx(3.0), cvd) - t.at(idx(2.0), cvd)) / 1.0;
      if (kind == ControllerKind::indi_linear) {
        ratio_lin.push_back(at_flip / pre);
        az_lin.push_back(std::abs(az));
      } else {
        ratio_non.push_back(at_flip / pre);
        az_non.push_back(std::abs(az));
      }
    }
  }
  const double rl = mean(ratio_lin), rn = mean(ratio_non);
  const double al = mean(az_lin), an = mean(az_non);
  const bool pass = rl < 0.9 && std::abs(rn - 1.0) <= 0.1 && an < al;
  return {pass,
          fmt("|T| at flip / pre-flip: linear %.2f (reduction), nonlinear %.2f (hold, "
              "limit +-10%%); mean |vertical accel|: linear %.3f vs nonlinear %.3f m/s^2",
              rl, rn, al, an)};
}

Outcome lms_convergence() {
  std::mt19937_64 rng(99);
  std::normal_distribution<double> nd(0.0, 5.0);
  const double ts = 1.0 / 512.0;
  const auto g_star = VehicleParams{}.nominal_effectiveness(ts).stacked();
  LmsAdapter adapter(0.6 * g_star, LmsStepSizes{}, ts);
  double dist = (adapter.g() - g_star).norm();
  long used = 0;
  for (long k = 1; k <= 100000; ++k) {
    Vec4 dw, ddw;
    for (int i = 0; i < 4; ++i) {
      dw[i] = nd(rng);
      ddw[i] = nd(rng) / ts;
    }
    Eigen::Matrix<double, 8, 1> x;
    x << dw[0], dw[1], dw[2], dw[3], ts * ddw[0], ts * ddw[1], ts * ddw[2], ts * ddw[3];
    const Eigen::Matrix<double, 4, 1> y = g_star * x;
    adapter.step(dw, ddw, {y(0), y(1), y(2)}, y(3));
    dist = (adapter.g() - g_star).norm();
    used = k;
    if (dist < 0.01 * g_star.norm()) break;
  }
  return {dist < 0.01 * g_star.norm(),
          fmt("||G - G*||_F = %.2f%% of ||G*||_F after %ld samples (limit 1%% in 1e5)",
              100.0 * dist / g_star.norm(), used)};
}

Outcome bias_recovery() {
  const auto cfg = scenarios::bias_recovery(1, 0.3);
  const Trace t = run_scenario(cfg);
  const int cb = t.col("bias_n"), ct = t.col("time_s");
  double worst_after_20 = 0.0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (t.at(i, ct) < 20.0) continue;
    worst_after_20 = std::max(worst_after_20, std::abs(t.at(i, cb) - 0.3));
  }
  return {worst_after_20 <= 0.02 * 0.3,
          fmt("bias estimate error after 20 s: %.4f m/s^2 worst (limit 2%% of 0.3 = 0.006)",
              worst_after_20)};
}

Outcome determinism() {
  const auto cfg = scenarios::windtunnel_crossing(ControllerKind::indi_linear, 11);
  const Trace a = run_scenario(cfg);
  const Trace b = run_scenario(cfg);
  std::ostringstream csv_a, csv_b;
  harness::write_trace_csv(a, csv_a);
  harness::write_trace_csv(b, csv_b);
  const bool same = csv_a.str() == csv_b.str();
  return {same, fmt("two 40 s runs, %zu ticks: trace CSV %s", a.size(),
                    same ? "bit-identical" : "DIFFERS")};
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    double time_limit_s;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria = {
      {"pole placement", 1.0, pole_placement},
      {"designed vs simulated step response", 10.0, designed_step_response},
      {"inner-loop identity", 10.0, inner_loop_identity},
      {"nonlinear inversion round-trip", 1.0, nonlinear_roundtrip},
      {"jacobian check", 5.0, jacobian_check},
      {"gust-rejection ordering", 120.0, gust_rejection_ordering},
      {"takeoff-in-wind ordering", 120.0, takeoff_ordering},
      {"linear vs nonlinear increment study", 60.0, increment_study},
      {"LMS convergence", 30.0, lms_convergence},
      {"bias estimator", 5.0, bias_recovery},
      {"determinism", 30.0, determinism},
  };

  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto& c = criteria[i];
    Outcome outcome;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      outcome = c.run();
    } catch (const std::exception& e) {
      outcome = {false, std::string("exception: ") + e.what()};
    }
    const double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_time = elapsed <= c.time_limit_s;
    const bool pass = outcome.pass && in_time;
    if (!pass) ++failures;
    std::printf("[%s] %2zu. %-38s %s (%.2f s%s)\n", pass ? "PASS" : "FAIL", i + 1, c.name,
                outcome.detail.c_str(), elapsed,
                in_time ? "" : fmt(", over the %.0f s limit", c.time_limit_s).c_str());
    std::fflush(stdout);
  }
  if (failures) {
    std::printf("%d of %zu criteria failed\n", failures, criteria.size());
    return 1;
  }
  std::printf("all %zu criteria passed\n", criteria.size());
  return 0;
}
