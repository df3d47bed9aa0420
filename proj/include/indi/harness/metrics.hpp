#pragma once

#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "indi/errors.hpp"
#include "indi/math/vec3.hpp"
#include "indi/sim/scenario.hpp"

namespace indi::harness {

/// Artifact definitions, fixed for every scenario: a disturbance counts as
/// settled when the position error norm re-enters a 0.05 m band and stays for
/// 1 s; the filtered acceleration re-tracks the reference when their distance
/// stays under 0.5 m/s^2 for 50 ms.
struct MetricBands {
  static constexpr double settling_band_m = 0.05;
  static constexpr double settling_dwell_s = 1.0;
  static constexpr double retrack_band_mps2 = 0.5;
  static constexpr double retrack_dwell_s = 0.05;
  static constexpr double wind_change_mps = 1.0;
};

struct EventMetrics {
  double t_event{0.0};
  double peak_error_norm{0.0};
  double t_peak{0.0};
  // per NED axis: |error| peak inside the window and the settling time of
  // that axis (entering the band for the dwell), measured from the event
  std::array<double, 3> peak_axis{};
  std::array<double, 3> t_peak_axis{};
  std::array<bool, 3> settled_axis{};
  std::array<double, 3> settling_axis{-1.0, -1.0, -1.0};
  bool settled{false};      // all three axes settled
  double settling_s{-1.0};  // max over axes when settled
  bool wind_entry{false};
  double t_wind_entry{0.0};
  bool retracked{false};
  double retrack_s{-1.0};  // from the wind change, -1 when never re-tracked
};

struct RunMetrics {
  double peak_n{0.0}, peak_e{0.0}, peak_d{0.0};
  double t_peak_n{0.0}, t_peak_e{0.0}, t_peak_d{0.0};
  double peak_horizontal{0.0};
  double t_peak_horizontal{0.0};
  double peak_norm{0.0};
  double rms_accel_tracking{0.0};
  double saturation_fraction{0.0};
  std::vector<EventMetrics> events;
};

/// Disturbance-event metrics over inter-event windows plus whole-run peaks.
/// Requires the standard telemetry columns; throws ConfigError when the
/// trace lacks them.
inline RunMetrics metrics_from_trace(const sim::Trace& trace,
                                     const std::vector<double>& events) {
  const int ct = trace.col("time_s");
  const int cpn = trace.col("pos_n"), cpe = trace.col("pos_e"), cpd = trace.col("pos_d");
  const int crn = trace.col("ref_n"), cre = trace.col("ref_e"), crd = trace.col("ref_d");
  const int cnn = trace.col("nu_n"), cne = trace.col("nu_e"), cnd = trace.col("nu_d");
  const int cfn = trace.col("accel_f_n"), cfe = trace.col("accel_f_e"),
            cfd = trace.col("accel_f_d");
  const int csat = trace.col("saturated");
  const int cwn = trace.col("wind_n"), cwe = trace.col("wind_e"), cwd = trace.col("wind_d");

  const std::size_t n = trace.size();
  if (n == 0) throw ConfigError("metrics_from_trace: empty trace");
  const double ts = n > 1 ? trace.at(1, ct) - trace.at(0, ct) : 1.0;

  RunMetrics m;
  double sat_sum = 0.0, accel_err_sq = 0.0;
  std::vector<double> err_norm(n), accel_dev(n);
  std::array<std::vector<double>, 3> err_axis;
  for (auto& v : err_axis) v.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = trace.at(i, ct);
    const Vec3 e{trace.at(i, cpn) - trace.at(i, crn), trace.at(i, cpe) - trace.at(i, cre),
                 trace.at(i, cpd) - trace.at(i, crd)};
    err_norm[i] = e.norm();
    err_axis[0][i] = std::abs(e.x);
    err_axis[1][i] = std::abs(e.y);
    err_axis[2][i] = std::abs(e.z);
    const double eh = std::hypot(e.x, e.y);
    if (std::abs(e.x) > m.peak_n) {
      m.peak_n = std::abs(e.x);
      m.t_peak_n = t;
    }
    if (std::abs(e.y) > m.peak_e) {
      m.peak_e = std::abs(e.y);
      m.t_peak_e = t;
    }
    if (std::abs(e.z) > m.peak_d) {
      m.peak_d = std::abs(e.z);
      m.t_peak_d = t;
    }
    if (eh > m.peak_horizontal) {
      m.peak_horizontal = eh;
      m.t_peak_horizontal = t;
    }
    m.peak_norm = std::max(m.peak_norm, err_norm[i]);
    const Vec3 dev{trace.at(i, cnn) - trace.at(i, cfn), trace.at(i, cne) - trace.at(i, cfe),
                   trace.at(i, cnd) - trace.at(i, cfd)};
    accel_dev[i] = dev.norm();
    accel_err_sq += dev.norm_squared();
    sat_sum += trace.at(i, csat);
  }
  m.rms_accel_tracking = std::sqrt(accel_err_sq / n);
  m.saturation_fraction = sat_sum / n;

  const double t_end = trace.at(n - 1, ct);
  const auto index_of = [&](double t) {
    return static_cast<std::size_t>(
        std::min<double>(n - 1.0, std::max(0.0, std::round((t - trace.at(0, ct)) / ts))));
  };
  const long dwell_ticks = std::lround(MetricBands::settling_dwell_s / ts);
  const long retrack_ticks = std::max<long>(1, std::lround(MetricBands::retrack_dwell_s / ts));

  for (std::size_t ev = 0; ev < events.size(); ++ev) {
    EventMetrics em;
    em.t_event = events[ev];
    const double t_next = ev + 1 < events.size() ? events[ev + 1] : t_end + ts;
    const std::size_t i0 = index_of(em.t_event);
    const std::size_t i1 = index_of(std::min(t_next, t_end));

    std::size_t i_peak = i0;
    for (std::size_t i = i0; i <= i1; ++i) {
      if (err_norm[i] > em.peak_error_norm) {
        em.peak_error_norm = err_norm[i];
        i_peak = i;
      }
    }
    em.t_peak = trace.at(i_peak, ct);

    for (int axis = 0; axis < 3; ++axis) {
      const auto& err = err_axis[axis];
      std::size_t ip = i0;
      for (std::size_t i = i0; i <= i1; ++i) {
        if (err[i] > em.peak_axis[axis]) {
          em.peak_axis[axis] = err[i];
          ip = i;
        }
      }
      em.t_peak_axis[axis] = trace.at(ip, ct);
      for (std::size_t i = ip; i <= i1 && !em.settled_axis[axis]; ++i) {
        if (err[i] > MetricBands::settling_band_m) continue;
        if (static_cast<long>(i1 - i) + 1 < dwell_ticks) break;  // no room for the dwell
        bool holds = true;
        for (std::size_t j = i; j < i + static_cast<std::size_t>(dwell_ticks) && j <= i1;
             ++j) {
          if (err[j] > MetricBands::settling_band_m) {
            holds = false;
            break;
          }
        }
        if (holds) {
          em.settled_axis[axis] = true;
          em.settling_axis[axis] = trace.at(i, ct) - em.t_event;
        }
      }
    }
    em.settled = em.settled_axis[0] && em.settled_axis[1] && em.settled_axis[2];
    if (em.settled) {
      em.settling_s = std::max({em.settling_axis[0], em.settling_axis[1],
                                em.settling_axis[2]});
    }

    // a change of the smoothed wind inside the window marks the disturbance
    // onset; the trailing mean keeps in-jet turbulence from false-triggering
    // and cannot fire before the physical change
    const long span = std::max<long>(1, std::lround(0.25 / ts));
    const auto smoothed_wind = [&](std::size_t i) {
      Vec3 sum{};
      long count = 0;
      const std::size_t lo = i >= static_cast<std::size_t>(span) ? i - span : 0;
      for (std::size_t j = lo; j <= i; ++j, ++count) {
        sum += Vec3{trace.at(j, cwn), trace.at(j, cwe), trace.at(j, cwd)};
      }
      return sum / static_cast<double>(count);
    };
    const Vec3 w0 = smoothed_wind(i0);
    std::size_t i_wind = i0;
    for (std::size_t i = i0; i <= i1; ++i) {
      if ((smoothed_wind(i) - w0).norm() > MetricBands::wind_change_mps) {
        em.wind_entry = true;
        em.t_wind_entry = trace.at(i, ct);
        i_wind = i;
        break;
      }
    }
    if (em.wind_entry) {
      // tracking must first be lost before re-tracking means anything
      std::size_t i_lost = i_wind;
      bool lost = false;
      for (std::size_t i = i_wind; i <= i1; ++i) {
        if (accel_dev[i] > MetricBands::retrack_band_mps2) {
          i_lost = i;
          lost = true;
          break;
        }
      }
      if (!lost) {
        em.retracked = true;
        em.retrack_s = 0.0;
      }
      for (std::size_t i = i_lost; lost && i <= i1 && !em.retracked; ++i) {
        if (accel_dev[i] > MetricBands::retrack_band_mps2) continue;
        bool holds = true;
        for (std::size_t j = i; j < i + static_cast<std::size_t>(retrack_ticks) && j <= i1;
             ++j) {
          if (accel_dev[j] > MetricBands::retrack_band_mps2) {
            holds = false;
            break;
          }
        }
        if (holds) {
          em.retracked = true;
          em.retrack_s = trace.at(i, ct) - em.t_wind_entry;
        }
      }
    }
    m.events.push_back(em);
  }
  return m;
}

/// Reference steps in a trace (used when event times are not known a priori,
/// e.g. for traces loaded back from CSV).
inline std::vector<double> infer_events(const sim::Trace& trace) {
  const int ct = trace.col("time_s");
  const int crn = trace.col("ref_n"), cre = trace.col("ref_e"), crd = trace.col("ref_d");
  std::vector<double> events;
  for (std::size_t i = 1; i < trace.size(); ++i) {
    const Vec3 d{trace.at(i, crn) - trace.at(i - 1, crn),
                 trace.at(i, cre) - trace.at(i - 1, cre),
                 trace.at(i, crd) - trace.at(i - 1, crd)};
    if (d.norm() > 1e-12) events.push_back(trace.at(i, ct));
  }
  return events;
}

/// Flat (name, value) view used by the CSV writers and the sweep aggregator.
inline std::vector<std::pair<std::string, double>> named_values(const RunMetrics& m) {
  std::vector<std::pair<std::string, double>> v = {
      {"peak_n_m", m.peak_n},
      {"peak_e_m", m.peak_e},
      {"peak_d_m", m.peak_d},
      {"t_peak_n_s", m.t_peak_n},
      {"t_peak_e_s", m.t_peak_e},
      {"t_peak_d_s", m.t_peak_d},
      {"peak_horizontal_m", m.peak_horizontal},
      {"t_peak_horizontal_s", m.t_peak_horizontal},
      {"peak_norm_m", m.peak_norm},
      {"rms_accel_tracking_mps2", m.rms_accel_tracking},
      {"saturation_fraction", m.saturation_fraction},
  };
  for (std::size_t i = 0; i < m.events.size(); ++i) {
    const std::string p = "event" + std::to_string(i) + "_";
    const auto& e = m.events[i];
    v.emplace_back(p + "t_s", e.t_event);
    v.emplace_back(p + "peak_m", e.peak_error_norm);
    v.emplace_back(p + "peak_n_m", e.peak_axis[0]);
    v.emplace_back(p + "peak_e_m", e.peak_axis[1]);
    v.emplace_back(p + "peak_d_m", e.peak_axis[2]);
    v.emplace_back(p + "settled", e.settled ? 1.0 : 0.0);
    v.emplace_back(p + "settling_s", e.settling_s);
    v.emplace_back(p + "settling_n_s", e.settling_axis[0]);
    v.emplace_back(p + "settling_e_s", e.settling_axis[1]);
    v.emplace_back(p + "settling_d_s", e.settling_axis[2]);
    v.emplace_back(p + "retracked", e.retracked ? 1.0 : 0.0);
    v.emplace_back(p + "retrack_s", e.retrack_s);
  }
  return v;
}

struct AggregateMetrics {
  std::vector<std::string> names;
  std::vector<double> mean;
  std::vector<double> stddev;  // sample standard deviation, 0 for n = 1
  std::size_t count{0};
};

/// Mean and sample sigma per metric across repetitions. All repetitions must
/// come from the same scenario (identical metric sets).
inline AggregateMetrics aggregate(const std::vector<RunMetrics>& runs) {
  if (runs.empty()) throw ContractViolation("aggregate: no runs");
  AggregateMetrics agg;
  const auto first = named_values(runs.front());
  for (const auto& [name, value] : first) {
    agg.names.push_back(name);
    agg.mean.push_back(0.0);
    agg.stddev.push_back(0.0);
  }
  agg.count = runs.size();
  std::vector<std::vector<double>> samples(agg.names.size());
  for (const auto& run : runs) {
    const auto nv = named_values(run);
    if (nv.size() != agg.names.size()) {
      throw ContractViolation("aggregate: repetitions have differing metric sets");
    }
    for (std::size_t i = 0; i < nv.size(); ++i) samples[i].push_back(nv[i].second);
  }
  for (std::size_t i = 0; i < samples.size(); ++i) {
    double sum = 0.0;
    for (double s : samples[i]) sum += s;
    agg.mean[i] = sum / samples[i].size();
    if (samples[i].size() > 1) {
      double sq = 0.0;
      for (double s : samples[i]) sq += (s - agg.mean[i]) * (s - agg.mean[i]);
      agg.stddev[i] = std::sqrt(sq / (samples[i].size() - 1));
    }
  }
  return agg;
}

}  // namespace indi::harness
