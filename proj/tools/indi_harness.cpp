// Command-line experiment runner: executes scenario configs, sweeps seeds,
// prints closed-loop poles, runs the designed-vs-flown attitude step and
// compares traces. Exit codes: 0 ok, 2 config error, 3 numeric failure.

#include <CLI11.hpp>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "indi/control/inner_loop.hpp"
#include "indi/errors.hpp"
#include "indi/harness/config.hpp"
#include "indi/harness/metrics.hpp"
#include "indi/harness/trace_io.hpp"
#include "indi/sim/experiments.hpp"
#include "indi/sim/scenario.hpp"

namespace {

namespace fs = std::filesystem;
using namespace indi;

std::string ensure_dir(const std::string& path) {
  fs::create_directories(path);
  return path;
}

int cmd_run(const std::string& config_path, const std::string& output_override) {
  sim::ScenarioConfig cfg = harness::load_scenario(config_path);
  if (!output_override.empty()) cfg.output_path = output_override;
  const sim::Trace trace = sim::run_scenario(cfg);
  const harness::RunMetrics metrics = harness::metrics_from_trace(trace, trace.event_times);

  const std::string dir = ensure_dir(cfg.output_path);
  harness::write_trace_csv(trace, dir + "/trace.csv");
  {
    std::ofstream out(dir + "/metrics.csv");
    harness::write_metrics_csv(metrics, out);
  }
  std::printf("scenario '%s': %zu ticks, peak |error| N/E/D = %.3f / %.3f / %.3f m\n",
              cfg.name.c_str(), trace.size(), metrics.peak_n, metrics.peak_e, metrics.peak_d);
  for (std::size_t i = 0; i < metrics.events.size(); ++i) {
    const auto& e = metrics.events[i];
    std::printf("  event %zu at t = %.2f s: peak N/E/D = %.3f / %.3f / %.3f m", i, e.t_event,
                e.peak_axis[0], e.peak_axis[1], e.peak_axis[2]);
    for (int a = 0; a < 3; ++a) {
      if (e.settled_axis[a]) std::printf(" %c+%.2fs", "NED"[a], e.settling_axis[a]);
    }
    if (e.retracked) std::printf(", accel re-tracked %.2f s after the wind change",
                                 e.retrack_s);
    std::printf("\n");
  }
  std::printf("wrote %s/trace.csv and %s/metrics.csv\n", dir.c_str(), dir.c_str());
  return 0;
}

int cmd_sweep(const std::string& config_path, int repetitions, std::uint64_t seed_base,
              const std::string& output_override) {
  sim::ScenarioConfig cfg = harness::load_scenario(config_path);
  if (!output_override.empty()) cfg.output_path = output_override;
  std::vector<harness::RunMetrics> runs;
  for (int r = 0; r < repetitions; ++r) {
    cfg.seed = seed_base + static_cast<std::uint64_t>(r);
    const sim::Trace trace = sim::run_scenario(cfg);
    runs.push_back(harness::metrics_from_trace(trace, trace.event_times));
  }
  const harness::AggregateMetrics agg = harness::aggregate(runs);

  const std::string dir = ensure_dir(cfg.output_path);
  {
    std::ofstream out(dir + "/sweep.csv");
    out << "rep,seed,metric,value\n";
    char buf[40];
    for (std::size_t r = 0; r < runs.size(); ++r) {
      for (const auto& [name, value] : harness::named_values(runs[r])) {
        std::snprintf(buf, sizeof(buf), "%.17g", value);
        out << r << "," << (seed_base + r) << "," << name << "," << buf << "\n";
      }
    }
  }
  {
    std::ofstream out(dir + "/sweep_summary.csv");
    harness::write_sweep_csv(agg, out);
  }
  std::printf("%d repetitions of '%s' (seeds %llu..%llu)\n", repetitions, cfg.name.c_str(),
              static_cast<unsigned long long>(seed_base),
              static_cast<unsigned long long>(seed_base + repetitions - 1));
  for (std::size_t i = 0; i < agg.names.size(); ++i) {
    if (agg.names[i].find("peak") != std::string::npos) {
      std::printf("  %-24s mean %.4f  sigma %.4f\n", agg.names[i].c_str(), agg.mean[i],
                  agg.stddev[i]);
    }
  }
  std::printf("wrote %s/sweep.csv and %s/sweep_summary.csv\n", dir.c_str(), dir.c_str());
  return 0;
}

int cmd_poles(double k_omega, double k_eta, double alpha, double ts) {
  const auto poles = closed_loop_poles(AttitudeGains{k_eta, k_omega}, alpha, ts);
  for (const auto& p : poles) {
    if (std::abs(p.imag()) < 1e-12) {
      std::printf("%.6f\n", p.real());
    } else {
      std::printf("%.6f%+.6fi\n", p.real(), p.imag());
    }
    if (std::abs(p) >= 1.0) std::printf("  warning: pole outside the unit circle\n");
  }
  return 0;
}

int cmd_step_response(const std::string& config_path, double step_rad, double duration,
                      const std::string& output_override) {
  sim::ScenarioConfig cfg = harness::load_scenario(config_path);
  if (!output_override.empty()) cfg.output_path = output_override;
  const auto r = sim::attitude_step_experiment(cfg.vehicle, cfg.control, step_rad, duration);

  const std::string dir = ensure_dir(cfg.output_path);
  {
    std::ofstream out(dir + "/step_response.csv");
    out << "t,designed,simulated\n";
    char buf[128];
    for (std::size_t i = 0; i < r.time.size(); ++i) {
      std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g\n", r.time[i], r.designed[i],
                    r.simulated[i]);
      out << buf;
    }
  }
  std::printf("attitude step %.3f rad over %.2f s: max |designed - flown| = %.2f%% of step "
              "(at t = %.3f s)\n",
              step_rad, duration, 100.0 * r.max_deviation_fraction, r.t_max_deviation);
  std::printf("wrote %s/step_response.csv\n", dir.c_str());
  return 0;
}

int cmd_compare(const std::string& trace_a, const std::string& trace_b,
                const std::string& output) {
  const sim::Trace a = harness::read_trace_csv(trace_a);
  const sim::Trace b = harness::read_trace_csv(trace_b);
  const harness::RunMetrics ma = harness::metrics_from_trace(a, a.event_times);
  const harness::RunMetrics mb = harness::metrics_from_trace(b, b.event_times);
  const auto va = harness::named_values(ma);
  const auto vb = harness::named_values(mb);

  std::ofstream file;
  std::ostream* out = &std::cout;
  if (!output.empty()) {
    file.open(output);
    if (!file) throw ConfigError("cannot open '" + output + "' for writing");
    out = &file;
  }
  (*out) << "metric,a,b,diff\n";
  char buf[160];
  for (const auto& [name, value] : va) {
    for (const auto& [name_b, value_b] : vb) {
      if (name_b == name) {
        std::snprintf(buf, sizeof(buf), "%s,%.17g,%.17g,%.17g\n", name.c_str(), value,
                      value_b, value - value_b);
        (*out) << buf;
        break;
      }
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cascaded incremental flight-control experiment harness"};
  app.require_subcommand(1);

  std::string config_path, output_override;
  auto* run = app.add_subcommand("run", "run one scenario, write trace.csv and metrics.csv");
  run->add_option("config", config_path, "scenario config file")->required();
  run->add_option("--output", output_override, "override the config's output directory");

  int repetitions = 7;
  std::uint64_t seed_base = 1;
  std::string sweep_config, sweep_output;
  auto* sweep = app.add_subcommand("sweep", "repeat a scenario over seeds and aggregate");
  sweep->add_option("config", sweep_config, "scenario config file")->required();
  sweep->add_option("--repetitions", repetitions, "number of seeded repetitions")
      ->check(CLI::PositiveNumber);
  sweep->add_option("--seed-base", seed_base, "seed of the first repetition");
  sweep->add_option("--output", sweep_output, "override the config's output directory");

  double k_omega = 28.0, k_eta = 10.7, alpha = 0.1, ts = 1.0 / 512.0;
  auto* poles = app.add_subcommand("poles", "closed-loop poles of the attitude design");
  poles->add_option("--k-omega", k_omega, "rate gain [1/s]");
  poles->add_option("--k-eta", k_eta, "attitude gain [1/s]");
  poles->add_option("--alpha", alpha, "actuator pole parameter");
  poles->add_option("--ts", ts, "sample time [s]");

  double step_rad = 0.1745, step_duration = 1.0;
  std::string step_config, step_output;
  auto* step = app.add_subcommand("step-response",
                                  "designed vs flown attitude step under a perfect model");
  step->add_option("config", step_config, "scenario config file")->required();
  step->add_option("--step-rad", step_rad, "roll step magnitude [rad]");
  step->add_option("--duration", step_duration, "window length [s]");
  step->add_option("--output", step_output, "override the config's output directory");

  std::string trace_a, trace_b, compare_output;
  auto* compare = app.add_subcommand("compare", "paired metric differences of two traces");
  compare->add_option("trace_a", trace_a, "first trace.csv")->required();
  compare->add_option("trace_b", trace_b, "second trace.csv")->required();
  compare->add_option("--output", compare_output, "write CSV here instead of stdout");

  try {
    app.parse(argc, argv);
    if (run->parsed()) return cmd_run(config_path, output_override);
    if (sweep->parsed()) return cmd_sweep(sweep_config, repetitions, seed_base, sweep_output);
    if (poles->parsed()) return cmd_poles(k_omega, k_eta, alpha, ts);
    if (step->parsed()) return cmd_step_response(step_config, step_rad, step_duration,
                                                 step_output);
    if (compare->parsed()) return cmd_compare(trace_a, trace_b, compare_output);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const NumericFailure& e) {
    std::cerr << "numeric failure: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
