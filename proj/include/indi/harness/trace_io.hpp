#pragma once

#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>
#include <string>

#include "indi/errors.hpp"
#include "indi/harness/metrics.hpp"
#include "indi/sim/scenario.hpp"

namespace indi::harness {

/// Full-precision CSV (17 significant digits): values survive a read-back
/// bit for bit, so traces are directly comparable.
inline void write_trace_csv(const sim::Trace& trace, std::ostream& out) {
  for (std::size_t i = 0; i < trace.columns.size(); ++i) {
    out << (i ? "," : "") << trace.columns[i];
  }
  out << "\n";
  char buf[40];
  for (const auto& row : trace.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      std::snprintf(buf, sizeof(buf), "%.17g", row[i]);
      out << (i ? "," : "") << buf;
    }
    out << "\n";
  }
}

inline void write_trace_csv(const sim::Trace& trace, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot open '" + path + "' for writing");
  write_trace_csv(trace, out);
}

inline sim::Trace read_trace_csv(std::istream& in) {
  sim::Trace trace;
  std::string line;
  if (!std::getline(in, line)) throw ConfigError("trace CSV: empty file");
  std::istringstream hs(line);
  std::string cell;
  while (std::getline(hs, cell, ',')) trace.columns.push_back(cell);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    row.reserve(trace.columns.size());
    std::istringstream ls(line);
    while (std::getline(ls, cell, ',')) row.push_back(std::stod(cell));
    if (row.size() != trace.columns.size()) {
      throw ConfigError("trace CSV: row " + std::to_string(trace.rows.size() + 2) + " has " +
                        std::to_string(row.size()) + " cells, expected " +
                        std::to_string(trace.columns.size()));
    }
    trace.rows.push_back(std::move(row));
  }
  trace.event_times = infer_events(trace);
  return trace;
}

inline sim::Trace read_trace_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open trace file '" + path + "'");
  return read_trace_csv(in);
}

inline void write_metrics_csv(const RunMetrics& m, std::ostream& out) {
  char buf[40];
  out << "metric,value\n";
  for (const auto& [name, value] : named_values(m)) {
    std::snprintf(buf, sizeof(buf), "%.17g", value);
    out << name << "," << buf << "\n";
  }
}

inline void write_sweep_csv(const AggregateMetrics& agg, std::ostream& out) {
  char buf[40];
  out << "metric,mean,stddev,n\n";
  for (std::size_t i = 0; i < agg.names.size(); ++i) {
    out << agg.names[i];
    std::snprintf(buf, sizeof(buf), "%.17g", agg.mean[i]);
    out << "," << buf;
    std::snprintf(buf, sizeof(buf), "%.17g", agg.stddev[i]);
    out << "," << buf << "," << agg.count << "\n";
  }
}

}  // namespace indi::harness
