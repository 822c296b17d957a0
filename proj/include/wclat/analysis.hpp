#pragma once

#include <optional>
#include <string>
#include <vector>

#include "wclat/encoder.hpp"
#include "wclat/solver.hpp"

namespace wclat {

struct AnalysisOptions {
  SolveLimits limits;
  EncodeOptions encode;
  /// Signals analyzed concurrently; rows keep the requested order.
  int jobs = 1;
  /// Directory for witness scenario files; empty disables writing.
  std::string witness_dir;
};

/// One row of the resource/result report.
struct AnalysisRow {
  std::string sender;
  std::string receiver;
  std::string signal;
  double encode_seconds = 0;
  /// Process peak resident size after the phase (MiB).
  double encode_peak_mb = 0;
  double solve_seconds = 0;
  double solve_peak_mb = 0;
  std::string status;
  /// Worst-case latency in ticks; -1 when no occurrence reaches reception.
  std::optional<Tick> latency;
  double latency_us = 0;
  std::string witness;
  std::size_t variables = 0;
  std::size_t constraints = 0;
  std::int64_t nodes = 0;
  /// Simulating the witness reproduced the latency.
  bool replayed = false;
};

struct AnalysisReport {
  double us_per_tick = 1.0;
  std::vector<AnalysisRow> rows;
};

/// The problem solved for one signal: the encoding of its bus slice.
Encoding analysis_problem(const NetworkModel& net, const std::string& signal, EncodeOptions opt = {});

AnalysisRow analyze_signal(const NetworkModel& net, const std::string& signal,
                           const AnalysisOptions& opt = {});
AnalysisReport analyze(const NetworkModel& net, const std::vector<std::string>& signals,
                       const AnalysisOptions& opt = {});

/// Aligned text table, one row per signal.
std::string render_table(const AnalysisReport& r);
std::string report_json(const AnalysisReport& r);
/// Throws FormatError.
AnalysisReport parse_report(const std::string& text, const std::string& source = "<input>");

/// Peak resident set size of this process in MiB.
double peak_memory_mb();

}  // namespace wclat
