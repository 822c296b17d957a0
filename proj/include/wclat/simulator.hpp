#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "wclat/network_model.hpp"

namespace wclat {

/// Concrete event times. Vectors are indexed by occurrence, starting at the
/// first occurrence of the element's range (usually 1).
struct Scenario {
  std::map<std::string, std::vector<Tick>> signals;
  std::map<std::string, std::vector<Tick>> tasks;
  /// Per frame instance: 1 selects the rounded-up transmission duration when
  /// t_arb + len * t_bit is fractional. Missing entries mean 0.
  std::map<std::string, std::vector<int>> round_up;

  friend bool operator==(const Scenario&, const Scenario&) = default;
};

class ScenarioError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class EventKind {
  SignalChange,
  PduTrigger,
  Pack,
  Overwrite,
  FrameQueue,
  TxStart,
  TxEnd,
  TaskActivation,
  RxActivation,
  RxDeadline,
};

enum class TriggerKind { Event, Timeout, FirstContainee, Threshold };

const char* to_string(EventKind k);
const char* to_string(TriggerKind k);

struct TraceEvent {
  Tick tick = 0;
  EventKind kind = EventKind::SignalChange;
  std::string element;
  std::int64_t instance = 0;
  std::string detail;
};

struct PduInstance {
  Tick alpha = 0;
  Tick sigma = 0;
  TriggerKind trigger = TriggerKind::Event;
  std::int64_t container_instance = 0;  // containees only; 0 when not packed
  bool overwritten = false;
  std::int64_t frame_instance = 0;  // frame-level PDUs only; 0 when never copied
  std::int64_t length = 0;
};

struct FrameInstance {
  Tick alpha = 0;
  Tick copy = 0;
  Tick sigma = 0;
  Tick eps = 0;
  std::int64_t length = 0;
  Tick duration = 0;
  bool fractional = false;
  std::int64_t rx_instance = 0;  // 0 when never received
  Tick rx_activation = 0;
  Tick rx_deadline = 0;
};

struct SignalOutcome {
  Tick phi = 0;
  std::int64_t pdu_instance = 0;
  std::optional<Tick> latency;
};

struct Trace {
  TimeDomain time;
  std::vector<TraceEvent> events;
  std::map<std::string, std::vector<PduInstance>> pdus;
  std::map<std::string, std::vector<FrameInstance>> frames;
  std::map<std::string, std::vector<SignalOutcome>> signals;
  std::map<std::string, std::int64_t> signal_first;
};

/// Runs the trigger/pack/arbitrate pipeline on one scenario. Throws
/// ScenarioError for missing entries, window violations or unordered times.
Trace simulate(const NetworkModel& net, const Scenario& scenario);

/// Latency of a signal occurrence; none if it never reaches reception.
/// Throws DomainError for an unknown signal or occurrence.
std::optional<Tick> latency(const Trace& trace, const std::string& signal, std::int64_t occurrence);

/// Adds every signal and task missing from `partial` at its earliest
/// admissible times.
Scenario complete_scenario(const NetworkModel& net, Scenario partial);

/// Maximum latency over all occurrences of a signal; none if none arrives.
std::optional<Tick> worst_latency(const Trace& trace, const std::string& signal);

/// Events on the causal path of one signal occurrence, in tick order.
std::vector<TraceEvent> chain(const Trace& trace, const NetworkModel& net, const std::string& signal,
                              std::int64_t occurrence);

/// One line per event: `tick kind element instance [detail]`.
std::string format_trace(const Trace& trace);

class EnumerationRefused : public std::runtime_error {
 public:
  EnumerationRefused(std::string msg, long double count)
      : std::runtime_error(std::move(msg)), scenarios(count) {}
  long double scenarios;
};

struct EnumerationResult {
  /// Maximum latency over all scenarios; none when no occurrence ever arrives.
  std::optional<Tick> latency;
  Scenario witness;
  std::int64_t scenarios = 0;
  /// False for grid steps > 1: the result is then a lower bound only.
  bool exact = true;
};

/// Number of grid scenarios enumerate would visit (before ordering pruning).
long double scenario_count(const NetworkModel& net, Tick step);

/// Exhaustive worst case over all grid scenarios, including duration
/// rounding choices. Throws EnumerationRefused when the count exceeds cap.
EnumerationResult worst_case_enumerate(const NetworkModel& net, const std::string& signal,
                                       Tick step = 1, long double cap = 1e6);

}  // namespace wclat
