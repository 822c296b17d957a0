#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "wclat/timing_model.hpp"

namespace wclat {

enum class Layout { Static, Dynamic };
enum class Collection { LastIsBest, Queued };

struct Signal {
  std::string id;
  /// Union of all writer models, see fold_writer_models.
  TimingModel update_model = TimingModel::periodic(0, 1);
  std::string pdu;
  std::int64_t length_bits = 1;
  bool triggers_pdu = true;
};

struct Pdu {
  std::string id;
  bool is_container = false;
  /// Containees of a container, in declaration order (ties at one tick are
  /// packed in this order).
  std::vector<std::string> containees;
  Layout layout = Layout::Dynamic;
  /// Plain PDU: cyclic timer period. Container: timeout after the first
  /// containee.
  std::optional<Tick> timeout_period;
  std::optional<std::int64_t> threshold_bits;
  /// Container fires as soon as a containee is packed.
  bool trigger_on_first = false;
  /// Plain PDUs use this as their fixed length; containers as their capacity.
  std::int64_t length_bits = 8;
  std::int64_t header_bits = 0;
  /// Exactly one of frame / container is set.
  std::string frame;
  std::string container;
  Collection collection = Collection::LastIsBest;

  bool in_container() const { return !container.empty(); }
};

struct Frame {
  std::string id;
  std::string bus;
  /// Lower value wins arbitration.
  std::int64_t priority = 0;
  std::string tx_task;
  std::string rx_task;
  std::vector<std::string> pdus;
  std::int64_t header_bits = 0;
};

struct CommTask {
  std::string id;
  TimingModel activation = TimingModel::periodic(0, 1);
  Tick deadline = 1;
  std::string station;
  Tick clock_drift = 0;
};

/// Rational ticks per bit.
struct BitTime {
  std::int64_t num = 1;
  std::int64_t den = 1;
};

struct Bus {
  std::string id;
  Tick t_arb = 0;
  BitTime t_bit;
};

struct NetworkModel {
  TimeDomain time = TimeDomain::up_to(0);
  /// Report unit: how many microseconds one tick represents.
  double us_per_tick = 1.0;
  std::vector<Bus> buses;
  std::vector<Frame> frames;
  std::vector<Pdu> pdus;
  std::vector<Signal> signals;
  std::vector<CommTask> tasks;
  std::vector<std::string> objectives;

  const Bus* find_bus(const std::string& id) const;
  const Frame* find_frame(const std::string& id) const;
  const Pdu* find_pdu(const std::string& id) const;
  const Signal* find_signal(const std::string& id) const;
  const CommTask* find_task(const std::string& id) const;
  std::size_t pdu_index(const std::string& id) const;
  std::size_t frame_index(const std::string& id) const;
  std::size_t task_index(const std::string& id) const;
  std::size_t signal_index(const std::string& id) const;
};

struct Diagnostic {
  std::string element;
  std::string rule;
  std::string message;
};

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Checks every structural rule and returns all violations (empty = ok).
std::vector<Diagnostic> validate(const NetworkModel& net);

/// Left fold of `unite` in declaration order.
TimingModel fold_writer_models(std::span<const TimingModel> writers, UnionOptions opt = {});

struct HorizonOptions {
  std::int64_t slack = 2;
  std::optional<Tick> explicit_horizon;
};

/// slack * LCM(periods, timer periods) + max deadline. Throws ConfigError when
/// no periodic source exists and no explicit horizon is given.
Tick analysis_horizon(const NetworkModel& net, HorizonOptions opt = {});

/// Index range {first..last}; empty when last < first.
struct OccurrenceRange {
  std::int64_t first = 1;
  std::int64_t last = 0;
  std::int64_t count() const { return last >= first ? last - first + 1 : 0; }
  friend bool operator==(const OccurrenceRange&, const OccurrenceRange&) = default;
};

/// Occurrence bounds of a timing-model-driven source within the time domain.
OccurrenceRange source_occurrences(const TimingModel& m, const TimeDomain& td);

/// Occurrence bounds of every element, keyed by element id.
struct OccurrenceBounds {
  std::map<std::string, OccurrenceRange> signals;
  std::map<std::string, OccurrenceRange> tasks;
  std::map<std::string, OccurrenceRange> pdus;
  std::map<std::string, OccurrenceRange> frames;
};

OccurrenceBounds occurrence_bounds(const NetworkModel& net);

/// Window of occurrence i of a source clamped into the time domain.
OccurrenceWindow clamped_window(const TimingModel& m, std::int64_t i, const TimeDomain& td);

/// Frame length in bits if every PDU is carried at full length.
std::int64_t max_frame_length(const NetworkModel& net, const Frame& f);

/// The part of `net` that can influence `signal`: the bus carrying it with
/// all its frames, their PDUs and signals, and the tasks driving them.
/// Throws ConfigError for an unknown or unmapped signal.
NetworkModel bus_slice(const NetworkModel& net, const std::string& signal);

}  // namespace wclat
