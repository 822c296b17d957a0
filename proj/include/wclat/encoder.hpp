#pragma once

#include <map>
#include <string>
#include <vector>

#include "wclat/constraint_problem.hpp"
#include "wclat/network_model.hpp"
#include "wclat/simulator.hpp"

namespace wclat {

struct EncodeOptions {
  /// Emit implied constraints that only strengthen propagation.
  bool redundant = true;
};

/// A built problem plus the variable families needed to read a witness back.
struct Encoding {
  ConstraintProblem problem;
  std::string signal;
  TimeDomain time;
  /// Per signal / task: one variable per occurrence, in occurrence order.
  std::map<std::string, std::vector<VarId>> phi;
  std::map<std::string, std::vector<VarId>> activation;
  /// Per frame: rounding choice per instance (only for fractional t_bit).
  std::map<std::string, std::vector<VarId>> round_up;
  /// Latency per occurrence of the objective signal (-1 = none).
  std::vector<VarId> latency;
};

/// Incremental encoder; the layer methods must be called in order.
class Encoder {
 public:
  Encoder(const NetworkModel& net, std::string objective_signal, EncodeOptions opt = {});
  ~Encoder();
  Encoder(const Encoder&) = delete;
  Encoder& operator=(const Encoder&) = delete;

  void encode_signal_layer();
  void encode_pdu_layer();
  void encode_frame_layer();
  void encode_objective();

  Encoding take();

 private:
  struct Impl;
  Impl* impl_;
};

/// All layers plus the objective. Throws ConfigError when the objective
/// signal is unknown or the model fails validation.
Encoding build_problem(const NetworkModel& net, const std::string& objective_signal,
                       EncodeOptions opt = {});

/// Reads the scenario (input event times and rounding choices) out of a witness.
Scenario extract_scenario(const Encoding& enc, const Assignment& witness);

/// Copy of `net` whose time domain ends at the analysis horizon.
NetworkModel with_horizon(NetworkModel net, HorizonOptions opt = {});

/// Number of constraints per schema name.
std::map<std::string, std::size_t> schema_counts(const ConstraintProblem& p);

}  // namespace wclat
