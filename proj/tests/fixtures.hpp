#pragma once

// Hand-written networks shared by the test suites.

#include "wclat/network_model.hpp"

namespace wclat::testing {

/// One signal on an event-triggered PDU in a 100-bit frame, t_bit 2,
/// t_arb 10, tx and rx tasks every 5000 ticks, rx deadline 500.
inline NetworkModel micro_model(Tick signal_offset = 3000, Tick horizon = 21000) {
  NetworkModel net;
  net.time = TimeDomain::up_to(horizon);
  net.buses.push_back({"can0", 10, {2, 1}});
  net.frames.push_back({"F1", "can0", 1, "tx", "rx", {"P1"}, 0});
  Pdu p;
  p.id = "P1";
  p.length_bits = 100;
  p.frame = "F1";
  net.pdus.push_back(p);
  net.signals.push_back({"request1", TimingModel::periodic(signal_offset, 10000), "P1", 8, true});
  net.tasks.push_back({"tx", TimingModel::periodic(0, 5000), 500, "ECU_A", 0});
  net.tasks.push_back({"rx", TimingModel::periodic(0, 5000), 500, "ECU_B", 0});
  net.objectives = {"request1"};
  return net;
}

/// Container C (frame F1) with the given containees, each fed by one signal
/// S_<containee>. Tasks: tx every `tx_period` from 0, rx every 10 from 0 with
/// deadline 1. One tick per bit, no arbitration time.
struct ContaineeSpec {
  std::string id;
  std::int64_t bits = 4;
  Collection collection = Collection::LastIsBest;
  TimingModel updates = TimingModel::periodic(0, 100);
};

inline NetworkModel container_model(const std::vector<ContaineeSpec>& inner, std::int64_t capacity,
                                    std::int64_t header, Tick horizon, Tick tx_period = 10) {
  NetworkModel net;
  net.time = TimeDomain::up_to(horizon);
  net.buses.push_back({"bus", 0, {1, 1}});
  net.frames.push_back({"F1", "bus", 1, "tx", "rx", {"C"}, 0});
  Pdu c;
  c.id = "C";
  c.is_container = true;
  c.length_bits = capacity;
  c.header_bits = header;
  c.frame = "F1";
  for (const auto& s : inner) c.containees.push_back(s.id);
  net.pdus.push_back(c);
  for (const auto& s : inner) {
    Pdu p;
    p.id = s.id;
    p.length_bits = s.bits;
    p.container = "C";
    p.collection = s.collection;
    net.pdus.push_back(p);
    net.signals.push_back({"S_" + s.id, s.updates, s.id, 1, true});
  }
  net.tasks.push_back({"tx", TimingModel::periodic(0, tx_period), 1, "A", 0});
  net.tasks.push_back({"rx", TimingModel::periodic(0, 10), 1, "B", 0});
  return net;
}

}  // namespace wclat::testing
