#include "wclat/simulator.hpp"

#include <algorithm>
#include <functional>
#include <limits>
#include <sstream>
#include <tuple>

namespace wclat {

const char* to_string(EventKind k) {
  switch (k) {
    case EventKind::SignalChange: return "signal-change";
    case EventKind::PduTrigger: return "pdu-trigger";
    case EventKind::Pack: return "pack";
    case EventKind::Overwrite: return "overwrite";
    case EventKind::FrameQueue: return "frame-queue";
    case EventKind::TxStart: return "tx-start";
    case EventKind::TxEnd: return "tx-end";
    case EventKind::TaskActivation: return "task-activation";
    case EventKind::RxActivation: return "rx-activation";
    case EventKind::RxDeadline: return "rx-deadline";
  }
  return "?";
}

const char* to_string(TriggerKind k) {
  switch (k) {
    case TriggerKind::Event: return "event";
    case TriggerKind::Timeout: return "timeout";
    case TriggerKind::FirstContainee: return "first-containee";
    case TriggerKind::Threshold: return "threshold";
  }
  return "?";
}

namespace {

// Index-based view of a network model, built once per simulation batch.
struct Model {
  struct Sig {
    std::size_t pdu;
    bool triggers;
    OccurrenceRange occ;
  };
  struct P {
    int frame = -1;
    int container = -1;
    std::int64_t limit = 0;
    std::vector<std::size_t> containees;
  };
  struct F {
    std::size_t bus, tx, rx;
    std::vector<std::size_t> pdus;
    std::int64_t limit = 0;
  };

  explicit Model(const NetworkModel& n) : net(n), td(n.time), bounds(occurrence_bounds(n)) {
    for (const auto& s : n.signals)
      sigs.push_back({n.pdu_index(s.pdu), s.triggers_pdu, bounds.signals.at(s.id)});
    for (const auto& t : n.tasks) tasks.push_back(bounds.tasks.at(t.id));
    for (const auto& p : n.pdus) {
      P q;
      if (!p.frame.empty()) q.frame = static_cast<int>(n.frame_index(p.frame));
      if (!p.container.empty()) q.container = static_cast<int>(n.pdu_index(p.container));
      q.limit = bounds.pdus.at(p.id).last;
      for (const auto& c : p.containees) q.containees.push_back(n.pdu_index(c));
      pdus.push_back(q);
    }
    for (const auto& f : n.frames) {
      F g{};
      for (std::size_t b = 0; b < n.buses.size(); ++b)
        if (n.buses[b].id == f.bus) g.bus = b;
      g.tx = n.task_index(f.tx_task);
      g.rx = n.task_index(f.rx_task);
      for (const auto& pid : f.pdus) g.pdus.push_back(n.pdu_index(pid));
      g.limit = bounds.frames.at(f.id).last;
      frames.push_back(g);
    }
  }

  const NetworkModel& net;
  TimeDomain td;
  OccurrenceBounds bounds;
  std::vector<Sig> sigs;
  std::vector<OccurrenceRange> tasks;
  std::vector<P> pdus;
  std::vector<F> frames;
};

std::string occ_name(const std::string& id, std::int64_t j) { return id + "#" + std::to_string(j); }

void check_source(const std::string& kind, const std::string& id, const TimingModel& m,
                  const OccurrenceRange& occ, const std::vector<Tick>& times, const TimeDomain& td) {
  if (static_cast<std::int64_t>(times.size()) != occ.count())
    throw ScenarioError(kind + " '" + id + "': expected " + std::to_string(occ.count()) +
                        " occurrence times, got " + std::to_string(times.size()));
  for (std::size_t i = 0; i < times.size(); ++i) {
    std::int64_t j = occ.first + static_cast<std::int64_t>(i);
    OccurrenceWindow w = clamped_window(m, j, td);
    if (!w.contains(times[i]))
      throw ScenarioError(kind + " '" + id + "' occurrence " + std::to_string(j) + ": " +
                          std::to_string(times[i]) + " outside window [" +
                          std::to_string(w.earliest) + ", " + std::to_string(w.latest) + "]");
    if (i > 0 && times[i] < times[i - 1])
      throw ScenarioError(kind + " '" + id + "' occurrence " + std::to_string(j) +
                          ": earlier than the previous occurrence");
  }
}

void check_scenario(const Model& m, const Scenario& sc) {
  const auto& net = m.net;
  for (const auto& [id, v] : sc.signals)
    if (!net.find_signal(id)) throw ScenarioError("unknown signal '" + id + "' in scenario");
  for (const auto& [id, v] : sc.tasks)
    if (!net.find_task(id)) throw ScenarioError("unknown task '" + id + "' in scenario");
  for (std::size_t i = 0; i < net.signals.size(); ++i) {
    const auto& s = net.signals[i];
    auto it = sc.signals.find(s.id);
    if (it == sc.signals.end() && m.sigs[i].occ.count() > 0)
      throw ScenarioError("signal '" + s.id + "' missing from scenario");
    check_source("signal", s.id, s.update_model, m.sigs[i].occ,
                 it == sc.signals.end() ? std::vector<Tick>{} : it->second, m.td);
  }
  for (std::size_t i = 0; i < net.tasks.size(); ++i) {
    const auto& t = net.tasks[i];
    auto it = sc.tasks.find(t.id);
    if (it == sc.tasks.end() && m.tasks[i].count() > 0)
      throw ScenarioError("task '" + t.id + "' missing from scenario");
    check_source("task", t.id, t.activation, m.tasks[i],
                 it == sc.tasks.end() ? std::vector<Tick>{} : it->second, m.td);
  }
  for (const auto& [id, v] : sc.round_up) {
    if (!net.find_frame(id)) throw ScenarioError("unknown frame '" + id + "' in scenario");
    const auto& f = m.frames[net.frame_index(id)];
    if (static_cast<std::int64_t>(v.size()) > f.limit)
      throw ScenarioError("frame '" + id + "': more rounding choices than frame instances");
    for (int r : v)
      if (r != 0 && r != 1) throw ScenarioError("frame '" + id + "': rounding choice must be 0 or 1");
  }
}

struct ContainerInst {
  std::int64_t fill = 0;
  Tick first = 0;
  bool has_member = false;
  bool threshold_hit = false;
  Tick alpha = 0;
  Tick sigma = 0;
  bool triggered = false;
  TriggerKind kind = TriggerKind::Timeout;
  std::int64_t frame_instance = 0;
  // (containee pdu, instance) of the surviving members
  std::vector<std::pair<std::size_t, std::int64_t>> members;
};

class Run {
 public:
  Run(const Model& m, const Scenario& sc) : m_(m), net_(m.net), sc_(sc), td_(m.td) {
    pdu_insts_.resize(net_.pdus.size());
    pending_.assign(net_.pdus.size(), false);
    event_.assign(net_.pdus.size(), false);
    conts_.resize(net_.pdus.size());
    triggered_c_.assign(net_.pdus.size(), 0);
    frame_insts_.resize(net_.frames.size());
    bus_free_.assign(net_.buses.size(), td_.min);
    queue_.resize(net_.buses.size());

    for (std::size_t i = 0; i < net_.signals.size(); ++i) {
      auto it = sc_.signals.find(net_.signals[i].id);
      if (it == sc_.signals.end()) continue;
      for (std::size_t j = 0; j < it->second.size(); ++j)
        changes_.push_back({it->second[j], i, m.sigs[i].occ.first + static_cast<std::int64_t>(j)});
    }
    std::sort(changes_.begin(), changes_.end());
    task_times_.resize(net_.tasks.size());
    for (std::size_t i = 0; i < net_.tasks.size(); ++i) {
      auto it = sc_.tasks.find(net_.tasks[i].id);
      if (it == sc_.tasks.end()) continue;
      task_times_[i] = it->second;
      for (std::size_t j = 0; j < it->second.size(); ++j)
        acts_.push_back({it->second[j], i, m.tasks[i].first + static_cast<std::int64_t>(j)});
    }
    std::sort(acts_.begin(), acts_.end());
  }

  Trace run() {
    for (Tick t = td_.min; t <= td_.max; ++t) {
      signal_changes(t);
      plain_triggers(t);
      packing(t);
      container_triggers(t);
      copies(t);
      arbitration(t);
    }
    return finish();
  }

 private:
  void emit(Tick t, EventKind k, const std::string& el, std::int64_t inst, std::string detail = {}) {
    trace_.events.push_back({t, k, el, inst, std::move(detail)});
  }

  void signal_changes(Tick t) {
    std::fill(event_.begin(), event_.end(), false);
    arrivals_.clear();
    while (ci_ < changes_.size() && std::get<0>(changes_[ci_]) == t) {
      auto [tick, s, j] = changes_[ci_++];
      emit(t, EventKind::SignalChange, net_.signals[s].id, j);
      if (m_.sigs[s].triggers) event_[m_.sigs[s].pdu] = true;
    }
  }

  void plain_triggers(Tick t) {
    for (std::size_t p = 0; p < net_.pdus.size(); ++p) {
      const Pdu& pd = net_.pdus[p];
      if (pd.is_container || pending_[p]) continue;
      bool timer = pd.timeout_period && (t - td_.min) % *pd.timeout_period == 0;
      if (!event_[p] && !timer) continue;
      auto& insts = pdu_insts_[p];
      if (static_cast<std::int64_t>(insts.size()) >= m_.pdus[p].limit)
        throw std::logic_error("occurrence bound of pdu '" + pd.id + "' exceeded");
      PduInstance in;
      in.alpha = t;
      in.sigma = td_.sup;
      in.trigger = event_[p] ? TriggerKind::Event : TriggerKind::Timeout;
      in.length = pd.length_bits;
      insts.push_back(in);
      auto k = static_cast<std::int64_t>(insts.size());
      emit(t, EventKind::PduTrigger, pd.id, k, to_string(in.trigger));
      if (pd.in_container()) {
        insts.back().sigma = t;
        arrivals_.push_back(p);
      } else {
        pending_[p] = true;
      }
    }
  }

  void packing(Tick t) {
    for (std::size_t c = 0; c < net_.pdus.size(); ++c) {
      const Pdu& cd = net_.pdus[c];
      if (!cd.is_container) continue;
      for (std::size_t i : m_.pdus[c].containees)
        if (std::find(arrivals_.begin(), arrivals_.end(), i) != arrivals_.end()) place(t, c, i);
    }
  }

  ContainerInst& cinst(std::size_t c, std::int64_t idx) {
    auto& v = conts_[c];
    if (idx > m_.pdus[c].limit)
      throw std::logic_error("occurrence bound of container '" + net_.pdus[c].id + "' exceeded");
    while (static_cast<std::int64_t>(v.size()) < idx) {
      ContainerInst ci;
      ci.fill = net_.pdus[c].header_bits;
      ci.alpha = ci.sigma = td_.sup;
      v.push_back(ci);
    }
    return v[static_cast<std::size_t>(idx - 1)];
  }

  void place(Tick t, std::size_t c, std::size_t i) {
    const Pdu& cd = net_.pdus[c];
    const Pdu& pd = net_.pdus[i];
    auto& insts = pdu_insts_[i];
    auto k = static_cast<std::int64_t>(insts.size());
    std::int64_t fn = triggered_c_[c] + 1;
    std::int64_t prev = k >= 2 ? insts[static_cast<std::size_t>(k - 2)].container_instance : 0;
    std::int64_t start = fn;
    if (pd.collection == Collection::LastIsBest) {
      if (prev >= fn) {
        auto& old = insts[static_cast<std::size_t>(k - 2)];
        old.overwritten = true;
        insts.back().container_instance = prev;
        auto& ci = cinst(c, prev);
        for (auto& mbr : ci.members)
          if (mbr.first == i) mbr.second = k;
        emit(t, EventKind::Overwrite, pd.id, k - 1, "by #" + std::to_string(k));
        emit(t, EventKind::Pack, pd.id, k, cd.id + "#" + std::to_string(prev));
        return;
      }
    } else {
      start = std::max(fn, prev + 1);
    }
    std::int64_t target = start;
    if (cd.layout == Layout::Dynamic)
      while (cinst(c, target).fill + pd.length_bits > cd.length_bits) ++target;
    auto& ci = cinst(c, target);
    ci.fill += pd.length_bits;
    if (!ci.has_member) {
      ci.has_member = true;
      ci.first = t;
    }
    if (cd.threshold_bits && ci.fill > *cd.threshold_bits) ci.threshold_hit = true;
    ci.members.push_back({i, k});
    insts.back().container_instance = target;
    emit(t, EventKind::Pack, pd.id, k, cd.id + "#" + std::to_string(target));
  }

  void container_triggers(Tick t) {
    for (std::size_t c = 0; c < net_.pdus.size(); ++c) {
      const Pdu& cd = net_.pdus[c];
      if (!cd.is_container) continue;
      std::int64_t idx = triggered_c_[c] + 1;
      if (idx > static_cast<std::int64_t>(conts_[c].size())) continue;
      if (idx > 1 && conts_[c][static_cast<std::size_t>(idx - 2)].sigma >= t) continue;
      auto& ci = conts_[c][static_cast<std::size_t>(idx - 1)];
      if (!ci.has_member) continue;
      bool fire = false;
      if (cd.trigger_on_first) {
        fire = true;
        ci.kind = TriggerKind::FirstContainee;
      } else if (ci.threshold_hit) {
        fire = true;
        ci.kind = TriggerKind::Threshold;
      } else if (cd.timeout_period && ci.first + *cd.timeout_period <= t) {
        fire = true;
        ci.kind = TriggerKind::Timeout;
      }
      if (!fire) continue;
      ci.triggered = true;
      ci.alpha = t;
      triggered_c_[c] = idx;
      pending_[c] = true;
      emit(t, EventKind::PduTrigger, cd.id, idx, to_string(ci.kind));
    }
  }

  std::int64_t container_length(std::size_t c, const ContainerInst& ci) const {
    const Pdu& cd = net_.pdus[c];
    if (cd.layout == Layout::Static) return cd.length_bits;
    std::int64_t len = cd.header_bits;
    for (const auto& [i, k] : ci.members) len += net_.pdus[i].length_bits;
    return len;
  }

  void copies(Tick t) {
    while (ai_ < acts_.size() && std::get<0>(acts_[ai_]) == t) {
      auto [tick, task, j] = acts_[ai_++];
      emit(t, EventKind::TaskActivation, net_.tasks[task].id, j);
      for (std::size_t f = 0; f < net_.frames.size(); ++f) {
        if (m_.frames[f].tx != task) continue;
        copy_frame(t, f);
      }
    }
  }

  void copy_frame(Tick t, std::size_t f) {
    const Frame& fd = net_.frames[f];
    FrameInstance fi;
    fi.alpha = td_.sup;
    fi.copy = t;
    fi.length = fd.header_bits;
    bool any = false;
    auto& insts = frame_insts_[f];
    auto idx = static_cast<std::int64_t>(insts.size()) + 1;
    for (std::size_t p : m_.frames[f].pdus) {
      if (!pending_[p]) continue;
      if (!any && idx > m_.frames[f].limit)
        throw std::logic_error("occurrence bound of frame '" + fd.id + "' exceeded");
      any = true;
      pending_[p] = false;
      if (net_.pdus[p].is_container) {
        auto& ci = conts_[p][static_cast<std::size_t>(triggered_c_[p] - 1)];
        ci.sigma = t;
        ci.frame_instance = idx;
        fi.alpha = std::min(fi.alpha, ci.alpha);
        fi.length += container_length(p, ci);
      } else {
        auto& in = pdu_insts_[p].back();
        in.sigma = t;
        in.frame_instance = idx;
        fi.alpha = std::min(fi.alpha, in.alpha);
        fi.length += in.length;
      }
    }
    if (!any) return;
    const Bus& bus = net_.buses[m_.frames[f].bus];
    std::int64_t prod = fi.length * bus.t_bit.num;
    std::int64_t q = prod / bus.t_bit.den;
    fi.fractional = prod % bus.t_bit.den != 0;
    int up = 0;
    auto it = sc_.round_up.find(fd.id);
    if (it != sc_.round_up.end() && static_cast<std::int64_t>(it->second.size()) >= idx)
      up = it->second[static_cast<std::size_t>(idx - 1)];
    fi.duration = bus.t_arb + q + (fi.fractional && up ? 1 : 0);
    fi.sigma = fi.eps = td_.sup;
    insts.push_back(fi);
    emit(fi.alpha, EventKind::FrameQueue, fd.id, idx, "copied@" + std::to_string(t));
    queue_[m_.frames[f].bus].push_back({fd.priority, idx, f});
  }

  void arbitration(Tick t) {
    for (std::size_t b = 0; b < net_.buses.size(); ++b) {
      auto& q = queue_[b];
      if (q.empty() || bus_free_[b] > t) continue;
      auto best = std::min_element(q.begin(), q.end());
      auto [prio, idx, f] = *best;
      q.erase(best);
      auto& fi = frame_insts_[f][static_cast<std::size_t>(idx - 1)];
      fi.sigma = t;
      Tick end = t + fi.duration;
      fi.eps = end > td_.max ? td_.sup : end;
      bus_free_[b] = fi.eps;
      emit(t, EventKind::TxStart, net_.frames[f].id, idx);
      if (fi.eps <= td_.max) emit(fi.eps, EventKind::TxEnd, net_.frames[f].id, idx);
    }
  }

  Trace finish() {
    trace_.time = td_;
    for (std::size_t f = 0; f < net_.frames.size(); ++f) {
      const Frame& fd = net_.frames[f];
      const CommTask& rx = net_.tasks[m_.frames[f].rx];
      const auto& acts = task_times_[m_.frames[f].rx];
      for (std::size_t x = 0; x < frame_insts_[f].size(); ++x) {
        auto& fi = frame_insts_[f][x];
        if (fi.eps > td_.max) continue;
        auto it = std::lower_bound(acts.begin(), acts.end(), fi.eps + rx.clock_drift);
        if (it == acts.end()) continue;
        fi.rx_instance = m_.tasks[m_.frames[f].rx].first + (it - acts.begin());
        fi.rx_activation = *it;
        fi.rx_deadline = *it + rx.deadline;
        auto idx = static_cast<std::int64_t>(x) + 1;
        emit(fi.rx_activation, EventKind::RxActivation, rx.id, fi.rx_instance,
             occ_name(fd.id, idx));
        emit(fi.rx_deadline, EventKind::RxDeadline, rx.id, fi.rx_instance, occ_name(fd.id, idx));
      }
      trace_.frames[fd.id] = frame_insts_[f];
    }
    for (std::size_t p = 0; p < net_.pdus.size(); ++p) {
      const Pdu& pd = net_.pdus[p];
      if (!pd.is_container) {
        trace_.pdus[pd.id] = pdu_insts_[p];
        continue;
      }
      std::vector<PduInstance> out;
      for (const auto& ci : conts_[p]) {
        PduInstance in;
        in.alpha = ci.alpha;
        in.sigma = ci.sigma;
        in.trigger = ci.kind;
        in.frame_instance = ci.frame_instance;
        in.length = container_length(p, ci);
        out.push_back(in);
      }
      trace_.pdus[pd.id] = out;
    }
    for (std::size_t s = 0; s < net_.signals.size(); ++s) {
      const Signal& sd = net_.signals[s];
      trace_.signal_first[sd.id] = m_.sigs[s].occ.first;
      auto& outs = trace_.signals[sd.id];
      auto it = sc_.signals.find(sd.id);
      if (it == sc_.signals.end()) continue;
      for (Tick phi : it->second) outs.push_back(resolve(m_.sigs[s].pdu, phi));
    }
    std::stable_sort(trace_.events.begin(), trace_.events.end(),
                     [](const TraceEvent& a, const TraceEvent& b) { return a.tick < b.tick; });
    return std::move(trace_);
  }

  SignalOutcome resolve(std::size_t p, Tick phi) const {
    SignalOutcome o;
    o.phi = phi;
    const auto& insts = pdu_insts_[p];
    std::size_t k = 0;
    while (k < insts.size() && insts[k].sigma < phi) ++k;
    o.pdu_instance = static_cast<std::int64_t>(k) + 1;
    if (k == insts.size() || insts[k].sigma > td_.max) return o;
    const PduInstance& in = insts[k];
    std::size_t frame;
    std::int64_t fidx;
    if (net_.pdus[p].in_container()) {
      if (in.overwritten || in.container_instance == 0) return o;
      auto c = static_cast<std::size_t>(m_.pdus[p].container);
      const auto& ci = conts_[c][static_cast<std::size_t>(in.container_instance - 1)];
      if (ci.frame_instance == 0) return o;
      frame = static_cast<std::size_t>(m_.pdus[c].frame);
      fidx = ci.frame_instance;
    } else {
      frame = static_cast<std::size_t>(m_.pdus[p].frame);
      fidx = in.frame_instance;
    }
    if (fidx == 0) return o;
    const auto& fi = frame_insts_[frame][static_cast<std::size_t>(fidx - 1)];
    if (fi.rx_instance == 0) return o;
    o.latency = fi.rx_deadline - phi;
    return o;
  }

  const Model& m_;
  const NetworkModel& net_;
  const Scenario& sc_;
  TimeDomain td_;
  Trace trace_;

  std::vector<std::tuple<Tick, std::size_t, std::int64_t>> changes_, acts_;
  std::size_t ci_ = 0, ai_ = 0;
  std::vector<std::vector<Tick>> task_times_;
  std::vector<std::vector<PduInstance>> pdu_insts_;
  std::vector<bool> pending_, event_;
  std::vector<std::size_t> arrivals_;
  std::vector<std::vector<ContainerInst>> conts_;
  std::vector<std::int64_t> triggered_c_;
  std::vector<std::vector<FrameInstance>> frame_insts_;
  std::vector<Tick> bus_free_;
  std::vector<std::vector<std::tuple<std::int64_t, std::int64_t, std::size_t>>> queue_;
};

Trace simulate_checked(const Model& m, const Scenario& sc) { return Run(m, sc).run(); }

std::optional<Tick> worst(const Trace& tr, const std::string& signal) {
  std::optional<Tick> best;
  for (const auto& o : tr.signals.at(signal))
    if (o.latency && (!best || *o.latency > *best)) best = o.latency;
  return best;
}

std::vector<Tick> grid(OccurrenceWindow w, Tick step) {
  std::vector<Tick> g;
  for (Tick t = w.earliest; t <= w.latest; t += step) g.push_back(t);
  if (g.back() != w.latest) g.push_back(w.latest);
  return g;
}

}  // namespace

Trace simulate(const NetworkModel& net, const Scenario& scenario) {
  Model m(net);
  check_scenario(m, scenario);
  return simulate_checked(m, scenario);
}

std::optional<Tick> latency(const Trace& trace, const std::string& signal,
                            std::int64_t occurrence) {
  auto it = trace.signals.find(signal);
  if (it == trace.signals.end()) throw DomainError("unknown signal '" + signal + "'");
  std::int64_t first = trace.signal_first.at(signal);
  std::int64_t idx = occurrence - first;
  if (idx < 0 || idx >= static_cast<std::int64_t>(it->second.size()))
    throw DomainError("signal '" + signal + "' has no occurrence " + std::to_string(occurrence));
  return it->second[static_cast<std::size_t>(idx)].latency;
}

std::optional<Tick> worst_latency(const Trace& trace, const std::string& signal) {
  if (!trace.signals.count(signal)) throw DomainError("unknown signal '" + signal + "'");
  return worst(trace, signal);
}

std::vector<TraceEvent> chain(const Trace& trace, const NetworkModel& net,
                              const std::string& signal, std::int64_t occurrence) {
  latency(trace, signal, occurrence);  // validates the occurrence
  const Signal* s = net.find_signal(signal);
  const auto& out =
      trace.signals.at(signal)[static_cast<std::size_t>(occurrence - trace.signal_first.at(signal))];
  std::vector<TraceEvent> res;
  auto pick = [&](EventKind k, const std::string& el, std::int64_t inst) {
    for (const auto& e : trace.events)
      if (e.kind == k && e.element == el && e.instance == inst) res.push_back(e);
  };
  pick(EventKind::SignalChange, signal, occurrence);
  const Pdu* p = net.find_pdu(s->pdu);
  const auto& pinsts = trace.pdus.at(p->id);
  auto k = out.pdu_instance;
  if (k > static_cast<std::int64_t>(pinsts.size())) return res;
  pick(EventKind::PduTrigger, p->id, k);
  const auto& pin = pinsts[static_cast<std::size_t>(k - 1)];
  std::string frame = p->frame;
  std::int64_t f = pin.frame_instance;
  if (p->in_container()) {
    pick(EventKind::Pack, p->id, k);
    if (pin.overwritten || pin.container_instance == 0) return res;
    const auto& cinsts = trace.pdus.at(p->container);
    const auto& cin = cinsts[static_cast<std::size_t>(pin.container_instance - 1)];
    if (cin.alpha <= trace.time.max) pick(EventKind::PduTrigger, p->container, pin.container_instance);
    frame = net.find_pdu(p->container)->frame;
    f = cin.frame_instance;
  }
  if (f == 0) return res;
  pick(EventKind::FrameQueue, frame, f);
  pick(EventKind::TxStart, frame, f);
  pick(EventKind::TxEnd, frame, f);
  const auto& fi = trace.frames.at(frame)[static_cast<std::size_t>(f - 1)];
  if (fi.rx_instance != 0) {
    const std::string& rx = net.find_frame(frame)->rx_task;
    for (const auto& e : trace.events)
      if ((e.kind == EventKind::RxActivation || e.kind == EventKind::RxDeadline) &&
          e.element == rx && e.instance == fi.rx_instance && e.detail == occ_name(frame, f))
        res.push_back(e);
  }
  std::stable_sort(res.begin(), res.end(),
                   [](const TraceEvent& a, const TraceEvent& b) { return a.tick < b.tick; });
  return res;
}

std::string format_trace(const Trace& trace) {
  std::ostringstream os;
  for (const auto& e : trace.events) {
    os << e.tick << ' ' << to_string(e.kind) << ' ' << e.element << ' ' << e.instance;
    if (!e.detail.empty()) os << ' ' << e.detail;
    os << '\n';
  }
  return os.str();
}

long double scenario_count(const NetworkModel& net, Tick step) {
  if (step < 1) throw DomainError("grid step must be >= 1");
  OccurrenceBounds b = occurrence_bounds(net);
  long double n = 1;
  auto add = [&](const TimingModel& m, const OccurrenceRange& r) {
    for (std::int64_t j = r.first; j <= r.last; ++j)
      n *= static_cast<long double>(grid(clamped_window(m, j, net.time), step).size());
  };
  for (const auto& s : net.signals) add(s.update_model, b.signals.at(s.id));
  for (const auto& t : net.tasks) add(t.activation, b.tasks.at(t.id));
  return n;
}

EnumerationResult worst_case_enumerate(const NetworkModel& net, const std::string& signal,
                                       Tick step, long double cap) {
  if (!net.find_signal(signal)) throw DomainError("unknown signal '" + signal + "'");
  long double count = scenario_count(net, step);
  if (count > cap) {
    std::ostringstream os;
    os.precision(3);
    os << "enumeration refused: " << std::scientific << static_cast<double>(count)
       << " scenarios exceed the cap of " << static_cast<double>(cap);
    throw EnumerationRefused(os.str(), count);
  }
  Model m(net);

  struct Slot {
    std::vector<Tick>* times;
    std::size_t pos;
    std::vector<Tick> values;
  };
  Scenario sc;
  std::vector<Slot> slots;
  for (std::size_t i = 0; i < net.signals.size(); ++i) {
    auto& v = sc.signals[net.signals[i].id];
    v.resize(static_cast<std::size_t>(m.sigs[i].occ.count()));
  }
  for (std::size_t i = 0; i < net.tasks.size(); ++i) {
    auto& v = sc.tasks[net.tasks[i].id];
    v.resize(static_cast<std::size_t>(m.tasks[i].count()));
  }
  for (std::size_t i = 0; i < net.signals.size(); ++i) {
    auto& v = sc.signals[net.signals[i].id];
    for (std::size_t j = 0; j < v.size(); ++j)
      slots.push_back({&v, j,
                       grid(clamped_window(net.signals[i].update_model,
                                           m.sigs[i].occ.first + static_cast<std::int64_t>(j), net.time),
                            step)});
  }
  for (std::size_t i = 0; i < net.tasks.size(); ++i) {
    auto& v = sc.tasks[net.tasks[i].id];
    for (std::size_t j = 0; j < v.size(); ++j)
      slots.push_back({&v, j,
                       grid(clamped_window(net.tasks[i].activation,
                                           m.tasks[i].first + static_cast<std::int64_t>(j), net.time),
                            step)});
  }

  EnumerationResult res;
  res.exact = step == 1;
  bool have = false;
  auto consider = [&](const Scenario& s) {
    Trace tr = simulate_checked(m, s);
    ++res.scenarios;
    std::optional<Tick> lat = worst(tr, signal);
    auto value = lat.value_or(-1);
    if (!have || value > res.latency.value_or(-1)) {
      have = true;
      res.latency = lat;
      res.witness = s;
    }
    return tr;
  };

  std::function<void(std::size_t)> rec = [&](std::size_t k) {
    if (k == slots.size()) {
      Scenario s = sc;
      Trace tr = consider(s);
      std::vector<std::pair<std::string, std::size_t>> frac;
      for (const auto& [fid, insts] : tr.frames)
        for (std::size_t x = 0; x < insts.size(); ++x)
          if (insts[x].fractional) frac.push_back({fid, x});
      if (frac.empty()) return;
      for (const auto& [fid, insts] : tr.frames) s.round_up[fid].assign(insts.size(), 0);
      for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << frac.size()); ++mask) {
        for (std::size_t b = 0; b < frac.size(); ++b)
          s.round_up[frac[b].first][frac[b].second] = (mask >> b) & 1 ? 1 : 0;
        consider(s);
      }
      return;
    }
    Slot& sl = slots[k];
    Tick lower = sl.pos > 0 ? (*sl.times)[sl.pos - 1] : std::numeric_limits<Tick>::min();
    for (Tick v : sl.values) {
      if (v < lower) continue;
      (*sl.times)[sl.pos] = v;
      rec(k + 1);
    }
  };
  rec(0);
  return res;
}

Scenario complete_scenario(const NetworkModel& net, Scenario partial) {
  OccurrenceBounds b = occurrence_bounds(net);
  auto fill = [&](const TimingModel& m, const OccurrenceRange& r) {
    std::vector<Tick> v;
    for (std::int64_t j = r.first; j <= r.last; ++j) {
      Tick t = clamped_window(m, j, net.time).earliest;
      v.push_back(v.empty() ? t : std::max(t, v.back()));
    }
    return v;
  };
  for (const auto& s : net.signals)
    if (!partial.signals.count(s.id)) partial.signals[s.id] = fill(s.update_model, b.signals.at(s.id));
  for (const auto& t : net.tasks)
    if (!partial.tasks.count(t.id)) partial.tasks[t.id] = fill(t.activation, b.tasks.at(t.id));
  return partial;
}

}  // namespace wclat
