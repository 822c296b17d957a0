#include "wclat/network_model.hpp"

#include <algorithm>
#include <numeric>
#include <set>

namespace wclat {

namespace {

template <class T>
const T* find_by_id(const std::vector<T>& v, const std::string& id) {
  auto it = std::find_if(v.begin(), v.end(), [&](const T& e) { return e.id == id; });
  return it == v.end() ? nullptr : &*it;
}

template <class T>
std::size_t index_by_id(const std::vector<T>& v, const std::string& id, const char* kind) {
  for (std::size_t i = 0; i < v.size(); ++i)
    if (v[i].id == id) return i;
  throw ConfigError(std::string("unknown ") + kind + " '" + id + "'");
}

template <class T>
void check_unique(const std::vector<T>& v, const char* kind, std::vector<Diagnostic>& out) {
  std::set<std::string> seen;
  for (const auto& e : v)
    if (!seen.insert(e.id).second)
      out.push_back({e.id, "duplicate id", std::string("duplicate ") + kind + " id"});
}

std::int64_t checked_lcm(std::int64_t a, std::int64_t b) {
  std::int64_t g = std::gcd(a, b);
  if (a / g > (std::int64_t{1} << 40) / b) throw ConfigError("LCM of periods overflows");
  return a / g * b;
}

}  // namespace

const Bus* NetworkModel::find_bus(const std::string& id) const { return find_by_id(buses, id); }
const Frame* NetworkModel::find_frame(const std::string& id) const { return find_by_id(frames, id); }
const Pdu* NetworkModel::find_pdu(const std::string& id) const { return find_by_id(pdus, id); }
const Signal* NetworkModel::find_signal(const std::string& id) const {
  return find_by_id(signals, id);
}
const CommTask* NetworkModel::find_task(const std::string& id) const {
  return find_by_id(tasks, id);
}
std::size_t NetworkModel::pdu_index(const std::string& id) const {
  return index_by_id(pdus, id, "pdu");
}
std::size_t NetworkModel::frame_index(const std::string& id) const {
  return index_by_id(frames, id, "frame");
}
std::size_t NetworkModel::task_index(const std::string& id) const {
  return index_by_id(tasks, id, "task");
}
std::size_t NetworkModel::signal_index(const std::string& id) const {
  return index_by_id(signals, id, "signal");
}

std::int64_t max_frame_length(const NetworkModel& net, const Frame& f) {
  std::int64_t len = f.header_bits;
  for (const auto& pid : f.pdus)
    if (const Pdu* p = net.find_pdu(pid)) len += p->length_bits;
  return len;
}

std::vector<Diagnostic> validate(const NetworkModel& net) {
  std::vector<Diagnostic> out;
  auto add = [&](const std::string& el, const std::string& rule, const std::string& msg) {
    out.push_back({el, rule, msg});
  };

  if (!net.time.valid()) add("time", "time domain", "requires t_min <= t_max < t_sup");
  check_unique(net.buses, "bus", out);
  check_unique(net.frames, "frame", out);
  check_unique(net.pdus, "pdu", out);
  check_unique(net.signals, "signal", out);
  check_unique(net.tasks, "task", out);

  for (const auto& b : net.buses) {
    if (b.t_arb < 0) add(b.id, "bus timing", "t_arb must be >= 0");
    if (b.t_bit.num <= 0 || b.t_bit.den <= 0) add(b.id, "bus timing", "t_bit must be > 0");
  }

  for (const auto& t : net.tasks) {
    if (t.deadline < 1) add(t.id, "task deadline", "deadline must be >= 1");
    if (t.clock_drift < 0) add(t.id, "clock drift", "clock drift must be >= 0");
  }

  for (const auto& s : net.signals) {
    if (s.length_bits < 1) add(s.id, "signal length", "length_bits must be >= 1");
    const Pdu* p = net.find_pdu(s.pdu);
    if (!p)
      add(s.id, "dangling reference", "unknown pdu '" + s.pdu + "'");
    else if (p->is_container)
      add(s.id, "signal in container", "signals must map to a plain pdu");
  }

  for (const auto& p : net.pdus) {
    if (p.frame.empty() == p.container.empty()) {
      add(p.id, "pdu parent", "exactly one of frame or container must be set");
    }
    if (p.length_bits < 1 || p.header_bits < 0 || p.header_bits >= p.length_bits)
      add(p.id, "pdu length", "requires 0 <= header_bits < length_bits");
    if (p.threshold_bits && *p.threshold_bits > p.length_bits)
      add(p.id, "threshold", "threshold_bits exceeds max length");
    if (p.timeout_period && *p.timeout_period < 1)
      add(p.id, "timeout", "timeout_period must be >= 1");
    if (!p.frame.empty()) {
      const Frame* f = net.find_frame(p.frame);
      if (!f)
        add(p.id, "dangling reference", "unknown frame '" + p.frame + "'");
      else if (std::find(f->pdus.begin(), f->pdus.end(), p.id) == f->pdus.end())
        add(p.id, "parent mismatch", "frame '" + f->id + "' does not list this pdu");
    }
    if (!p.container.empty()) {
      const Pdu* c = net.find_pdu(p.container);
      if (!c) {
        add(p.id, "dangling reference", "unknown container '" + p.container + "'");
      } else if (!c->is_container) {
        add(p.id, "parent mismatch", "'" + c->id + "' is not a container");
      } else {
        if (std::find(c->containees.begin(), c->containees.end(), p.id) == c->containees.end())
          add(p.id, "parent mismatch", "container '" + c->id + "' does not list this pdu");
        if (c->header_bits + p.length_bits > c->length_bits)
          add(p.id, "containee too large", "does not fit into an empty '" + c->id + "'");
      }
      if (p.is_container) add(p.id, "nested container", "containers cannot be nested");
    }
    if (p.is_container) {
      for (const auto& cid : p.containees) {
        const Pdu* c = net.find_pdu(cid);
        if (!c)
          add(p.id, "dangling reference", "unknown containee '" + cid + "'");
        else if (c->container != p.id)
          add(cid, "parent mismatch", "containee does not reference '" + p.id + "'");
      }
    } else {
      std::int64_t bits = p.header_bits;
      for (const auto& s : net.signals)
        if (s.pdu == p.id) bits += s.length_bits;
      if (bits > p.length_bits) add(p.id, "pdu overflow", "signals exceed pdu length");
    }
  }

  std::map<std::pair<std::string, std::int64_t>, std::string> prio;
  for (const auto& f : net.frames) {
    const Bus* b = net.find_bus(f.bus);
    if (!b) add(f.id, "dangling reference", "unknown bus '" + f.bus + "'");
    auto [it, fresh] = prio.emplace(std::make_pair(f.bus, f.priority), f.id);
    if (!fresh) add(f.id, "duplicate priority", "same priority as frame '" + it->second + "'");
    const CommTask* tx = net.find_task(f.tx_task);
    const CommTask* rx = net.find_task(f.rx_task);
    if (!tx) add(f.id, "dangling reference", "unknown tx task '" + f.tx_task + "'");
    if (!rx) add(f.id, "dangling reference", "unknown rx task '" + f.rx_task + "'");
    if (tx && rx && tx->station == rx->station)
      add(f.id, "same station", "tx and rx tasks belong to the same station");
    if (f.header_bits < 0) add(f.id, "frame header", "header_bits must be >= 0");
    for (const auto& pid : f.pdus) {
      const Pdu* p = net.find_pdu(pid);
      if (!p)
        add(f.id, "dangling reference", "unknown pdu '" + pid + "'");
      else if (p->frame != f.id)
        add(pid, "parent mismatch", "pdu does not reference frame '" + f.id + "'");
    }
    // a transmitted instance carries at least its smallest PDU
    std::int64_t least = -1;
    for (const auto& pid : f.pdus) {
      const Pdu* p = net.find_pdu(pid);
      if (!p) continue;
      std::int64_t len = p->length_bits;
      if (p->is_container && p->layout == Layout::Dynamic) {
        std::int64_t inner = -1;
        for (const auto& cid : p->containees)
          if (const Pdu* c = net.find_pdu(cid); c && (inner < 0 || c->length_bits < inner)) inner = c->length_bits;
        len = p->header_bits + std::max<std::int64_t>(0, inner);
      }
      if (least < 0 || len < least) least = len;
    }
    least = f.header_bits + std::max<std::int64_t>(0, least);
    if (b && b->t_bit.den > 0 && b->t_arb + least * b->t_bit.num / b->t_bit.den < 1)
      add(f.id, "zero duration", "shortest transmission must take at least one tick");
  }

  for (const auto& o : net.objectives)
    if (!net.find_signal(o)) add(o, "dangling reference", "unknown objective signal");

  return out;
}

TimingModel fold_writer_models(std::span<const TimingModel> writers, UnionOptions opt) {
  if (writers.empty()) throw DomainError("signal needs at least one writer model");
  TimingModel acc = writers.front();
  for (std::size_t i = 1; i < writers.size(); ++i) acc = unite(acc, writers[i], opt);
  return acc;
}

Tick analysis_horizon(const NetworkModel& net, HorizonOptions opt) {
  if (opt.explicit_horizon) return *opt.explicit_horizon;
  if (opt.slack < 1) throw ConfigError("horizon slack must be >= 1");
  std::int64_t lcm = 0;
  auto add = [&](std::int64_t p) { lcm = lcm == 0 ? p : checked_lcm(lcm, p); };
  for (const auto& s : net.signals)
    if (s.update_model.is_periodic()) add(s.update_model.as_periodic().period);
  for (const auto& t : net.tasks)
    if (t.activation.is_periodic()) add(t.activation.as_periodic().period);
  for (const auto& p : net.pdus)
    if (p.timeout_period) add(*p.timeout_period);
  if (lcm == 0)
    throw ConfigError("no periodic source in the model; an explicit horizon is required");
  Tick max_deadline = 0;
  for (const auto& t : net.tasks) max_deadline = std::max(max_deadline, t.deadline);
  return opt.slack * lcm + max_deadline;
}

OccurrenceWindow clamped_window(const TimingModel& m, std::int64_t i, const TimeDomain& td) {
  OccurrenceWindow w = m.eval(i);
  return {std::max(w.earliest, td.min), std::min(w.latest, td.max)};
}

OccurrenceRange source_occurrences(const TimingModel& m, const TimeDomain& td) {
  std::int64_t n = m.multiplicity();
  OccurrenceRange r;
  if (m.is_periodic()) {
    const auto& p = m.as_periodic();
    if (p.offset > td.max) return {1, 0};
    r.last = n * ((td.max - p.offset) / p.period + 1);
  } else {
    const auto& s = m.as_sporadic();
    Tick step = s.min_interarrival > 0 ? s.min_interarrival : s.max_interarrival;
    r.last = n * (td.max / step + 1);
  }
  // Occurrences whose whole window precedes the time domain are dropped.
  while (r.first <= r.last && m.eval(r.first).latest < td.min) ++r.first;
  return r;
}

OccurrenceBounds occurrence_bounds(const NetworkModel& net) {
  OccurrenceBounds b;
  for (const auto& s : net.signals) b.signals[s.id] = source_occurrences(s.update_model, net.time);
  for (const auto& t : net.tasks) b.tasks[t.id] = source_occurrences(t.activation, net.time);

  auto tx_count = [&](const std::string& frame_id) -> std::int64_t {
    const Frame* f = net.find_frame(frame_id);
    return f ? b.tasks[f->tx_task].count() : 0;
  };

  auto plain_count = [&](const Pdu& p) {
    std::int64_t n = 0;
    for (const auto& s : net.signals)
      if (s.pdu == p.id && s.triggers_pdu) n += b.signals[s.id].count();
    if (p.timeout_period) n += (net.time.max - net.time.min) / *p.timeout_period + 1;
    return n;
  };

  for (const auto& p : net.pdus)
    if (!p.is_container) b.pdus[p.id] = {1, std::max<std::int64_t>(1, plain_count(p))};
  for (const auto& p : net.pdus) {
    if (!p.is_container) continue;
    std::int64_t n = 0;
    for (const auto& c : p.containees)
      if (b.pdus.count(c)) n += b.pdus[c].count();
    b.pdus[p.id] = {1, std::max<std::int64_t>(1, n)};
  }
  // A plain frame-level PDU opens a new instance only after the previous one
  // was copied, so at most one instance per tx activation plus a pending one.
  // Containers are not capped: overflowing instances can pile up before any
  // of them is sent.
  for (const auto& p : net.pdus)
    if (!p.frame.empty() && !p.is_container)
      b.pdus[p.id].last = std::min(b.pdus[p.id].last, tx_count(p.frame) + 1);

  for (const auto& f : net.frames) {
    std::int64_t n = 0;
    for (const auto& pid : f.pdus) n += b.pdus[pid].count();
    b.frames[f.id] = {1, std::max<std::int64_t>(1, std::min(n, tx_count(f.id)))};
  }
  return b;
}

NetworkModel bus_slice(const NetworkModel& net, const std::string& signal) {
  const Signal* s = net.find_signal(signal);
  if (!s) throw ConfigError("unknown signal '" + signal + "'");
  const Pdu* p = net.find_pdu(s->pdu);
  if (p && p->in_container()) p = net.find_pdu(p->container);
  const Frame* f = p ? net.find_frame(p->frame) : nullptr;
  if (!f) throw ConfigError("signal '" + signal + "' is not mapped to a frame");

  NetworkModel out;
  out.time = net.time;
  out.us_per_tick = net.us_per_tick;
  std::set<std::string> pdus, tasks;
  for (const auto& b : net.buses)
    if (b.id == f->bus) out.buses.push_back(b);
  for (const auto& fr : net.frames) {
    if (fr.bus != f->bus) continue;
    out.frames.push_back(fr);
    tasks.insert(fr.tx_task);
    tasks.insert(fr.rx_task);
    for (const auto& id : fr.pdus) {
      pdus.insert(id);
      if (const Pdu* c = net.find_pdu(id))
        for (const auto& inner : c->containees) pdus.insert(inner);
    }
  }
  for (const auto& pd : net.pdus)
    if (pdus.count(pd.id)) out.pdus.push_back(pd);
  for (const auto& sg : net.signals)
    if (pdus.count(sg.pdu)) out.signals.push_back(sg);
  for (const auto& t : net.tasks)
    if (tasks.count(t.id)) out.tasks.push_back(t);
  for (const auto& o : net.objectives)
    if (out.find_signal(o)) out.objectives.push_back(o);
  return out;
}

}  // namespace wclat
