#include "wclat/model_io.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"

namespace wclat {

using json = nlohmann::ordered_json;

namespace {

// Tracks the JSON pointer of the value being read for error messages.
class Reader {
 public:
  explicit Reader(std::string source) : source_(std::move(source)) {}

  [[noreturn]] void fail(const std::string& path, const std::string& msg) const {
    throw FormatError(source_ + ": at " + (path.empty() ? "/" : path) + ": " + msg);
  }

  const json& member(const json& obj, const std::string& path, const char* key) const {
    if (!obj.is_object()) fail(path, "expected an object");
    auto it = obj.find(key);
    if (it == obj.end()) fail(path, std::string("missing field '") + key + "'");
    return *it;
  }

  std::int64_t integer(const json& v, const std::string& path) const {
    if (!v.is_number_integer()) fail(path, "expected an integer");
    return v.get<std::int64_t>();
  }
  std::int64_t integer(const json& obj, const std::string& path, const char* key) const {
    return integer(member(obj, path, key), path + "/" + key);
  }
  std::int64_t integer_or(const json& obj, const std::string& path, const char* key,
                          std::int64_t dflt) const {
    auto it = obj.find(key);
    if (it == obj.end() || it->is_null()) return dflt;
    return integer(*it, path + "/" + key);
  }
  std::optional<std::int64_t> opt_integer(const json& obj, const std::string& path, const char* key) const {
    auto it = obj.find(key);
    if (it == obj.end() || it->is_null()) return std::nullopt;
    return integer(*it, path + "/" + key);
  }
  std::string string(const json& obj, const std::string& path, const char* key) const {
    const json& v = member(obj, path, key);
    if (!v.is_string()) fail(path + "/" + key, "expected a string");
    return v.get<std::string>();
  }
  std::string string_or(const json& obj, const std::string& path, const char* key, std::string dflt) const {
    auto it = obj.find(key);
    if (it == obj.end() || it->is_null()) return dflt;
    if (!it->is_string()) fail(path + "/" + key, "expected a string");
    return it->get<std::string>();
  }
  bool boolean_or(const json& obj, const std::string& path, const char* key, bool dflt) const {
    auto it = obj.find(key);
    if (it == obj.end()) return dflt;
    if (!it->is_boolean()) fail(path + "/" + key, "expected true or false");
    return it->get<bool>();
  }
  const json& array(const json& obj, const std::string& path, const char* key) const {
    const json& v = member(obj, path, key);
    if (!v.is_array()) fail(path + "/" + key, "expected an array");
    return v;
  }
  std::vector<std::string> strings(const json& obj, const std::string& path, const char* key) const {
    auto it = obj.find(key);
    std::vector<std::string> out;
    if (it == obj.end()) return out;
    if (!it->is_array()) fail(path + "/" + key, "expected an array");
    for (std::size_t i = 0; i < it->size(); ++i) {
      if (!(*it)[i].is_string()) fail(path + "/" + key + "/" + std::to_string(i), "expected a string");
      out.push_back((*it)[i].get<std::string>());
    }
    return out;
  }

  TimingModel timing(const json& v, const std::string& path) const {
    if (!v.is_object() || v.size() != 1) fail(path, "expected {\"periodic\": ...} or {\"sporadic\": ...}");
    try {
      if (v.contains("periodic")) {
        const json& p = v["periodic"];
        std::string at = path + "/periodic";
        return TimingModel::periodic(integer_or(p, at, "offset", 0), integer(p, at, "period"),
                                     integer_or(p, at, "n", 1));
      }
      if (v.contains("sporadic")) {
        const json& s = v["sporadic"];
        std::string at = path + "/sporadic";
        return TimingModel::sporadic(integer(s, at, "l"), integer(s, at, "u"), integer_or(s, at, "n", 1));
      }
    } catch (const DomainError& e) {
      fail(path, e.what());
    }
    fail(path, "unknown timing model kind");
  }

 private:
  std::string source_;
};

json timing_json(const TimingModel& m) {
  if (m.is_periodic()) {
    const auto& p = m.as_periodic();
    return {{"periodic", {{"offset", p.offset}, {"period", p.period}, {"n", p.multiplicity}}}};
  }
  const auto& s = m.as_sporadic();
  return {{"sporadic", {{"l", s.min_interarrival}, {"u", s.max_interarrival}, {"n", s.multiplicity}}}};
}

json parse_json(const std::string& text, const std::string& source) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    // e.byte is 1-based offset of the failing character
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    std::string msg = e.what();
    auto pos = msg.find("syntax error");
    throw FormatError(source + ":" + std::to_string(line) + ":" + std::to_string(col) + ": " +
                      (pos == std::string::npos ? msg : msg.substr(pos)));
  }
}

}  // namespace

NetworkModel parse_model(const std::string& text, const std::string& source, LoadOptions opt) {
  json doc = parse_json(text, source);
  Reader r(source);
  NetworkModel net;
  if (!doc.is_object()) r.fail("", "expected an object");

  const json& time = r.member(doc, "", "time");
  Tick t_min = r.integer_or(time, "/time", "t_min", 0);
  std::optional<Tick> t_max = opt.horizon ? opt.horizon : r.opt_integer(time, "/time", "t_max");
  std::int64_t slack = opt.slack ? *opt.slack : r.integer_or(time, "/time", "slack", 2);
  if (auto it = time.find("us_per_tick"); it != time.end()) {
    if (!it->is_number()) r.fail("/time/us_per_tick", "expected a number");
    net.us_per_tick = it->get<double>();
  }

  const json& buses = r.array(doc, "", "buses");
  for (std::size_t i = 0; i < buses.size(); ++i) {
    std::string at = "/buses/" + std::to_string(i);
    Bus b;
    b.id = r.string(buses[i], at, "id");
    b.t_arb = r.integer_or(buses[i], at, "t_arb", 0);
    const json& tb = r.member(buses[i], at, "t_bit");
    if (tb.is_number_integer()) {
      b.t_bit = {tb.get<std::int64_t>(), 1};
    } else {
      b.t_bit.num = r.integer(tb, at + "/t_bit", "num");
      b.t_bit.den = r.integer_or(tb, at + "/t_bit", "den", 1);
    }
    net.buses.push_back(b);
  }

  const json& frames = r.array(doc, "", "frames");
  for (std::size_t i = 0; i < frames.size(); ++i) {
    std::string at = "/frames/" + std::to_string(i);
    const json& f = frames[i];
    Frame fr;
    fr.id = r.string(f, at, "id");
    fr.bus = r.string(f, at, "bus");
    fr.priority = r.integer(f, at, "priority");
    fr.tx_task = r.string(f, at, "tx_task");
    fr.rx_task = r.string(f, at, "rx_task");
    fr.pdus = r.strings(f, at, "pdus");
    fr.header_bits = r.integer_or(f, at, "header_bits", 0);
    net.frames.push_back(fr);
  }

  const json& pdus = r.array(doc, "", "pdus");
  for (std::size_t i = 0; i < pdus.size(); ++i) {
    std::string at = "/pdus/" + std::to_string(i);
    const json& p = pdus[i];
    Pdu pd;
    pd.id = r.string(p, at, "id");
    std::string kind = r.string_or(p, at, "kind", "plain");
    if (kind != "plain" && kind != "container") r.fail(at + "/kind", "expected \"plain\" or \"container\"");
    pd.is_container = kind == "container";
    pd.containees = r.strings(p, at, "containees");
    std::string layout = r.string_or(p, at, "layout", "dynamic");
    if (layout != "static" && layout != "dynamic") r.fail(at + "/layout", "expected \"static\" or \"dynamic\"");
    pd.layout = layout == "static" ? Layout::Static : Layout::Dynamic;
    pd.timeout_period = r.opt_integer(p, at, "timeout_period");
    pd.threshold_bits = r.opt_integer(p, at, "threshold_bits");
    pd.trigger_on_first = r.boolean_or(p, at, "trigger_on_first", false);
    pd.length_bits = r.integer(p, at, "length_bits");
    pd.header_bits = r.integer_or(p, at, "header_bits", 0);
    pd.frame = r.string_or(p, at, "frame", "");
    pd.container = r.string_or(p, at, "container", "");
    std::string coll = r.string_or(p, at, "collection", "last-is-best");
    if (coll != "last-is-best" && coll != "queued")
      r.fail(at + "/collection", "expected \"last-is-best\" or \"queued\"");
    pd.collection = coll == "queued" ? Collection::Queued : Collection::LastIsBest;
    net.pdus.push_back(pd);
  }

  UnionOptions uopt{opt.strict_safety};
  const json& signals = r.array(doc, "", "signals");
  for (std::size_t i = 0; i < signals.size(); ++i) {
    std::string at = "/signals/" + std::to_string(i);
    const json& s = signals[i];
    Signal sg;
    sg.id = r.string(s, at, "id");
    sg.pdu = r.string(s, at, "pdu");
    sg.length_bits = r.integer_or(s, at, "length_bits", 1);
    sg.triggers_pdu = r.boolean_or(s, at, "triggers_pdu", true);
    if (s.contains("writers")) {
      const json& w = r.array(s, at, "writers");
      if (w.empty()) r.fail(at + "/writers", "at least one writer is required");
      std::vector<TimingModel> ms;
      for (std::size_t k = 0; k < w.size(); ++k) ms.push_back(r.timing(w[k], at + "/writers/" + std::to_string(k)));
      sg.update_model = fold_writer_models(ms, uopt);
    } else {
      sg.update_model = r.timing(r.member(s, at, "update_model"), at + "/update_model");
    }
    net.signals.push_back(sg);
  }

  const json& tasks = r.array(doc, "", "tasks");
  for (std::size_t i = 0; i < tasks.size(); ++i) {
    std::string at = "/tasks/" + std::to_string(i);
    const json& t = tasks[i];
    CommTask ct;
    ct.id = r.string(t, at, "id");
    ct.activation = r.timing(r.member(t, at, "activation"), at + "/activation");
    ct.deadline = r.integer(t, at, "deadline");
    ct.station = r.string(t, at, "station");
    ct.clock_drift = r.integer_or(t, at, "clock_drift", 0);
    net.tasks.push_back(ct);
  }

  net.objectives = r.strings(doc, "", "objectives");

  if (t_max) {
    net.time = TimeDomain::up_to(*t_max, t_min);
  } else {
    net.time = TimeDomain::up_to(t_min, t_min);
    try {
      net.time = TimeDomain::up_to(analysis_horizon(net, {slack, std::nullopt}), t_min);
    } catch (const ConfigError& e) {
      r.fail("/time", e.what());
    }
  }
  if (!net.time.valid()) r.fail("/time", "t_min must not exceed t_max");
  return net;
}

std::string dump_model(const NetworkModel& net) {
  json doc;
  doc["time"] = {{"t_min", net.time.min}, {"t_max", net.time.max}, {"us_per_tick", net.us_per_tick}};
  doc["buses"] = json::array();
  for (const auto& b : net.buses)
    doc["buses"].push_back({{"id", b.id}, {"t_arb", b.t_arb}, {"t_bit", {{"num", b.t_bit.num}, {"den", b.t_bit.den}}}});
  doc["frames"] = json::array();
  for (const auto& f : net.frames)
    doc["frames"].push_back({{"id", f.id},
                             {"bus", f.bus},
                             {"priority", f.priority},
                             {"tx_task", f.tx_task},
                             {"rx_task", f.rx_task},
                             {"pdus", f.pdus},
                             {"header_bits", f.header_bits}});
  doc["pdus"] = json::array();
  for (const auto& p : net.pdus) {
    json j{{"id", p.id}, {"kind", p.is_container ? "container" : "plain"}};
    if (p.is_container) {
      j["containees"] = p.containees;
      j["layout"] = p.layout == Layout::Static ? "static" : "dynamic";
      j["trigger_on_first"] = p.trigger_on_first;
    }
    if (p.timeout_period) j["timeout_period"] = *p.timeout_period;
    if (p.threshold_bits) j["threshold_bits"] = *p.threshold_bits;
    j["length_bits"] = p.length_bits;
    j["header_bits"] = p.header_bits;
    if (!p.frame.empty()) j["frame"] = p.frame;
    if (!p.container.empty()) {
      j["container"] = p.container;
      j["collection"] = p.collection == Collection::Queued ? "queued" : "last-is-best";
    }
    doc["pdus"].push_back(j);
  }
  doc["signals"] = json::array();
  for (const auto& s : net.signals)
    doc["signals"].push_back({{"id", s.id},
                              {"pdu", s.pdu},
                              {"length_bits", s.length_bits},
                              {"triggers_pdu", s.triggers_pdu},
                              {"update_model", timing_json(s.update_model)}});
  doc["tasks"] = json::array();
  for (const auto& t : net.tasks)
    doc["tasks"].push_back({{"id", t.id},
                            {"station", t.station},
                            {"activation", timing_json(t.activation)},
                            {"deadline", t.deadline},
                            {"clock_drift", t.clock_drift}});
  doc["objectives"] = net.objectives;
  return doc.dump(2) + "\n";
}

NetworkModel load_model(const std::string& path, LoadOptions opt) {
  return parse_model(read_file(path), path, opt);
}

Scenario parse_scenario(const std::string& text, const std::string& source) {
  json doc = parse_json(text, source);
  Reader r(source);
  if (!doc.is_object()) r.fail("", "expected an object");
  Scenario s;
  auto section = [&](const char* key, auto& out) {
    auto it = doc.find(key);
    if (it == doc.end()) return;
    std::string at = std::string("/") + key;
    if (!it->is_object()) r.fail(at, "expected an object");
    for (const auto& [id, arr] : it->items()) {
      if (!arr.is_array()) r.fail(at + "/" + id, "expected an array");
      auto& v = out[id];
      for (std::size_t i = 0; i < arr.size(); ++i)
        v.push_back(static_cast<typename std::decay_t<decltype(v)>::value_type>(
            r.integer(arr[i], at + "/" + id + "/" + std::to_string(i))));
    }
  };
  section("signals", s.signals);
  section("tasks", s.tasks);
  section("round_up", s.round_up);
  return s;
}

Scenario load_scenario(const std::string& path) { return parse_scenario(read_file(path), path); }

std::string dump_scenario(const Scenario& s) {
  json doc;
  doc["signals"] = json::object();
  for (const auto& [id, v] : s.signals) doc["signals"][id] = v;
  doc["tasks"] = json::object();
  for (const auto& [id, v] : s.tasks) doc["tasks"][id] = v;
  doc["round_up"] = json::object();
  for (const auto& [id, v] : s.round_up) doc["round_up"][id] = v;
  return doc.dump(2) + "\n";
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError(path + ": cannot open file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw FormatError(path + ": cannot write file");
  out << text;
  if (!out) throw FormatError(path + ": write failed");
}

}  // namespace wclat
