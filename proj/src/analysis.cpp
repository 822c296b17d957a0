#include "wclat/analysis.hpp"

#include <sys/resource.h>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <mutex>
#include <sstream>
#include <thread>

#include "json.hpp"
#include "wclat/model_io.hpp"

namespace wclat {

using json = nlohmann::ordered_json;

double peak_memory_mb() {
  rusage ru{};
  getrusage(RUSAGE_SELF, &ru);
  return static_cast<double>(ru.ru_maxrss) / 1024.0;  // ru_maxrss is in KiB on Linux
}

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

}  // namespace

Encoding analysis_problem(const NetworkModel& net, const std::string& signal, EncodeOptions opt) {
  return build_problem(bus_slice(net, signal), signal, opt);
}

AnalysisRow analyze_signal(const NetworkModel& net, const std::string& signal, const AnalysisOptions& opt) {
  AnalysisRow row;
  row.signal = signal;
  const Signal* s = net.find_signal(signal);
  if (!s) throw ConfigError("unknown signal '" + signal + "'");
  auto diags = validate(net);
  if (!diags.empty())
    throw ConfigError("model is invalid: " + diags.front().element + ": " + diags.front().rule);
  const Pdu* p = net.find_pdu(s->pdu);
  if (p && p->in_container()) p = net.find_pdu(p->container);
  if (p) {
    if (const Frame* f = net.find_frame(p->frame)) {
      if (const CommTask* t = net.find_task(f->tx_task)) row.sender = t->station;
      if (const CommTask* t = net.find_task(f->rx_task)) row.receiver = t->station;
    }
  }

  auto t0 = std::chrono::steady_clock::now();
  Encoding enc = analysis_problem(net, signal, opt.encode);
  row.encode_seconds = seconds_since(t0);
  row.encode_peak_mb = peak_memory_mb();
  row.variables = enc.problem.vars().size();
  row.constraints = enc.problem.constraints().size();

  t0 = std::chrono::steady_clock::now();
  SolveResult res = maximize(enc.problem, opt.limits);
  row.solve_seconds = seconds_since(t0);
  row.solve_peak_mb = peak_memory_mb();
  row.status = to_string(res.status);
  row.nodes = res.stats.nodes;
  if (res.objective) {
    row.latency = *res.objective;
    row.latency_us = static_cast<double>(*res.objective) * net.us_per_tick;
  }
  if (res.witness) {
    Scenario sc = complete_scenario(net, extract_scenario(enc, *res.witness));
    Trace tr = simulate(net, sc);
    auto sim = worst_latency(tr, signal);
    row.replayed = sim.value_or(-1) == *res.objective;
    if (!opt.witness_dir.empty()) {
      std::filesystem::create_directories(opt.witness_dir);
      row.witness = (std::filesystem::path(opt.witness_dir) / (signal + ".scenario.json")).string();
      write_file(row.witness, dump_scenario(sc));
    }
  }
  return row;
}

AnalysisReport analyze(const NetworkModel& net, const std::vector<std::string>& signals,
                       const AnalysisOptions& opt) {
  AnalysisReport rep;
  rep.us_per_tick = net.us_per_tick;
  rep.rows.resize(signals.size());
  std::vector<std::exception_ptr> errors(signals.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i; (i = next++) < signals.size();) {
      try {
        rep.rows[i] = analyze_signal(net, signals[i], opt);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  auto jobs = static_cast<std::size_t>(std::max(1, opt.jobs));
  jobs = std::min(jobs, std::max<std::size_t>(1, signals.size()));
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t j = 0; j < jobs; ++j) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return rep;
}

std::string render_table(const AnalysisReport& r) {
  std::vector<std::string> head{"Sender",      "Receiver",   "Signal",          "Encode [s]", "Encode [MiB]",
                                "Solve [s]",   "Solve [MiB]", "Status",         "Latency [ticks]",
                                "Latency [us]", "Witness"};
  std::vector<std::vector<std::string>> cells{head};
  for (const auto& row : r.rows) {
    std::string lat = "-", us = "-";
    if (row.latency) {
      lat = *row.latency < 0 ? "none" : std::to_string(*row.latency);
      us = *row.latency < 0 ? "none" : fixed(row.latency_us, 1);
    }
    cells.push_back({row.sender, row.receiver, row.signal, fixed(row.encode_seconds, 2),
                     fixed(row.encode_peak_mb, 1), fixed(row.solve_seconds, 2), fixed(row.solve_peak_mb, 1),
                     row.status, lat, us, row.witness.empty() ? "-" : row.witness});
  }
  std::vector<std::size_t> w(head.size(), 0);
  for (const auto& c : cells)
    for (std::size_t i = 0; i < c.size(); ++i) w[i] = std::max(w[i], c[i].size());
  std::ostringstream out;
  auto line = [&](const std::vector<std::string>& c) {
    for (std::size_t i = 0; i < c.size(); ++i) {
      // numeric columns right-aligned
      bool right = i >= 3 && i <= 9 && i != 7;
      std::string pad(w[i] - c[i].size(), ' ');
      out << (i ? "  " : "") << (right ? pad + c[i] : c[i] + (i + 1 < c.size() ? pad : ""));
    }
    out << "\n";
  };
  line(cells[0]);
  std::size_t total = 0;
  for (auto x : w) total += x;
  out << std::string(total + 2 * (w.size() - 1), '-') << "\n";
  for (std::size_t i = 1; i < cells.size(); ++i) line(cells[i]);
  return out.str();
}

std::string report_json(const AnalysisReport& r) {
  json doc;
  doc["us_per_tick"] = r.us_per_tick;
  doc["rows"] = json::array();
  for (const auto& row : r.rows) {
    json j{{"sender", row.sender},
           {"receiver", row.receiver},
           {"signal", row.signal},
           {"encode_seconds", row.encode_seconds},
           {"encode_peak_mb", row.encode_peak_mb},
           {"solve_seconds", row.solve_seconds},
           {"solve_peak_mb", row.solve_peak_mb},
           {"status", row.status},
           {"latency", row.latency ? json(*row.latency) : json(nullptr)},
           {"latency_us", row.latency ? json(row.latency_us) : json(nullptr)},
           {"witness", row.witness},
           {"variables", row.variables},
           {"constraints", row.constraints},
           {"nodes", row.nodes},
           {"replayed", row.replayed}};
    doc["rows"].push_back(j);
  }
  return doc.dump(2) + "\n";
}

AnalysisReport parse_report(const std::string& text, const std::string& source) {
  AnalysisReport r;
  try {
    json doc = json::parse(text);
    r.us_per_tick = doc.value("us_per_tick", 1.0);
    for (const auto& j : doc.at("rows")) {
      AnalysisRow row;
      row.sender = j.value("sender", "");
      row.receiver = j.value("receiver", "");
      row.signal = j.at("signal").get<std::string>();
      row.encode_seconds = j.value("encode_seconds", 0.0);
      row.encode_peak_mb = j.value("encode_peak_mb", 0.0);
      row.solve_seconds = j.value("solve_seconds", 0.0);
      row.solve_peak_mb = j.value("solve_peak_mb", 0.0);
      row.status = j.at("status").get<std::string>();
      if (!j.at("latency").is_null()) {
        row.latency = j.at("latency").get<Tick>();
        row.latency_us = j.value("latency_us", 0.0);
      }
      row.witness = j.value("witness", "");
      row.variables = j.value("variables", std::size_t{0});
      row.constraints = j.value("constraints", std::size_t{0});
      row.nodes = j.value("nodes", std::int64_t{0});
      row.replayed = j.value("replayed", false);
      r.rows.push_back(row);
    }
  } catch (const json::exception& e) {
    throw FormatError(source + ": " + e.what());
  }
  return r;
}

}  // namespace wclat
