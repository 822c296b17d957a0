// Acceptance run: one PASS/FAIL line per criterion, tolerances pinned below.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <functional>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <string>

#include "directed_cases.hpp"
#include "oracles.hpp"
#include "random_models.hpp"
#include "wclat/analysis.hpp"
#include "wclat/model_io.hpp"

using namespace wclat;

namespace {

constexpr double kTableSeconds = 1.0;
constexpr int kUnionPairs = 1000;
constexpr double kUnionSeconds = 30.0;
constexpr int kTinyInstances = 50;
constexpr double kTinySeconds = 60.0;
constexpr double kScaleSeconds = 600.0;
constexpr double kScaleSignalLimit = 45.0;
constexpr int kScaleJobs = 2;
constexpr int kRepeats = 3;

using Clock = std::chrono::steady_clock;

double since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Verdict {
  bool pass = false;
  std::string detail;
};

// Solutions from criterion 3, replayed again under criterion 4.
struct TinyRun {
  NetworkModel net;
  Encoding enc;
  SolveResult res;
};
std::vector<TinyRun> g_tiny;

Verdict sporadic_table() {
  auto t0 = Clock::now();
  auto m = TimingModel::sporadic(5000, 12500, 2);
  const OccurrenceWindow expect[] = {{0, 12500}, {0, 12500}, {5000, 25000}, {5000, 25000}, {10000, 37500}, {10000, 37500}};
  bool ok = true;
  for (int i = 0; i < 6; ++i) ok = ok && m.eval(i + 1) == expect[i];
  ok = ok && unite(TimingModel::periodic(0, 5000), TimingModel::periodic(2500, 10000)) == m;
  double s = since(t0);
  return {ok && s < kTableSeconds, "6 windows and union exact in " + std::to_string(s) + " s"};
}

Verdict union_covers() {
  auto t0 = Clock::now();
  std::mt19937_64 rng(2024);
  std::uniform_int_distribution<Tick> per(1, 100), off(0, 100);
  int checked = 0, failed = 0;
  while (checked < kUnionPairs) {
    Periodic a{off(rng), per(rng), 1}, b{off(rng), per(rng), 1};
    bool exempt = a.offset == b.offset && a.period != b.period &&
                  std::max(a.period, b.period) % std::min(a.period, b.period) == 0;
    for (bool strict : {false, true}) {
      if (exempt && !strict) continue;
      auto merged = testing::merged_periodic_events({a, b}, 10 * std::lcm(a.period, b.period));
      if (!covers(unite(a, b, {strict}), merged)) ++failed;
      ++checked;
    }
  }
  double s = since(t0);
  return {failed == 0 && s < kUnionSeconds,
          std::to_string(checked) + " unions, " + std::to_string(failed) + " uncovered, " + std::to_string(s) + " s"};
}

Verdict tiny_exact() {
  std::mt19937_64 rng(7);
  int agree = 0;
  double worst = 0;
  for (int i = 0; i < kTinyInstances; ++i) {
    NetworkModel net = testing::random_tiny(rng);
    auto t0 = Clock::now();
    Encoding enc = build_problem(net, "S1");
    SolveResult r = maximize(enc.problem);
    worst = std::max(worst, since(t0));
    EnumerationResult e = worst_case_enumerate(net, "S1");
    if (r.status == SolveStatus::Optimal && e.exact && *r.objective == e.latency.value_or(-1)) ++agree;
    g_tiny.push_back({std::move(net), std::move(enc), std::move(r)});
  }
  return {agree == kTinyInstances && worst < kTinySeconds,
          std::to_string(agree) + "/" + std::to_string(kTinyInstances) + " equal to enumeration, slowest solve " +
              std::to_string(worst) + " s"};
}

Verdict witness_replay(const std::vector<testing::CaseOutcome>& outcomes) {
  int ok = 0, total = 0;
  for (const auto& t : g_tiny) {
    ++total;
    if (!t.res.witness) continue;
    Trace tr = simulate(t.net, extract_scenario(t.enc, *t.res.witness));
    if (worst_latency(tr, "S1").value_or(-1) == *t.res.objective) ++ok;
  }
  for (const auto& o : outcomes) {
    ++total;
    ok += o.replayed;
  }
  return {ok == total, std::to_string(ok) + "/" + std::to_string(total) + " witnesses reproduce their latency"};
}

Verdict directed(const std::vector<testing::DirectedCase>& suite, const std::vector<testing::CaseOutcome>& outcomes) {
  std::set<std::string> schemas;
  std::string failing;
  int probes = 0, negatives = 0;
  for (std::size_t i = 0; i < suite.size(); ++i) {
    const auto& o = outcomes[i];
    schemas.insert(suite[i].schema);
    probes += static_cast<int>(o.probes.size());
    negatives += static_cast<int>(o.probes.size()) + (suite[i].rejected ? 1 : 0);
    if (!o.ok()) failing += " " + suite[i].schema;
  }
  return {failing.empty(), std::to_string(suite.size()) + " cases over " + std::to_string(schemas.size()) +
                               " schemas, " + std::to_string(probes) + " positive and " + std::to_string(negatives) +
                               " negative checks" + (failing.empty() ? "" : ", failing:" + failing)};
}

Verdict arbitration() {
  NetworkModel net = testing::micro_model();
  net.buses[0].t_bit = {2, 3};
  Pdu p2;
  p2.id = "P2";
  p2.length_bits = 50;
  p2.frame = "F2";
  net.pdus.push_back(p2);
  net.frames.push_back({"F2", "can0", 0, "tx", "rx", {"P2"}, 0});
  net.signals.push_back({"aux", TimingModel::periodic(3000, 10000), "P2", 8, true});

  bool ok = true;
  bool fractional = false;
  for (int round : {0, 1}) {
    Scenario sc = testing::earliest_scenario(net, round);
    Trace tr = simulate(net, sc);
    Encoding enc = build_problem(net, "request1");
    testing::fix_inputs(enc, net, sc);
    SolveResult r = maximize(enc.problem);
    if (!r.witness) return {false, "fixed-input encoding infeasible"};
    auto val = [&](const std::string& n) { return (*r.witness)[testing::lookup(enc, n)]; };
    const auto& hi = tr.frames.at("F2")[0];
    const auto& lo = tr.frames.at("F1")[0];
    ok = ok && hi.copy == lo.copy && hi.sigma < lo.sigma && hi.eps <= lo.sigma;
    for (const auto& [f, inst] : {std::pair{"F2", hi}, std::pair{"F1", lo}}) {
      const Frame& fr = *net.find_frame(f);
      std::int64_t bits = max_frame_length(net, fr) * net.buses[0].t_bit.num;
      Tick floor = net.buses[0].t_arb + bits / net.buses[0].t_bit.den;
      Tick ceil = floor + (bits % net.buses[0].t_bit.den != 0 ? 1 : 0);
      fractional = fractional || floor < ceil;
      ok = ok && inst.duration >= floor && inst.duration <= ceil && inst.duration == (round ? ceil : floor);
      ok = ok && val(std::string("sigma_F_") + f + "_1") == inst.sigma && val(std::string("eps_F_") + f + "_1") == inst.eps;
    }
  }
  return {ok && fractional, "priority order, no overlap, floor/ceil durations in simulator and encoding"};
}

Verdict scale(std::string& table) {
  NetworkModel net = load_model(std::string(WCLAT_SOURCE_DIR) + "/examples_models/case_study.json");
  std::set<std::string> stations;
  for (const auto& t : net.tasks) stations.insert(t.station);
  int dynamic = 0, sporadic = 0;
  for (const auto& p : net.pdus) dynamic += p.is_container && p.layout == Layout::Dynamic;
  for (const auto& s : net.signals) sporadic += !s.update_model.is_periodic();
  bool shape = stations.size() == 3 && net.buses.size() == 2 && net.frames.size() >= 13 && net.frames.size() <= 17 &&
               net.pdus.size() >= 25 && net.pdus.size() <= 35 && dynamic >= 4 && sporadic > 0 &&
               net.objectives.size() == 8;

  AnalysisOptions opt;
  opt.limits.time = std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::duration<double>(kScaleSignalLimit));
  opt.jobs = kScaleJobs;
  auto t0 = Clock::now();
  AnalysisReport rep = analyze(net, net.objectives, opt);
  double s = since(t0);
  int optimal = 0, incumbent = 0;
  bool rows_ok = rep.rows.size() == 8;
  for (const auto& r : rep.rows) {
    optimal += r.status == "optimal";
    incumbent += r.status == "incumbent";
    rows_ok = rows_ok && (r.status == "optimal" || r.status == "incumbent") && r.replayed;
  }
  table = render_table(rep);
  bool rendered = table.find("Sender") != std::string::npos && table.find("Latency [us]") != std::string::npos &&
                  std::count(table.begin(), table.end(), '\n') >= 10;
  std::ostringstream d;
  d << optimal << " optimal, " << incumbent << " verified incumbent, " << s << " s total"
    << (shape ? "" : ", model shape off");
  return {shape && rows_ok && rendered && s < kScaleSeconds, d.str()};
}

Verdict determinism() {
  std::vector<NetworkModel> nets{testing::micro_model()};
  {
    NetworkModel two = testing::micro_model();
    Pdu p2;
    p2.id = "P2";
    p2.length_bits = 16;
    p2.frame = "F2";
    two.pdus.push_back(p2);
    two.frames.push_back({"F2", "can0", 2, "tx", "rx", {"P2"}, 0});
    two.signals.push_back({"aux", TimingModel::periodic(3000, 10000), "P2", 8, true});
    two.objectives = {"request1", "aux"};
    nets.push_back(two);
  }
  std::mt19937_64 rng(99);
  for (int i = 0; i < 4; ++i) {
    NetworkModel t = testing::random_tiny(rng);
    t.objectives = {"S1"};
    if (t.signals.size() > 1) t.objectives.push_back(t.signals[1].id);
    nets.push_back(t);
  }
  bool ok = true;
  int runs = 0;
  for (const auto& net : nets) {
    std::vector<std::optional<Tick>> first;
    for (int rep = 0; rep < kRepeats; ++rep)
      for (int jobs : {1, 3}) {
        AnalysisOptions opt;
        opt.jobs = jobs;
        AnalysisReport r = analyze(net, net.objectives, opt);
        std::vector<std::optional<Tick>> lat;
        for (const auto& row : r.rows) {
          ok = ok && row.status == "optimal";
          lat.push_back(row.latency);
        }
        if (first.empty()) first = lat;
        ok = ok && lat == first;
        ++runs;
      }
    for (const auto& sig : net.objectives) ok = ok && export_neutral(analysis_problem(net, sig).problem) ==
                                                          export_neutral(analysis_problem(net, sig).problem);
  }
  NetworkModel cs = load_model(std::string(WCLAT_SOURCE_DIR) + "/examples_models/case_study.json");
  for (const auto& sig : cs.objectives)
    ok = ok && export_neutral(analysis_problem(cs, sig).problem) == export_neutral(analysis_problem(cs, sig).problem);
  return {ok, std::to_string(runs) + " analyze runs with 1 and 3 jobs agree; exports byte-identical"};
}

}  // namespace

int main() {
  int failed = 0;
  auto report = [&](int n, const std::string& name, const std::function<Verdict()>& check) {
    Verdict v;
    try {
      v = check();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    failed += !v.pass;
    std::printf("%s criterion %d (%s): %s\n", v.pass ? "PASS" : "FAIL", n, name.c_str(), v.detail.c_str());
    std::fflush(stdout);
  };
  auto suite = testing::directed_suite();
  // Each directed case is solved once with its inputs fixed; criteria 4 and 5
  // both read the outcome.
  std::vector<testing::CaseOutcome> outcomes;
  for (const auto& dc : suite) outcomes.push_back(testing::run_case(dc));
  std::string table;
  report(1, "sporadic table and union", sporadic_table);
  report(2, "union covers merged periodic events", union_covers);
  report(3, "solver equals exhaustive enumeration", tiny_exact);
  report(4, "witness replay", [&] { return witness_replay(outcomes); });
  report(5, "directed constraint semantics", [&] { return directed(suite, outcomes); });
  report(6, "arbitration micro-check", arbitration);
  report(7, "scale smoke test", [&] { return scale(table); });
  report(8, "determinism", determinism);
  std::printf("\n%s", table.c_str());
  return failed == 0 ? 0 : 1;
}
