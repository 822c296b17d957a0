#include <random>

#include "directed_cases.hpp"
#include "doctest.h"
#include "oracles.hpp"
#include "random_models.hpp"
#include "wclat/encoder.hpp"

using namespace wclat;
using testing::micro_model;

namespace {

Value value(const Encoding& enc, const Assignment& a, const std::string& name) {
  return a[testing::lookup(enc, name)];
}

}  // namespace

TEST_CASE("directed schema cases") {
  for (const auto& dc : testing::directed_suite()) {
    INFO("schema ", dc.schema);
    testing::CaseOutcome o = testing::run_case(dc);
    CHECK(o.latency_matches);
    CHECK(o.replayed);
    CHECK(o.rejected_ok);
    for (const auto& p : o.probes) {
      INFO(p.var, " expected ", p.expected);
      CHECK(p.positive);
      CHECK(p.negative);
    }
  }
}

TEST_CASE("schema counts follow the occurrence bounds") {
  NetworkModel net = micro_model();
  net.signals[0].update_model = TimingModel::sporadic(5000, 12000);
  OccurrenceBounds b = occurrence_bounds(net);
  auto js = static_cast<std::size_t>(b.signals.at("request1").count());
  auto kp = static_cast<std::size_t>(b.pdus.at("P1").count());
  auto tasks = static_cast<std::size_t>(b.tasks.at("tx").count() + b.tasks.at("rx").count());

  auto full = schema_counts(build_problem(net, "request1").problem);
  CHECK(full.at("signal-window") == js);
  CHECK(full.at("signal-mapping") == js * kp);
  CHECK(full.at("signal-mapping-overflow") == js);
  CHECK(full.at("task-window") == tasks);
  CHECK(full.at("objective") == 1);
  CHECK(full.count("signal-mapping-bounds") == 1);

  auto lean = schema_counts(build_problem(net, "request1", {false}).problem);
  CHECK(lean.at("signal-mapping") == js * kp);
  CHECK(lean.count("signal-mapping-bounds") == 0);
  CHECK(lean.count("pdu-trigger-causal") == 0);
}

TEST_CASE("sporadic window constraints admit exactly the occurrence window") {
  NetworkModel net = micro_model();
  net.signals[0].update_model = TimingModel::sporadic(5000, 12500, 2);
  Encoding enc = build_problem(net, "request1");
  auto roots = propagate(enc.problem);
  REQUIRE(roots);
  VarId phi3 = testing::lookup(enc, "phi_S_request1_3");
  CHECK((*roots)[static_cast<std::size_t>(phi3)] == std::pair<Value, Value>{5000, 21000});

  NetworkModel periodic = micro_model(0);
  Encoding penc = build_problem(periodic, "request1");
  auto proots = propagate(penc.problem);
  REQUIRE(proots);
  CHECK((*proots)[static_cast<std::size_t>(testing::lookup(penc, "phi_S_request1_1"))] ==
        std::pair<Value, Value>{0, 0});
}

TEST_CASE("micro model with inputs fixed follows the reference chain") {
  NetworkModel net = micro_model();
  Encoding enc = build_problem(net, "request1");
  testing::fix_inputs(enc, net, testing::earliest_scenario(net));
  auto roots = propagate(enc.problem);
  REQUIRE(roots);
  auto root = [&](const std::string& name) { return (*roots)[static_cast<std::size_t>(testing::lookup(enc, name))]; };
  CHECK(root("alpha_P_P1_1") == std::pair<Value, Value>{3000, 3000});
  CHECK(root("copy_F_F1_1") == std::pair<Value, Value>{5000, 5000});

  SolveResult r = maximize(enc.problem);
  REQUIRE(r.status == SolveStatus::Optimal);
  CHECK(value(enc, *r.witness, "sigma_F_F1_1") == 5000);
  CHECK(value(enc, *r.witness, "eps_F_F1_1") == 5210);
  CHECK(value(enc, *r.witness, "rxact_F_F1_1") == 10000);
  CHECK(value(enc, *r.witness, "epsT_F_F1_1") == 10500);
  CHECK(*r.objective == 7500);
}

TEST_CASE("micro model optimum and witness") {
  NetworkModel net = micro_model();
  Encoding enc = build_problem(net, "request1");
  SolveResult r = maximize(enc.problem);
  REQUIRE(r.status == SolveStatus::Optimal);
  CHECK(*r.objective == 7500);
  CHECK(verify_assignment(enc.problem, *r.witness));
  CHECK(value(enc, *r.witness, "phi_S_request1_1") == 3000);
  Scenario sc = extract_scenario(enc, *r.witness);
  CHECK(worst_latency(simulate(net, sc), "request1") == 7500);
}

TEST_CASE("offset zero micro variant matches the single-chain oracle") {
  NetworkModel net = micro_model(0);
  SolveResult r = maximize(build_problem(net, "request1").problem);
  testing::ChainParams cp;
  cp.tx = cp.rx = testing::periodic_grid(0, 5000, 21000);
  cp.t_arb = 10;
  cp.bits = 100;
  cp.num = 2;
  cp.deadline = 500;
  cp.t_max = 21000;
  Value expect = -1;
  for (Tick change : testing::periodic_grid(0, 10000, 21000))
    expect = std::max(expect, testing::single_chain_latency(cp, change).value_or(-1));
  CHECK(expect == 5500);
  CHECK(*r.objective == expect);
}

TEST_CASE("property: single-chain models agree with the chain oracle") {
  std::mt19937_64 rng(41);
  int checked = 0;
  auto pick = [&](Tick lo, Tick hi) { return std::uniform_int_distribution<Tick>(lo, hi)(rng); };
  for (int trial = 0; trial < 25; ++trial) {
    NetworkModel net = micro_model();
    Tick h = pick(60, 120);
    net.time = TimeDomain::up_to(h);
    net.buses[0] = {"can0", pick(0, 3), {pick(1, 2), pick(1, 3)}};
    net.pdus[0].length_bits = pick(1, 4);
    net.signals[0].length_bits = 1;
    Tick sp = pick(15, 40), tp = pick(5, 20), rp = pick(5, 20);
    net.signals[0].update_model = TimingModel::periodic(pick(0, sp - 1), sp);
    net.tasks[0].activation = TimingModel::periodic(pick(0, tp - 1), tp);
    net.tasks[1].activation = TimingModel::periodic(pick(0, rp - 1), rp);
    net.tasks[0].deadline = pick(1, 4);
    net.tasks[1].deadline = pick(1, 4);
    net.tasks[1].clock_drift = pick(0, 3);

    testing::ChainParams cp;
    const auto& tx = net.tasks[0].activation.as_periodic();
    const auto& rx = net.tasks[1].activation.as_periodic();
    cp.tx = testing::periodic_grid(tx.offset, tx.period, h);
    cp.rx = testing::periodic_grid(rx.offset, rx.period, h);
    cp.t_arb = net.buses[0].t_arb;
    cp.bits = net.pdus[0].length_bits;
    cp.num = net.buses[0].t_bit.num;
    cp.den = net.buses[0].t_bit.den;
    cp.drift = net.tasks[1].clock_drift;
    cp.deadline = net.tasks[1].deadline;
    cp.t_max = h;
    const auto& sg = net.signals[0].update_model.as_periodic();
    std::vector<Tick> changes = testing::periodic_grid(sg.offset, sg.period, h);

    // Only changes that get their own copy, with the previous transmission
    // over by then, form independent chains.
    Value expect = -1;
    for (Tick c : changes)
      for (bool up : {false, true}) {
        cp.round_up = up;
        expect = std::max(expect, testing::single_chain_latency(cp, c).value_or(-1));
      }
    Tick longest = cp.t_arb + (cp.bits * cp.num + cp.den - 1) / cp.den;
    bool separated = true;
    for (std::size_t i = 1; i < changes.size(); ++i) {
      auto a = testing::next_at_or_after(cp.tx, changes[i - 1]), b = testing::next_at_or_after(cp.tx, changes[i]);
      if (a && b && *b <= *a + longest) separated = false;
    }
    if (!separated || !validate(net).empty()) continue;
    INFO("trial ", trial);
    SolveResult r = maximize(build_problem(net, "request1").problem);
    REQUIRE(r.status == SolveStatus::Optimal);
    CHECK(*r.objective == expect);
    ++checked;
  }
  CHECK(checked >= 10);
}

TEST_CASE("export is deterministic and mentions every variable") {
  NetworkModel net = testing::container_model(
      {{"A", 4, Collection::Queued, TimingModel::periodic(0, 20)}, {"B", 6}}, 16, 2, 40);
  net.pdus[0].timeout_period = 5;
  std::string a = export_neutral(build_problem(net, "S_A").problem);
  std::string b = export_neutral(build_problem(net, "S_A").problem);
  CHECK(a == b);
  Encoding enc = build_problem(net, "S_A");
  for (const auto& v : enc.problem.vars()) CHECK(a.find(" " + v.name + ";") != std::string::npos);
}

TEST_CASE("unknown objective or invalid model is a configuration error") {
  CHECK_THROWS_AS(build_problem(micro_model(), "nope"), ConfigError);
  NetworkModel bad = micro_model();
  bad.signals[0].pdu = "missing";
  CHECK_THROWS_AS(build_problem(bad, "request1"), ConfigError);
}

TEST_CASE("property: fixed random scenarios reproduce the simulated latency") {
  std::mt19937_64 rng(42);
  testing::TinyShape shape;
  shape.max_containees = 2;
  for (int trial = 0; trial < 60; ++trial) {
    NetworkModel net = testing::random_tiny(rng, shape);
    Scenario sc = testing::random_scenario(net, rng);
    Trace tr = simulate(net, sc);
    Encoding enc = build_problem(net, "S1");
    testing::fix_inputs(enc, net, sc);
    SolveResult r = maximize(enc.problem);
    INFO("trial ", trial);
    REQUIRE(r.status == SolveStatus::Optimal);
    CHECK(*r.objective == worst_latency(tr, "S1").value_or(-1));
  }
}
