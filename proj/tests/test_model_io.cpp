#include <random>

#include "doctest.h"
#include "fixtures.hpp"
#include "random_models.hpp"
#include "wclat/model_io.hpp"

using namespace wclat;

namespace {

std::string error_of(const std::string& text) {
  try {
    parse_model(text, "m.json");
  } catch (const FormatError& e) {
    return e.what();
  }
  return "";
}

const char* kMicro = R"({
  "time": {"t_min": 0, "t_max": 21000, "us_per_tick": 1},
  "buses": [{"id": "can0", "t_arb": 10, "t_bit": 2}],
  "frames": [{"id": "F1", "bus": "can0", "priority": 1, "tx_task": "tx", "rx_task": "rx", "pdus": ["P1"]}],
  "pdus": [{"id": "P1", "kind": "plain", "length_bits": 100, "frame": "F1"}],
  "signals": [{"id": "request1", "pdu": "P1", "length_bits": 8,
               "update_model": {"periodic": {"offset": 3000, "period": 10000}}}],
  "tasks": [
    {"id": "tx", "station": "ECU_A", "activation": {"periodic": {"offset": 0, "period": 5000}}, "deadline": 500},
    {"id": "rx", "station": "ECU_B", "activation": {"periodic": {"offset": 0, "period": 5000}}, "deadline": 500}
  ],
  "objectives": ["request1"]
})";

}  // namespace

TEST_CASE("parsing the micro model") {
  NetworkModel net = parse_model(kMicro);
  CHECK(net.time.max == 21000);
  CHECK(net.buses.at(0).t_bit.num == 2);
  CHECK(net.buses.at(0).t_bit.den == 1);
  CHECK(net.signals.at(0).update_model == TimingModel::periodic(3000, 10000));
  CHECK(net.objectives == std::vector<std::string>{"request1"});
  CHECK(dump_model(net) == dump_model(testing::micro_model()));
}

TEST_CASE("writers are folded into one update model") {
  std::string text = kMicro;
  auto at = text.find("\"update_model\"");
  auto end = text.find("}}}", at) + 2;
  text.replace(at, end - at,
               R"("writers": [{"periodic": {"offset": 0, "period": 5000}}, {"periodic": {"offset": 2500, "period": 10000}}])");
  CHECK(parse_model(text).signals[0].update_model == TimingModel::sporadic(5000, 12500, 2));
}

TEST_CASE("missing t_max takes the analysis horizon") {
  std::string text = kMicro;
  text.replace(text.find(", \"t_max\": 21000"), 16, "");
  NetworkModel net = parse_model(text);
  CHECK(net.time.max == analysis_horizon(testing::micro_model()));
  CHECK(parse_model(text, "m", {false, 500, std::nullopt}).time.max == 500);
}

TEST_CASE("syntax errors carry line and column") {
  std::string e = error_of("{\n  \"time\": {\n    \"t_min\": 0,\n  }\n}");
  CHECK(e.rfind("m.json:4:", 0) == 0);
}

TEST_CASE("content errors carry a pointer") {
  std::string text = kMicro;
  text.replace(text.find("\"priority\": 1"), 13, "\"priority\": \"high\"");
  std::string e = error_of(text);
  CHECK(e.find("m.json: at /frames/0/priority") == 0);

  std::string kind = kMicro;
  kind.replace(kind.find("\"plain\""), 7, "\"odd\"");
  CHECK(error_of(kind).find("/pdus/0/kind") != std::string::npos);

  std::string tm = kMicro;
  tm.replace(tm.find("\"period\": 10000"), 15, "\"period\": 0");
  CHECK(error_of(tm).find("/signals/0/update_model") != std::string::npos);

  CHECK(error_of("[1, 2]").find("expected an object") != std::string::npos);
}

TEST_CASE("property: dump and parse round trip") {
  std::mt19937_64 rng(61);
  testing::TinyShape shape;
  shape.max_containees = 3;
  for (int trial = 0; trial < 100; ++trial) {
    NetworkModel net = testing::random_tiny(rng, shape);
    std::string once = dump_model(net);
    CHECK(dump_model(parse_model(once)) == once);

    Scenario sc = testing::random_scenario(net, rng);
    CHECK(parse_scenario(dump_scenario(sc)) == sc);
  }
}

TEST_CASE("scenario errors") {
  CHECK_THROWS_AS(parse_scenario("{\"signals\": {\"a\": 3}}", "s"), FormatError);
  CHECK_THROWS_AS(parse_scenario("{\"signals\": ", "s"), FormatError);
  CHECK_THROWS_AS(load_model("/nonexistent/model.json"), FormatError);
}
