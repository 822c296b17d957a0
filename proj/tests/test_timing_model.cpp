#include <algorithm>
#include <numeric>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "wclat/timing_model.hpp"

using namespace wclat;

TEST_CASE("sporadic windows follow the worked five/ten millisecond example") {
  auto m = TimingModel::sporadic(5000, 12500, 2);
  CHECK(m.eval(1) == OccurrenceWindow{0, 12500});
  CHECK(m.eval(2) == OccurrenceWindow{0, 12500});
  CHECK(m.eval(3) == OccurrenceWindow{5000, 25000});
  CHECK(m.eval(4) == OccurrenceWindow{5000, 25000});
  CHECK(m.eval(5) == OccurrenceWindow{10000, 37500});
  CHECK(m.eval(6) == OccurrenceWindow{10000, 37500});
}

TEST_CASE("periodic windows are points") {
  CHECK(TimingModel::periodic(0, 10000).eval(1) == OccurrenceWindow{0, 0});
  CHECK(TimingModel::periodic(2500, 10000).eval(3) == OccurrenceWindow{22500, 22500});
  auto m = TimingModel::periodic(7, 5, 3);
  for (std::int64_t i = 1; i <= 3; ++i) CHECK(m.eval(i) == OccurrenceWindow{7, 7});
  CHECK(m.eval(4) == OccurrenceWindow{12, 12});
}

TEST_CASE("occurrence index must be positive") {
  CHECK_THROWS_AS(TimingModel::periodic(0, 5).eval(0), DomainError);
  CHECK_THROWS_AS(TimingModel::sporadic(1, 5).eval(-3), DomainError);
}

TEST_CASE("invalid model parameters are rejected") {
  CHECK_THROWS_AS(TimingModel::periodic(0, 0), DomainError);
  CHECK_THROWS_AS(TimingModel::periodic(-1, 5), DomainError);
  CHECK_THROWS_AS(TimingModel::periodic(0, 5, 0), DomainError);
  CHECK_THROWS_AS(TimingModel::sporadic(5, 5), DomainError);
  CHECK_THROWS_AS(TimingModel::sporadic(-1, 5), DomainError);
  CHECK_NOTHROW(TimingModel::sporadic(0, 5));
}

TEST_CASE("union cases") {
  SUBCASE("periodic pair with different offsets becomes sporadic") {
    CHECK(unite(TimingModel::periodic(0, 5000), TimingModel::periodic(2500, 10000)) ==
          TimingModel::sporadic(5000, 12500, 2));
  }
  SUBCASE("equal offsets and divisible periods stay periodic") {
    CHECK(unite(TimingModel::periodic(0, 5000), TimingModel::periodic(0, 10000)) ==
          TimingModel::periodic(0, 5000, 2));
  }
  SUBCASE("strict safety turns that case sporadic") {
    CHECK(unite(TimingModel::periodic(0, 5000), TimingModel::periodic(0, 10000), {true}) ==
          TimingModel::sporadic(5000, 10000, 2));
  }
  SUBCASE("sporadic with sporadic") {
    CHECK(unite(TimingModel::sporadic(2000, 7000, 1), TimingModel::sporadic(3000, 9000, 2)) ==
          TimingModel::sporadic(1000, 9000, 3));
  }
  SUBCASE("sporadic with periodic") {
    CHECK(unite(TimingModel::sporadic(2000, 7000, 1), TimingModel::periodic(1000, 4000, 1)) ==
          TimingModel::sporadic(2000, 7000, 2));
  }
}

TEST_CASE("covers") {
  CHECK(covers(TimingModel::sporadic(5000, 12500, 2), std::vector<Tick>{0, 2500, 5000, 10000, 12500, 15000}));
  CHECK(covers(TimingModel::periodic(0, 5), std::vector<Tick>{0, 5, 10}));
  CHECK_FALSE(covers(TimingModel::periodic(0, 5), std::vector<Tick>{1, 5, 10}));
  CHECK(covers(TimingModel::periodic(0, 5), std::vector<Tick>{}));
}

TEST_CASE("property: windows are ordered and non-decreasing") {
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<Tick> d(0, 60);
  for (int trial = 0; trial < 300; ++trial) {
    Tick a = d(rng), b = d(rng) + 1;
    std::int64_t n = 1 + d(rng) % 4;
    TimingModel m = trial % 2 ? TimingModel::periodic(a, b, n) : TimingModel::sporadic(a, a + b, n);
    OccurrenceWindow prev = m.eval(1);
    for (std::int64_t i = 1; i <= 40; ++i) {
      OccurrenceWindow w = m.eval(i);
      CHECK(w.earliest <= w.latest);
      CHECK(w.earliest >= prev.earliest);
      CHECK(w.latest >= prev.latest);
      if (m.is_periodic()) CHECK(w.earliest == w.latest);
      prev = w;
    }
  }
}

TEST_CASE("property: union is commutative and adds multiplicities") {
  std::mt19937_64 rng(12);
  std::uniform_int_distribution<Tick> d(0, 50);
  auto draw = [&] {
    Tick a = d(rng), b = d(rng) + 1;
    std::int64_t n = 1 + d(rng) % 3;
    return d(rng) % 2 ? TimingModel::periodic(a, b, n) : TimingModel::sporadic(a, a + b, n);
  };
  for (int trial = 0; trial < 1000; ++trial) {
    TimingModel x = draw(), y = draw();
    for (bool strict : {false, true}) {
      TimingModel u = unite(x, y, {strict});
      CHECK(u == unite(y, x, {strict}));
      CHECK(u.multiplicity() == x.multiplicity() + y.multiplicity());
    }
  }
}

TEST_CASE("property: union of periodic sources covers their merged events") {
  std::mt19937_64 rng(13);
  std::uniform_int_distribution<Tick> per(1, 100), off(0, 100);
  int checked = 0;
  while (checked < 500) {
    Periodic a{off(rng), per(rng), 1}, b{off(rng), per(rng), 1};
    bool exempt = a.offset == b.offset && a.period != b.period &&
                  std::max(a.period, b.period) % std::min(a.period, b.period) == 0;
    for (bool strict : {false, true}) {
      if (exempt && !strict) continue;
      auto merged = testing::merged_periodic_events({a, b}, 10 * std::lcm(a.period, b.period));
      INFO("a=", TimingModel(a).to_string(), " b=", TimingModel(b).to_string(), " strict=", strict);
      CHECK(covers(unite(a, b, {strict}), merged));
    }
    ++checked;
  }
}

TEST_CASE("equal offsets with divisible periods are not covered without strict safety") {
  Periodic a{0, 5, 1}, b{0, 10, 1};
  auto merged = testing::merged_periodic_events({a, b}, 100);
  CHECK_FALSE(covers(unite(a, b), merged));
  CHECK(covers(unite(a, b, {true}), merged));
}
