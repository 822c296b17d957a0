#include <random>
#include <stdexcept>

#include "doctest.h"
#include "wclat/solver.hpp"

using namespace wclat;

namespace {

// Exhaustive maximum over the box; none when nothing satisfies.
std::optional<Value> brute_force(const ConstraintProblem& p) {
  const auto& vs = p.vars();
  std::vector<Value> cur;
  for (const auto& v : vs) cur.push_back(v.lo);
  std::optional<Value> best;
  while (true) {
    Assignment a(cur);
    bool ok = true;
    for (const auto& c : p.constraints())
      if (!holds(c, a)) {
        ok = false;
        break;
      }
    if (ok && (!best || a[p.objective()] > *best)) best = a[p.objective()];
    std::size_t i = 0;
    while (i < cur.size() && cur[i] == vs[i].hi) {
      cur[i] = vs[i].lo;
      ++i;
    }
    if (i == cur.size()) break;
    ++cur[i];
  }
  return best;
}

Atom random_atom(std::mt19937_64& rng, int nvars) {
  std::uniform_int_distribution<int> v(0, nvars - 1), r(0, 3), c(-3, 5);
  Rel rel = static_cast<Rel>(r(rng));
  if (rng() % 2) return {v(rng), kNoVar, rel, c(rng)};
  return {v(rng), v(rng), rel, c(rng) - 1};
}

Term random_term(std::mt19937_64& rng, int nvars) {
  std::uniform_int_distribution<int> v(0, nvars - 1), c(-2, 4);
  if (rng() % 4 == 0) return cst(c(rng));
  return var(v(rng), c(rng) / 2);
}

ConstraintProblem random_problem(std::mt19937_64& rng) {
  ConstraintProblem p;
  std::uniform_int_distribution<int> nv(2, 4), lo(-2, 1), width(1, 5), nc(1, 5), kind(0, 4);
  int n = nv(rng);
  for (int i = 0; i < n; ++i) {
    Value l = lo(rng);
    p.add_var("x" + std::to_string(i), l, l + width(rng));
  }
  int m = nc(rng);
  for (int k = 0; k < m; ++k) {
    switch (kind(rng)) {
      case 0: {
        Linear l;
        for (int i = 0; i < 1 + static_cast<int>(rng() % 3); ++i)
          l.terms.push_back({static_cast<Value>(rng() % 5) - 2, static_cast<VarId>(rng() % n)});
        l.rel = static_cast<Rel>(rng() % 3);
        l.rhs = static_cast<Value>(rng() % 7) - 2;
        p.add("lin", l);
        break;
      }
      case 1: {
        Clause c;
        for (int i = 0; i < static_cast<int>(rng() % 3); ++i) c.premises.push_back(random_atom(rng, n));
        for (int i = 0; i < 1 + static_cast<int>(rng() % 2); ++i) c.conclusions.push_back(random_atom(rng, n));
        p.add("clause", c);
        break;
      }
      case 2: {
        VarId b = p.add_var("b" + std::to_string(k), 0, 1);
        Reify r{b, {}};
        for (int i = 0; i < 1 + static_cast<int>(rng() % 2); ++i) r.atoms.push_back(random_atom(rng, n));
        p.add("reify", r);
        break;
      }
      case 3: {
        Extremum e{static_cast<VarId>(rng() % n), rng() % 2 == 0, random_term(rng, n), {}};
        for (int i = 0; i < 1 + static_cast<int>(rng() % 3); ++i) {
          Guarded g{{}, random_term(rng, n)};
          if (rng() % 2) g.guard.push_back(random_atom(rng, n));
          e.terms.push_back(g);
        }
        p.add("extremum", e);
        break;
      }
      default: {
        Element e{static_cast<VarId>(rng() % n), static_cast<VarId>(rng() % n), 0, {}, random_term(rng, n)};
        for (int i = 0; i < 1 + static_cast<int>(rng() % 4); ++i) e.array.push_back(random_term(rng, n));
        p.add("element", e);
        break;
      }
    }
  }
  p.set_objective(static_cast<VarId>(rng() % n));
  if (rng() % 2) p.set_schedule_vars({static_cast<VarId>(rng() % n)});
  return p;
}

}  // namespace

TEST_CASE("contradictory window is infeasible") {
  ConstraintProblem p;
  VarId phi = p.add_var("phi", 0, 100);
  p.add("signal-window", Clause{{}, {ge(phi, 10)}});
  p.add("signal-window", Clause{{}, {le(phi, 5)}});
  p.set_objective(phi);
  SolveResult r = maximize(p);
  CHECK(r.status == SolveStatus::Infeasible);
  CHECK_FALSE(r.objective);
  CHECK_FALSE(propagate(p));
}

TEST_CASE("simple maximization with a witness that verifies") {
  ConstraintProblem p;
  VarId x = p.add_var("x", 0, 10), y = p.add_var("y", 0, 10), z = p.add_var("z", -5, 30);
  p.add("sum", Linear{{{1, x}, {1, y}}, Rel::Le, 12});
  p.add("diff", Linear{{{1, z}, {-2, x}, {1, y}}, Rel::Eq, 0});
  p.set_objective(z);
  SolveResult r = maximize(p);
  REQUIRE(r.status == SolveStatus::Optimal);
  CHECK(*r.objective == 20);
  REQUIRE(r.witness);
  CHECK(verify_assignment(p, *r.witness));

  Assignment bad = *r.witness;
  bad[x] += 1;  // breaks the equation
  CHECK_FALSE(verify_assignment(p, bad));
  Assignment out = *r.witness;
  out[x] = 11;  // outside the domain
  CHECK_FALSE(verify_assignment(p, out));
  CHECK_THROWS_AS(verify_assignment(p, Assignment({1, 2})), std::invalid_argument);
}

TEST_CASE("extremum with guards and element indexing") {
  ConstraintProblem p;
  VarId i = p.add_var("i", 0, 5), y = p.add_var("y", 0, 100), m = p.add_var("m", 0, 100);
  p.add("element", Element{y, i, 1, {cst(10), cst(40), cst(25)}, cst(0)});
  p.add("max", Extremum{m, false, cst(0), {{{le(i, 2)}, var(y, 5)}, {{ge(i, 3)}, var(y)}}});
  p.set_objective(m);
  SolveResult r = maximize(p);
  CHECK(*r.objective == 45);
  CHECK((*r.witness)[i] == 2);
}

TEST_CASE("time limit stops an exponential refutation") {
  // pigeonhole: 13 pairwise different values in 0..11
  ConstraintProblem p;
  std::vector<VarId> xs;
  for (int k = 0; k < 13; ++k) xs.push_back(p.add_var("x" + std::to_string(k), 0, 11));
  for (int a = 0; a < 13; ++a)
    for (int b = a + 1; b < 13; ++b) p.add("ne", Clause{{}, {diff(xs[a], Rel::Ne, xs[b])}});
  p.set_objective(xs[0]);
  SolveResult r = maximize(p, {std::chrono::milliseconds(50), std::nullopt});
  CHECK(r.status == SolveStatus::Timeout);
  CHECK(r.infeasible_so_far);
  CHECK_FALSE(r.witness);
  CHECK(r.stats.wall_seconds < 5);
}

TEST_CASE("property: maximize agrees with exhaustive search on random problems") {
  std::mt19937_64 rng(31);
  int feasible = 0;
  for (int trial = 0; trial < 1500; ++trial) {
    ConstraintProblem p = random_problem(rng);
    std::optional<Value> expect = brute_force(p);
    SolveResult r = maximize(p);
    INFO("trial ", trial, "\n", export_neutral(p));
    if (!expect) {
      CHECK(r.status == SolveStatus::Infeasible);
      continue;
    }
    ++feasible;
    REQUIRE(r.status == SolveStatus::Optimal);
    CHECK(*r.objective == *expect);
    CHECK(verify_assignment(p, *r.witness));
  }
  CHECK(feasible > 300);
}

TEST_CASE("property: repeated solves return the same value") {
  std::mt19937_64 rng(32);
  for (int trial = 0; trial < 100; ++trial) {
    ConstraintProblem p = random_problem(rng);
    SolveResult a = maximize(p), b = maximize(p);
    CHECK(a.status == b.status);
    CHECK(a.objective == b.objective);
  }
}
