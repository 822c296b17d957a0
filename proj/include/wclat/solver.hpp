#pragma once

#include <chrono>
#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "wclat/constraint_problem.hpp"

namespace wclat {

enum class SolveStatus { Optimal, Incumbent, Infeasible, Timeout };

const char* to_string(SolveStatus s);

struct SolveLimits {
  std::optional<std::chrono::milliseconds> time;
  std::optional<std::int64_t> memory_mb;
};

struct SolveStats {
  std::int64_t nodes = 0;
  std::int64_t failures = 0;
  std::int64_t propagations = 0;
  std::int64_t solutions = 0;
  double wall_seconds = 0;
};

struct SolveResult {
  SolveStatus status = SolveStatus::Infeasible;
  std::optional<Value> objective;
  std::optional<Assignment> witness;
  SolveStats stats;
  /// Set when a limit stopped the search before any solution was found.
  bool infeasible_so_far = false;
};

/// Complete branch-and-bound maximization of the problem objective.
SolveResult maximize(const ConstraintProblem& problem, SolveLimits limits = {});

/// Domains after root propagation, or none when propagation fails (then
/// `failed`, if given, receives the index of the constraint that failed).
std::optional<std::vector<std::pair<Value, Value>>> propagate(const ConstraintProblem& problem,
                                                             std::size_t* failed = nullptr);

/// True iff every value is in its domain and every constraint holds. Throws
/// std::invalid_argument when the assignment does not cover every variable.
bool verify_assignment(const ConstraintProblem& problem, const Assignment& a);

}  // namespace wclat
