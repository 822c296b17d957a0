#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <variant>
#include <vector>

namespace wclat {

using Value = std::int64_t;
using VarId = std::int32_t;
inline constexpr VarId kNoVar = -1;

enum class Rel { Le, Ge, Eq, Ne };

/// x - y REL c, or x REL c when y is kNoVar.
struct Atom {
  VarId x = kNoVar;
  VarId y = kNoVar;
  Rel rel = Rel::Le;
  Value c = 0;

  Atom negated() const;
};

inline Atom le(VarId x, Value c) { return {x, kNoVar, Rel::Le, c}; }
inline Atom ge(VarId x, Value c) { return {x, kNoVar, Rel::Ge, c}; }
inline Atom eq(VarId x, Value c) { return {x, kNoVar, Rel::Eq, c}; }
inline Atom ne(VarId x, Value c) { return {x, kNoVar, Rel::Ne, c}; }
/// x - y REL c
inline Atom diff(VarId x, Rel r, VarId y, Value c = 0) { return {x, y, r, c}; }
/// x < y
inline Atom lt(VarId x, VarId y) { return {x, y, Rel::Le, -1}; }
/// x <= y
inline Atom leq(VarId x, VarId y) { return {x, y, Rel::Le, 0}; }

/// A variable plus a constant, or a constant alone.
struct Term {
  VarId x = kNoVar;
  Value c = 0;
};
inline Term cst(Value c) { return {kNoVar, c}; }
inline Term var(VarId x, Value c = 0) { return {x, c}; }

/// sum(coef * var) REL rhs
struct Linear {
  std::vector<std::pair<Value, VarId>> terms;
  Rel rel = Rel::Le;
  Value rhs = 0;
};

/// (all premises) -> (any conclusion). No premises: plain disjunction.
struct Clause {
  std::vector<Atom> premises;
  std::vector<Atom> conclusions;
};

/// b <-> (all atoms); b is a 0/1 variable.
struct Reify {
  VarId b = kNoVar;
  std::vector<Atom> atoms;
};

struct Guarded {
  std::vector<Atom> guard;  // conjunction; empty = always present
  Term term;
};

/// y = min/max(default, {term_i | guard_i holds})
struct Extremum {
  VarId y = kNoVar;
  bool is_min = true;
  Term fallback;
  std::vector<Guarded> terms;
};

/// y = array[idx - base] if idx indexes the array, else fallback.
struct Element {
  VarId y = kNoVar;
  VarId idx = kNoVar;
  Value base = 1;
  std::vector<Term> array;
  Term fallback;
};

struct Constraint {
  std::variant<Linear, Clause, Reify, Extremum, Element> form;
  /// Equation family the constraint instantiates (for export and tests).
  std::string schema;
  /// Export on the same line as the preceding constraint.
  bool continues = false;
};

struct VarInfo {
  std::string name;
  Value lo = 0;
  Value hi = 0;
};

class Assignment {
 public:
  Assignment() = default;
  explicit Assignment(std::vector<Value> values) : values_(std::move(values)) {}
  Value operator[](VarId v) const { return values_.at(static_cast<std::size_t>(v)); }
  Value& operator[](VarId v) { return values_.at(static_cast<std::size_t>(v)); }
  std::size_t size() const { return values_.size(); }
  const std::vector<Value>& values() const { return values_; }

 private:
  std::vector<Value> values_;
};

class ConstraintProblem {
 public:
  VarId add_var(std::string name, Value lo, Value hi);
  VarId add_const(std::string name, Value v) { return add_var(std::move(name), v, v); }
  void add(Constraint c) { constraints_.push_back(std::move(c)); }
  void add(std::string schema, Linear l) { add({std::move(l), std::move(schema)}); }
  void add(std::string schema, Clause c) { add({std::move(c), std::move(schema)}); }
  void add(std::string schema, Reify r) { add({std::move(r), std::move(schema)}); }
  void add(std::string schema, Extremum e) { add({std::move(e), std::move(schema)}); }
  void add(std::string schema, Element e) { add({std::move(e), std::move(schema)}); }

  void set_objective(VarId v) { objective_ = v; }
  VarId objective() const { return objective_; }

  /// Branching order hint; variables not listed are branched on last.
  void set_search_order(std::vector<VarId> order) { order_ = std::move(order); }
  const std::vector<VarId>& search_order() const { return order_; }

  /// Branched after the search order: always the one with the smallest lower
  /// bound (ties by list position), smallest value first.
  void set_schedule_vars(std::vector<VarId> vars) { schedule_ = std::move(vars); }
  const std::vector<VarId>& schedule_vars() const { return schedule_; }

  const std::vector<VarInfo>& vars() const { return vars_; }
  const VarInfo& var(VarId v) const { return vars_.at(static_cast<std::size_t>(v)); }
  const std::vector<Constraint>& constraints() const { return constraints_; }
  std::optional<VarId> find(const std::string& name) const;

  /// Throws std::logic_error if a constraint references an undeclared var.
  void check_well_formed() const;

 private:
  std::vector<VarInfo> vars_;
  std::vector<Constraint> constraints_;
  std::unordered_map<std::string, VarId> by_name_;
  std::vector<VarId> order_;
  std::vector<VarId> schedule_;
  VarId objective_ = kNoVar;
};

/// Evaluation on a total assignment; independent of the solver's propagators.
bool holds(const Atom& a, const Assignment& s);
bool holds(const Constraint& c, const Assignment& s);
Value value_of(const Term& t, const Assignment& s);

/// Deterministic line-oriented rendering of a problem.
std::string export_neutral(const ConstraintProblem& p);
std::string render(const ConstraintProblem& p, const Constraint& c);

}  // namespace wclat
