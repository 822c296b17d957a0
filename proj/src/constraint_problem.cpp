#include "wclat/constraint_problem.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

namespace wclat {

Atom Atom::negated() const {
  switch (rel) {
    case Rel::Le: return {x, y, Rel::Ge, c + 1};
    case Rel::Ge: return {x, y, Rel::Le, c - 1};
    case Rel::Eq: return {x, y, Rel::Ne, c};
    case Rel::Ne: return {x, y, Rel::Eq, c};
  }
  return *this;
}

VarId ConstraintProblem::add_var(std::string name, Value lo, Value hi) {
  if (lo > hi) throw std::logic_error("empty domain for variable " + name);
  auto id = static_cast<VarId>(vars_.size());
  if (!by_name_.emplace(name, id).second)
    throw std::logic_error("duplicate variable name " + name);
  vars_.push_back({std::move(name), lo, hi});
  return id;
}

std::optional<VarId> ConstraintProblem::find(const std::string& name) const {
  auto it = by_name_.find(name);
  if (it == by_name_.end()) return std::nullopt;
  return it->second;
}

namespace {

template <class F>
void for_each_var(const Constraint& c, F&& f) {
  auto atom = [&](const Atom& a) {
    f(a.x);
    if (a.y != kNoVar) f(a.y);
  };
  auto term = [&](const Term& t) {
    if (t.x != kNoVar) f(t.x);
  };
  std::visit(
      [&](const auto& form) {
        using T = std::decay_t<decltype(form)>;
        if constexpr (std::is_same_v<T, Linear>) {
          for (const auto& [a, v] : form.terms) f(v);
        } else if constexpr (std::is_same_v<T, Clause>) {
          for (const auto& a : form.premises) atom(a);
          for (const auto& a : form.conclusions) atom(a);
        } else if constexpr (std::is_same_v<T, Reify>) {
          f(form.b);
          for (const auto& a : form.atoms) atom(a);
        } else if constexpr (std::is_same_v<T, Extremum>) {
          f(form.y);
          term(form.fallback);
          for (const auto& g : form.terms) {
            for (const auto& a : g.guard) atom(a);
            term(g.term);
          }
        } else {
          f(form.y);
          f(form.idx);
          term(form.fallback);
          for (const auto& t : form.array) term(t);
        }
      },
      c.form);
}

bool compare(Value lhs, Rel r, Value rhs) {
  switch (r) {
    case Rel::Le: return lhs <= rhs;
    case Rel::Ge: return lhs >= rhs;
    case Rel::Eq: return lhs == rhs;
    case Rel::Ne: return lhs != rhs;
  }
  return false;
}

const char* rel_text(Rel r) {
  switch (r) {
    case Rel::Le: return "<=";
    case Rel::Ge: return ">=";
    case Rel::Eq: return "=";
    case Rel::Ne: return "!=";
  }
  return "?";
}

}  // namespace

void ConstraintProblem::check_well_formed() const {
  auto n = static_cast<VarId>(vars_.size());
  for (const auto& c : constraints_) {
    for_each_var(c, [&](VarId v) {
      if (v < 0 || v >= n) throw std::logic_error("constraint references undeclared variable");
    });
  }
  if (objective_ < 0 || objective_ >= n) throw std::logic_error("objective variable not set");
}

Value value_of(const Term& t, const Assignment& s) {
  return t.x == kNoVar ? t.c : s[t.x] + t.c;
}

bool holds(const Atom& a, const Assignment& s) {
  Value lhs = a.y == kNoVar ? s[a.x] : s[a.x] - s[a.y];
  return compare(lhs, a.rel, a.c);
}

bool holds(const Constraint& c, const Assignment& s) {
  return std::visit(
      [&](const auto& form) -> bool {
        using T = std::decay_t<decltype(form)>;
        if constexpr (std::is_same_v<T, Linear>) {
          Value sum = 0;
          for (const auto& [a, v] : form.terms) sum += a * s[v];
          return compare(sum, form.rel, form.rhs);
        } else if constexpr (std::is_same_v<T, Clause>) {
          for (const auto& a : form.premises)
            if (!holds(a, s)) return true;
          return std::any_of(form.conclusions.begin(), form.conclusions.end(),
                             [&](const Atom& a) { return holds(a, s); });
        } else if constexpr (std::is_same_v<T, Reify>) {
          bool all = std::all_of(form.atoms.begin(), form.atoms.end(),
                                 [&](const Atom& a) { return holds(a, s); });
          return s[form.b] == (all ? 1 : 0);
        } else if constexpr (std::is_same_v<T, Extremum>) {
          Value best = value_of(form.fallback, s);
          for (const auto& g : form.terms) {
            bool on = std::all_of(g.guard.begin(), g.guard.end(),
                                  [&](const Atom& a) { return holds(a, s); });
            if (!on) continue;
            Value v = value_of(g.term, s);
            best = form.is_min ? std::min(best, v) : std::max(best, v);
          }
          return s[form.y] == best;
        } else {
          Value i = s[form.idx] - form.base;
          Value expect = (i >= 0 && i < static_cast<Value>(form.array.size()))
                             ? value_of(form.array[static_cast<std::size_t>(i)], s)
                             : value_of(form.fallback, s);
          return s[form.y] == expect;
        }
      },
      c.form);
}

namespace {

class Renderer {
 public:
  explicit Renderer(const ConstraintProblem& p) : p_(p) {}

  std::string name(VarId v) const { return p_.var(v).name; }

  std::string offset(Value c) const {
    if (c == 0) return "";
    return c > 0 ? " + " + std::to_string(c) : " - " + std::to_string(-c);
  }

  std::string term(const Term& t) const {
    if (t.x == kNoVar) return std::to_string(t.c);
    return name(t.x) + offset(t.c);
  }

  std::string atom(const Atom& a) const {
    if (a.y == kNoVar) return name(a.x) + " " + rel_text(a.rel) + " " + std::to_string(a.c);
    return name(a.x) + " " + rel_text(a.rel) + " " + name(a.y) + offset(a.c);
  }

  std::string join(const std::vector<Atom>& atoms, const char* op) const {
    std::string out;
    for (std::size_t i = 0; i < atoms.size(); ++i) {
      if (i) out += op;
      out += atom(atoms[i]);
    }
    return out;
  }

  std::string constraint(const Constraint& c) const {
    return std::visit(
        [&](const auto& form) -> std::string {
          using T = std::decay_t<decltype(form)>;
          if constexpr (std::is_same_v<T, Linear>) {
            std::string s = "c: sum(";
            for (std::size_t i = 0; i < form.terms.size(); ++i) {
              if (i) s += ", ";
              const auto& [a, v] = form.terms[i];
              s += (a == 1 ? "" : std::to_string(a) + "*") + name(v);
            }
            return s + ") " + rel_text(form.rel) + " " + std::to_string(form.rhs) + ";";
          } else if constexpr (std::is_same_v<T, Clause>) {
            if (form.premises.empty()) {
              if (form.conclusions.size() == 1) return "c: " + atom(form.conclusions[0]) + ";";
              return "c: " + join(form.conclusions, " \\/ ") + ";";
            }
            return "c: (" + join(form.premises, " /\\ ") + ") -> (" +
                   join(form.conclusions, " \\/ ") + ");";
          } else if constexpr (std::is_same_v<T, Reify>) {
            return "c: " + name(form.b) + " <-> (" + join(form.atoms, " /\\ ") + ");";
          } else if constexpr (std::is_same_v<T, Extremum>) {
            std::string s = "c: " + name(form.y) + " = " + (form.is_min ? "min(" : "max(") +
                            term(form.fallback);
            for (const auto& g : form.terms) {
              s += ", ";
              if (!g.guard.empty()) s += "[" + join(g.guard, " /\\ ") + "] ";
              s += term(g.term);
            }
            return s + ");";
          } else {
            std::string s = "c: " + name(form.y) + " = element(" + name(form.idx) + " - " +
                            std::to_string(form.base) + ", [";
            for (std::size_t i = 0; i < form.array.size(); ++i) {
              if (i) s += ", ";
              s += term(form.array[i]);
            }
            return s + "], " + term(form.fallback) + ");";
          }
        },
        c.form);
  }

 private:
  const ConstraintProblem& p_;
};

}  // namespace

std::string render(const ConstraintProblem& p, const Constraint& c) {
  return Renderer(p).constraint(c);
}

std::string export_neutral(const ConstraintProblem& p) {
  Renderer r(p);
  std::ostringstream os;
  for (const auto& v : p.vars()) os << "var " << v.lo << ".." << v.hi << " " << v.name << ";\n";
  const auto& cs = p.constraints();
  for (std::size_t i = 0; i < cs.size(); ++i) {
    os << r.constraint(cs[i]);
    os << (i + 1 < cs.size() && cs[i + 1].continues ? " " : "\n");
  }
  os << "maximize " << r.name(p.objective()) << ";\n";
  return os.str();
}

}  // namespace wclat
