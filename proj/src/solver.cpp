#include "wclat/solver.hpp"

#include <sys/resource.h>

#include <algorithm>
#include <deque>
#include <limits>
#include <stdexcept>

namespace wclat {

const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::Optimal: return "optimal";
    case SolveStatus::Incumbent: return "incumbent";
    case SolveStatus::Infeasible: return "infeasible";
    case SolveStatus::Timeout: return "timeout";
  }
  return "?";
}

namespace {

constexpr Value kSplitWidth = 16;

enum class Truth { False, True, Unknown };

struct Fail {};

class Store {
 public:
  explicit Store(const ConstraintProblem& p) {
    for (const auto& v : p.vars()) {
      lo_.push_back(v.lo);
      hi_.push_back(v.hi);
    }
  }

  Value lo(VarId v) const { return lo_[static_cast<std::size_t>(v)]; }
  Value hi(VarId v) const { return hi_[static_cast<std::size_t>(v)]; }
  bool fixed(VarId v) const { return lo(v) == hi(v); }
  std::size_t size() const { return lo_.size(); }

  void set_lo(VarId v, Value x) {
    auto i = static_cast<std::size_t>(v);
    if (x <= lo_[i]) return;
    if (x > hi_[i]) throw Fail{};
    trail_.push_back({v, lo_[i], hi_[i]});
    lo_[i] = x;
    changed_.push_back(v);
  }
  void set_hi(VarId v, Value x) {
    auto i = static_cast<std::size_t>(v);
    if (x >= hi_[i]) return;
    if (x < lo_[i]) throw Fail{};
    trail_.push_back({v, lo_[i], hi_[i]});
    hi_[i] = x;
    changed_.push_back(v);
  }

  std::size_t mark() const { return trail_.size(); }
  void undo(std::size_t m) {
    while (trail_.size() > m) {
      const auto& e = trail_.back();
      lo_[static_cast<std::size_t>(e.v)] = e.lo;
      hi_[static_cast<std::size_t>(e.v)] = e.hi;
      trail_.pop_back();
    }
    changed_.clear();
  }

  std::vector<VarId>& changed() { return changed_; }

  Assignment snapshot() const { return Assignment(lo_); }

 private:
  struct Entry {
    VarId v;
    Value lo, hi;
  };
  std::vector<Value> lo_, hi_;
  std::vector<Entry> trail_;
  std::vector<VarId> changed_;
};

// Bounds reasoning over one constraint at a time.
class Propagator {
 public:
  explicit Propagator(Store& s) : s_(s) {}

  Value tlo(const Term& t) const { return t.x == kNoVar ? t.c : s_.lo(t.x) + t.c; }
  Value thi(const Term& t) const { return t.x == kNoVar ? t.c : s_.hi(t.x) + t.c; }
  void tset_lo(const Term& t, Value v) {
    if (t.x == kNoVar) {
      if (t.c < v) throw Fail{};
    } else {
      s_.set_lo(t.x, v - t.c);
    }
  }
  void tset_hi(const Term& t, Value v) {
    if (t.x == kNoVar) {
      if (t.c > v) throw Fail{};
    } else {
      s_.set_hi(t.x, v - t.c);
    }
  }

  Truth truth(const Atom& a) const {
    Value mn, mx;
    if (a.y == kNoVar) {
      mn = s_.lo(a.x);
      mx = s_.hi(a.x);
    } else {
      mn = s_.lo(a.x) - s_.hi(a.y);
      mx = s_.hi(a.x) - s_.lo(a.y);
    }
    switch (a.rel) {
      case Rel::Le:
        if (mx <= a.c) return Truth::True;
        if (mn > a.c) return Truth::False;
        break;
      case Rel::Ge:
        if (mn >= a.c) return Truth::True;
        if (mx < a.c) return Truth::False;
        break;
      case Rel::Eq:
        if (mn == mx && mn == a.c) return Truth::True;
        if (a.c < mn || a.c > mx) return Truth::False;
        break;
      case Rel::Ne:
        if (mn == mx && mn == a.c) return Truth::False;
        if (a.c < mn || a.c > mx) return Truth::True;
        break;
    }
    return Truth::Unknown;
  }

  void enforce(const Atom& a) {
    if (a.y == kNoVar) {
      switch (a.rel) {
        case Rel::Le: s_.set_hi(a.x, a.c); break;
        case Rel::Ge: s_.set_lo(a.x, a.c); break;
        case Rel::Eq:
          s_.set_lo(a.x, a.c);
          s_.set_hi(a.x, a.c);
          break;
        case Rel::Ne:
          if (s_.lo(a.x) == a.c) s_.set_lo(a.x, a.c + 1);
          if (s_.hi(a.x) == a.c) s_.set_hi(a.x, a.c - 1);
          break;
      }
      return;
    }
    switch (a.rel) {
      case Rel::Le:
        s_.set_hi(a.x, s_.hi(a.y) + a.c);
        s_.set_lo(a.y, s_.lo(a.x) - a.c);
        break;
      case Rel::Ge:
        s_.set_lo(a.x, s_.lo(a.y) + a.c);
        s_.set_hi(a.y, s_.hi(a.x) - a.c);
        break;
      case Rel::Eq:
        for (int k = 0; k < 2; ++k) {
          s_.set_lo(a.x, s_.lo(a.y) + a.c);
          s_.set_hi(a.x, s_.hi(a.y) + a.c);
          s_.set_lo(a.y, s_.lo(a.x) - a.c);
          s_.set_hi(a.y, s_.hi(a.x) - a.c);
        }
        break;
      case Rel::Ne:
        if (s_.fixed(a.y)) enforce(ne(a.x, s_.lo(a.y) + a.c));
        if (s_.fixed(a.x)) enforce(ne(a.y, s_.lo(a.x) - a.c));
        break;
    }
  }

  // At least one of the literals holds; a literal is (atom, negate?).
  void clause(const std::vector<std::pair<const Atom*, bool>>& lits) {
    const Atom* open = nullptr;
    bool open_neg = false;
    int n_open = 0;
    for (const auto& [a, neg] : lits) {
      Truth t = truth(*a);
      if (t == Truth::Unknown) {
        ++n_open;
        open = a;
        open_neg = neg;
        if (n_open > 1) return;
      } else if ((t == Truth::True) != neg) {
        return;
      }
    }
    if (n_open == 0) throw Fail{};
    enforce(open_neg ? open->negated() : *open);
  }

  void run(const Linear& l) {
    Value mn = 0, mx = 0;
    for (const auto& [a, v] : l.terms) {
      mn += a > 0 ? a * s_.lo(v) : a * s_.hi(v);
      mx += a > 0 ? a * s_.hi(v) : a * s_.lo(v);
    }
    auto upper = [&](Value rhs) {  // sum <= rhs
      if (mn > rhs) throw Fail{};
      for (const auto& [a, v] : l.terms) {
        if (a == 0) continue;
        Value tmin = a > 0 ? a * s_.lo(v) : a * s_.hi(v);
        Value room = rhs - (mn - tmin);  // a*v <= room
        if (a > 0)
          s_.set_hi(v, floor_div(room, a));
        else
          s_.set_lo(v, ceil_div(room, a));
      }
    };
    auto lower = [&](Value rhs) {  // sum >= rhs
      if (mx < rhs) throw Fail{};
      for (const auto& [a, v] : l.terms) {
        if (a == 0) continue;
        Value tmax = a > 0 ? a * s_.hi(v) : a * s_.lo(v);
        Value need = rhs - (mx - tmax);  // a*v >= need
        if (a > 0)
          s_.set_lo(v, ceil_div(need, a));
        else
          s_.set_hi(v, floor_div(need, a));
      }
    };
    switch (l.rel) {
      case Rel::Le: upper(l.rhs); break;
      case Rel::Ge: lower(l.rhs); break;
      case Rel::Eq:
        upper(l.rhs);
        lower(l.rhs);
        break;
      case Rel::Ne: {
        int unfixed = 0;
        VarId free = kNoVar;
        Value coef = 0, sum = 0;
        for (const auto& [a, v] : l.terms) {
          if (a == 0 || s_.fixed(v)) {
            sum += a * s_.lo(v);
          } else {
            ++unfixed;
            free = v;
            coef = a;
          }
        }
        if (unfixed == 0 && sum == l.rhs) throw Fail{};
        if (unfixed == 1 && (l.rhs - sum) % coef == 0) enforce(ne(free, (l.rhs - sum) / coef));
        break;
      }
    }
  }

  void run(const Clause& c) {
    std::vector<std::pair<const Atom*, bool>> lits;
    lits.reserve(c.premises.size() + c.conclusions.size());
    for (const auto& a : c.premises) lits.push_back({&a, true});
    for (const auto& a : c.conclusions) lits.push_back({&a, false});
    clause(lits);
  }

  void run(const Reify& r) {
    if (s_.lo(r.b) >= 1) {
      for (const auto& a : r.atoms) enforce(a);
      return;
    }
    if (s_.hi(r.b) <= 0) {
      std::vector<std::pair<const Atom*, bool>> lits;
      for (const auto& a : r.atoms) lits.push_back({&a, true});
      clause(lits);
      return;
    }
    bool all = true;
    for (const auto& a : r.atoms) {
      Truth t = truth(a);
      if (t == Truth::False) {
        s_.set_hi(r.b, 0);
        return;
      }
      if (t == Truth::Unknown) all = false;
    }
    if (all) s_.set_lo(r.b, 1);
  }

  Truth guard(const std::vector<Atom>& g) const {
    Truth out = Truth::True;
    for (const auto& a : g) {
      Truth t = truth(a);
      if (t == Truth::False) return Truth::False;
      if (t == Truth::Unknown) out = Truth::Unknown;
    }
    return out;
  }

  void guard_off(const std::vector<Atom>& g) {
    std::vector<std::pair<const Atom*, bool>> lits;
    for (const auto& a : g) lits.push_back({&a, true});
    clause(lits);
  }

  // Written for min; max is handled by mirroring every bound.
  void run(const Extremum& e) {
    const bool mn = e.is_min;
    auto lo = [&](const Term& t) { return mn ? tlo(t) : -thi(t); };
    auto hi = [&](const Term& t) { return mn ? thi(t) : -tlo(t); };
    auto set_lo = [&](const Term& t, Value v) { mn ? tset_lo(t, v) : tset_hi(t, -v); };
    auto set_hi = [&](const Term& t, Value v) { mn ? tset_hi(t, v) : tset_lo(t, -v); };
    Term y = var(e.y);

    std::vector<Truth> st(e.terms.size());
    for (std::size_t i = 0; i < e.terms.size(); ++i) st[i] = guard(e.terms[i].guard);

    Value ylo = lo(e.fallback), yhi = hi(e.fallback);
    for (std::size_t i = 0; i < e.terms.size(); ++i) {
      if (st[i] == Truth::False) continue;
      ylo = std::min(ylo, lo(e.terms[i].term));
      if (st[i] == Truth::True) yhi = std::min(yhi, hi(e.terms[i].term));
    }
    set_lo(y, ylo);
    set_hi(y, yhi);

    Value ymin = lo(y), ymax = hi(y);
    set_lo(e.fallback, ymin);
    int support = lo(e.fallback) <= ymax ? 1 : 0;
    // y equals one of its supports, so it cannot exceed the largest of them
    Value reach = support ? hi(e.fallback) : std::numeric_limits<Value>::min();
    std::ptrdiff_t who = -1;
    for (std::size_t i = 0; i < e.terms.size(); ++i) {
      const auto& g = e.terms[i];
      if (st[i] == Truth::True) {
        set_lo(g.term, ymin);
      } else if (st[i] == Truth::Unknown && hi(g.term) < ymin) {
        guard_off(g.guard);
        st[i] = guard(g.guard);
      }
      if (st[i] != Truth::False && lo(g.term) <= ymax) {
        ++support;
        who = static_cast<std::ptrdiff_t>(i);
        reach = std::max(reach, hi(g.term));
      }
    }
    if (support == 0) throw Fail{};
    set_hi(y, reach);
    if (support == 1) {
      if (who < 0) {
        set_hi(e.fallback, ymax);
      } else {
        const auto& g = e.terms[static_cast<std::size_t>(who)];
        for (const auto& a : g.guard) enforce(a);
        set_hi(g.term, ymax);
      }
    }
  }

  void run(const Element& e) {
    const auto n = static_cast<Value>(e.array.size());
    auto at = [&](Value idx) -> const Term& {
      Value i = idx - e.base;
      return i >= 0 && i < n ? e.array[static_cast<std::size_t>(i)] : e.fallback;
    };
    auto fits = [&](const Term& t) { return tlo(t) <= s_.hi(e.y) && thi(t) >= s_.lo(e.y); };

    // Shrink the index from both ends.
    while (!fits(at(s_.lo(e.idx)))) {
      Value i = s_.lo(e.idx);
      if (i < e.base) {
        s_.set_lo(e.idx, e.base);
      } else {
        s_.set_lo(e.idx, i + 1);
      }
    }
    while (!fits(at(s_.hi(e.idx)))) {
      Value i = s_.hi(e.idx);
      if (i >= e.base + n) {
        s_.set_hi(e.idx, e.base + n - 1);
      } else {
        s_.set_hi(e.idx, i - 1);
      }
    }

    Value ilo = s_.lo(e.idx), ihi = s_.hi(e.idx);
    if (ilo == ihi) {
      const Term& t = at(ilo);
      for (int k = 0; k < 2; ++k) {
        s_.set_lo(e.y, tlo(t));
        s_.set_hi(e.y, thi(t));
        tset_lo(t, s_.lo(e.y));
        tset_hi(t, s_.hi(e.y));
      }
      return;
    }
    Value mn = std::numeric_limits<Value>::max(), mx = std::numeric_limits<Value>::min();
    bool uses_fallback = ilo < e.base || ihi >= e.base + n;
    if (uses_fallback) {
      mn = tlo(e.fallback);
      mx = thi(e.fallback);
    }
    for (Value i = std::max(ilo, e.base); i <= std::min(ihi, e.base + n - 1); ++i) {
      const Term& t = e.array[static_cast<std::size_t>(i - e.base)];
      mn = std::min(mn, tlo(t));
      mx = std::max(mx, thi(t));
    }
    s_.set_lo(e.y, mn);
    s_.set_hi(e.y, mx);
  }

  static Value floor_div(Value a, Value b) {
    Value q = a / b;
    return (a % b != 0 && ((a < 0) != (b < 0))) ? q - 1 : q;
  }
  static Value ceil_div(Value a, Value b) {
    Value q = a / b;
    return (a % b != 0 && ((a < 0) == (b < 0))) ? q + 1 : q;
  }

 private:
  Store& s_;
};

template <class F>
void each_var(const Constraint& c, F&& f) {
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

class Engine {
 public:
  Engine(const ConstraintProblem& p, SolveLimits limits)
      : p_(p), store_(p), prop_(store_), limits_(limits) {
    watch_.resize(store_.size());
    const auto& cs = p.constraints();
    for (std::size_t i = 0; i < cs.size(); ++i) {
      std::vector<VarId> vs;
      each_var(cs[i], [&](VarId v) { vs.push_back(v); });
      std::sort(vs.begin(), vs.end());
      vs.erase(std::unique(vs.begin(), vs.end()), vs.end());
      for (VarId v : vs) watch_[static_cast<std::size_t>(v)].push_back(i);
    }
    queued_.assign(cs.size(), 0);

    std::vector<char> seen(store_.size(), 0);
    auto take = [&](VarId v, std::vector<VarId>& into) {
      if (v >= 0 && static_cast<std::size_t>(v) < seen.size() && !seen[static_cast<std::size_t>(v)]) {
        seen[static_cast<std::size_t>(v)] = 1;
        into.push_back(v);
      }
    };
    for (VarId v : p.search_order()) take(v, order_);
    inputs_ = order_.size();
    for (VarId v : p.schedule_vars()) take(v, schedule_);
    for (std::size_t v = 0; v < seen.size(); ++v) take(static_cast<VarId>(v), order_);
  }

  // Next branching variable, or kNoVar when everything is fixed.
  VarId select(std::size_t& pos) {
    while (pos < inputs_ && store_.fixed(order_[pos])) ++pos;
    if (pos < inputs_) return order_[pos];
    VarId best = kNoVar;
    for (VarId v : schedule_)
      if (!store_.fixed(v) && (best == kNoVar || store_.lo(v) < store_.lo(best))) best = v;
    if (best != kNoVar) return best;
    while (pos < order_.size() && store_.fixed(order_[pos])) ++pos;
    return pos < order_.size() ? order_[pos] : kNoVar;
  }

  std::optional<std::vector<std::pair<Value, Value>>> root() {
    for (std::size_t i = 0; i < p_.constraints().size(); ++i) enqueue(i);
    if (!fixpoint()) return std::nullopt;
    std::vector<std::pair<Value, Value>> out;
    for (std::size_t v = 0; v < store_.size(); ++v)
      out.emplace_back(store_.lo(static_cast<VarId>(v)), store_.hi(static_cast<VarId>(v)));
    return out;
  }

  SolveResult run() {
    auto start = std::chrono::steady_clock::now();
    SolveResult res;
    bool stopped = false;

    for (std::size_t i = 0; i < p_.constraints().size(); ++i) enqueue(i);
    if (fixpoint()) {
      struct Frame {
        VarId v;
        Value val;
        std::size_t mark;
        std::size_t pos;
        bool right;
        bool up;  // upper half first
      };
      std::vector<Frame> stack;
      std::size_t pos = 0;
      bool at_node = true;
      while (true) {
        if (at_node) {
          ++res.stats.nodes;
          if ((res.stats.nodes & 15) == 0 && over_limit(start)) {
            stopped = true;
            break;
          }
          VarId v = select(pos);
          if (v == kNoVar) {
            Assignment a = store_.snapshot();
            if (all_hold(a)) {
              ++res.stats.solutions;
              best_ = a[p_.objective()];
              res.objective = best_;
              res.witness = std::move(a);
            }
            at_node = false;
          } else {
            Value val = store_.lo(v);
            // wide input windows are split in half, everything else is labelled;
            // input choices between two values try the larger one first
            bool input = pos < inputs_;
            if (input && store_.hi(v) - val > kSplitWidth) val += (store_.hi(v) - val) / 2;
            bool up = input && store_.hi(v) == val + 1;
            stack.push_back({v, val, store_.mark(), pos, false, up});
            if (up)
              at_node = apply([&] { store_.set_lo(v, val + 1); });
            else
              at_node = apply([&] { store_.set_hi(v, val); });
          }
          if (at_node) continue;
          ++res.stats.failures;
        }
        // Backtrack to the deepest frame with an open right branch.
        bool resumed = false;
        while (!stack.empty()) {
          Frame& f = stack.back();
          store_.undo(f.mark);
          if (!f.right) {
            f.right = true;
            pos = f.pos;
            VarId v = f.v;
            Value val = f.val;
            bool ok = f.up ? apply([&] { store_.set_hi(v, val); }) : apply([&] { store_.set_lo(v, val + 1); });
            if (ok) {
              resumed = true;
              break;
            }
            ++res.stats.failures;
          } else {
            stack.pop_back();
          }
        }
        if (!resumed) break;
        at_node = true;
      }
    }

    res.stats.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    res.stats.propagations = propagations_;
    if (stopped) {
      res.status = res.witness ? SolveStatus::Incumbent : SolveStatus::Timeout;
      res.infeasible_so_far = !res.witness;
    } else {
      res.status = res.witness ? SolveStatus::Optimal : SolveStatus::Infeasible;
    }
    return res;
  }

 private:
  template <class F>
  bool apply(F&& change) {
    try {
      if (best_) store_.set_lo(p_.objective(), *best_ + 1);
      change();
    } catch (const Fail&) {
      return false;
    }
    return fixpoint();
  }

  void enqueue(std::size_t c) {
    if (queued_[c]) return;
    queued_[c] = 1;
    queue_.push_back(c);
  }

  void flush_changes() {
    auto& ch = store_.changed();
    for (VarId v : ch)
      for (std::size_t c : watch_[static_cast<std::size_t>(v)]) enqueue(c);
    ch.clear();
  }

  bool fixpoint() {
    flush_changes();
    try {
      while (!queue_.empty()) {
        std::size_t c = queue_.front();
        queue_.pop_front();
        queued_[c] = 0;
        current_ = c;
        ++propagations_;
        std::visit([&](const auto& form) { prop_.run(form); }, p_.constraints()[c].form);
        flush_changes();
      }
    } catch (const Fail&) {
      last_failed_ = current_;
      for (std::size_t c : queue_) queued_[c] = 0;
      queue_.clear();
      store_.changed().clear();
      return false;
    }
    return true;
  }

  bool all_hold(const Assignment& a) const {
    for (const auto& c : p_.constraints())
      if (!holds(c, a)) return false;
    return true;
  }

  bool over_limit(std::chrono::steady_clock::time_point start) const {
    if (limits_.time && std::chrono::steady_clock::now() - start >= *limits_.time) return true;
    if (limits_.memory_mb) {
      rusage ru{};
      getrusage(RUSAGE_SELF, &ru);
      if (ru.ru_maxrss / 1024 >= *limits_.memory_mb) return true;
    }
    return false;
  }

  const ConstraintProblem& p_;
  Store store_;
  Propagator prop_;
  SolveLimits limits_;
  std::vector<std::vector<std::size_t>> watch_;
  std::vector<char> queued_;
  std::deque<std::size_t> queue_;
  std::vector<VarId> order_;
  std::size_t inputs_ = 0;
  std::vector<VarId> schedule_;
  std::optional<Value> best_;
  std::int64_t propagations_ = 0;
  std::size_t current_ = 0;

 public:
  std::size_t last_failed_ = 0;
};

}  // namespace

SolveResult maximize(const ConstraintProblem& problem, SolveLimits limits) {
  problem.check_well_formed();
  return Engine(problem, limits).run();
}

std::optional<std::vector<std::pair<Value, Value>>> propagate(const ConstraintProblem& problem,
                                                             std::size_t* failed) {
  problem.check_well_formed();
  Engine e(problem, {});
  auto out = e.root();
  if (!out && failed) *failed = e.last_failed_;
  return out;
}

bool verify_assignment(const ConstraintProblem& problem, const Assignment& a) {
  if (a.size() != problem.vars().size())
    throw std::invalid_argument("assignment covers " + std::to_string(a.size()) + " of " +
                                std::to_string(problem.vars().size()) + " variables");
  for (std::size_t i = 0; i < a.size(); ++i) {
    const auto& v = problem.vars()[i];
    Value x = a[static_cast<VarId>(i)];
    if (x < v.lo || x > v.hi) return false;
  }
  for (const auto& c : problem.constraints())
    if (!holds(c, a)) return false;
  return true;
}

}  // namespace wclat
