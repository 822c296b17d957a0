#include "wclat/timing_model.hpp"

#include <algorithm>
#include <cstdlib>
#include <sstream>

namespace wclat {

namespace {

std::int64_t ceil_div(std::int64_t a, std::int64_t b) { return (a + b - 1) / b; }

void check(const Periodic& p) {
  if (p.period < 1 || p.multiplicity < 1 || p.offset < 0)
    throw DomainError("periodic timing model requires o >= 0, p >= 1, n >= 1");
}

void check(const Sporadic& s) {
  if (s.min_interarrival < 0 || s.max_interarrival <= s.min_interarrival || s.multiplicity < 1)
    throw DomainError("sporadic timing model requires 0 <= l < u, n >= 1");
}

Sporadic unite_pp(const Periodic& a, const Periodic& b) {
  Tick p_max = std::max(a.period, b.period);
  return Sporadic{std::min(a.period, b.period), std::max(a.offset, b.offset) + p_max,
                  a.multiplicity + b.multiplicity};
}

}  // namespace

TimingModel::TimingModel(Periodic p) : v_(p) { check(p); }
TimingModel::TimingModel(Sporadic s) : v_(s) { check(s); }

std::int64_t TimingModel::multiplicity() const {
  return is_periodic() ? as_periodic().multiplicity : as_sporadic().multiplicity;
}

OccurrenceWindow TimingModel::eval(std::int64_t i) const {
  if (i < 1) throw DomainError("occurrence index must be >= 1, got " + std::to_string(i));
  if (is_periodic()) {
    const auto& p = as_periodic();
    Tick a = p.offset + (ceil_div(i, p.multiplicity) - 1) * p.period;
    return {a, a};
  }
  const auto& s = as_sporadic();
  std::int64_t burst = ceil_div(i, s.multiplicity);
  return {(burst - 1) * s.min_interarrival, burst * s.max_interarrival};
}

std::string TimingModel::to_string() const {
  std::ostringstream os;
  if (is_periodic()) {
    const auto& p = as_periodic();
    os << "Periodic(" << p.offset << "," << p.period << "," << p.multiplicity << ")";
  } else {
    const auto& s = as_sporadic();
    os << "Sporadic(" << s.min_interarrival << "," << s.max_interarrival << ","
       << s.multiplicity << ")";
  }
  return os.str();
}

TimingModel unite(const TimingModel& t0, const TimingModel& t1, UnionOptions opt) {
  std::int64_t n = t0.multiplicity() + t1.multiplicity();

  if (t0.is_periodic() && t1.is_periodic()) {
    const auto& a = t0.as_periodic();
    const auto& b = t1.as_periodic();
    Tick p_min = std::min(a.period, b.period);
    Tick p_max = std::max(a.period, b.period);
    if (a.offset == b.offset && p_max % p_min == 0) {
      if (!opt.strict_safety || p_min == p_max) return Periodic{a.offset, p_min, n};
      return Sporadic{p_min, a.offset + p_max, n};
    }
    return unite_pp(a, b);
  }

  if (t0.is_periodic() != t1.is_periodic()) {
    const auto& s = t0.is_periodic() ? t1.as_sporadic() : t0.as_sporadic();
    const auto& p = t0.is_periodic() ? t0.as_periodic() : t1.as_periodic();
    return Sporadic{std::min(s.min_interarrival, p.period),
                    std::max(p.offset + p.period, s.max_interarrival), n};
  }

  const auto& a = t0.as_sporadic();
  const auto& b = t1.as_sporadic();
  Tick l = std::min({a.min_interarrival, b.min_interarrival,
                     std::abs(a.min_interarrival - b.min_interarrival)});
  return Sporadic{l, std::max(a.max_interarrival, b.max_interarrival), n};
}

bool covers(const TimingModel& model, std::span<const Tick> merged_events) {
  for (std::size_t k = 0; k < merged_events.size(); ++k) {
    if (!model.eval(static_cast<std::int64_t>(k) + 1).contains(merged_events[k])) return false;
  }
  return true;
}

}  // namespace wclat
