#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <variant>

namespace wclat {

/// Integer time unit. The default interpretation is 1 us.
using Tick = std::int64_t;

/// Bounded analysis time domain. `sup` marks events that do not happen.
struct TimeDomain {
  Tick min = 0;
  Tick max = 0;
  Tick sup = 1;

  static TimeDomain up_to(Tick t_max, Tick t_min = 0) {
    return TimeDomain{t_min, t_max, t_max + 1};
  }
  bool valid() const { return min <= max && max < sup; }
};

struct OccurrenceWindow {
  Tick earliest = 0;
  Tick latest = 0;

  bool contains(Tick t) const { return earliest <= t && t <= latest; }
  friend bool operator==(const OccurrenceWindow&, const OccurrenceWindow&) = default;
};

struct Periodic {
  Tick offset = 0;
  Tick period = 1;
  std::int64_t multiplicity = 1;
  friend bool operator==(const Periodic&, const Periodic&) = default;
};

/// `min_interarrival` may be 0: the union of two sporadic models with equal
/// lower bounds produces it and simultaneous firings are possible.
struct Sporadic {
  Tick min_interarrival = 0;
  Tick max_interarrival = 1;
  std::int64_t multiplicity = 1;
  friend bool operator==(const Sporadic&, const Sporadic&) = default;
};

class DomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class TimingModel {
 public:
  TimingModel(Periodic p);  // NOLINT(google-explicit-constructor)
  TimingModel(Sporadic s);  // NOLINT(google-explicit-constructor)

  static TimingModel periodic(Tick offset, Tick period, std::int64_t n = 1) {
    return Periodic{offset, period, n};
  }
  static TimingModel sporadic(Tick l, Tick u, std::int64_t n = 1) {
    return Sporadic{l, u, n};
  }

  bool is_periodic() const { return std::holds_alternative<Periodic>(v_); }
  const Periodic& as_periodic() const { return std::get<Periodic>(v_); }
  const Sporadic& as_sporadic() const { return std::get<Sporadic>(v_); }
  std::int64_t multiplicity() const;

  /// Window of the i-th occurrence (1-based). Throws DomainError for i < 1.
  OccurrenceWindow eval(std::int64_t i) const;

  std::string to_string() const;

  friend bool operator==(const TimingModel&, const TimingModel&) = default;

 private:
  std::variant<Periodic, Sporadic> v_;
};

struct UnionOptions {
  /// Equal offsets with divisible but unequal periods yield a sporadic model
  /// instead of the (unsafe) periodic one.
  bool strict_safety = false;
};

/// The union operator on timing models. Commutative; n' = n0 + n1.
TimingModel unite(const TimingModel& t0, const TimingModel& t1, UnionOptions opt = {});

/// True iff the k-th event lies in the window of the k-th occurrence for all k.
bool covers(const TimingModel& model, std::span<const Tick> merged_events);

}  // namespace wclat
