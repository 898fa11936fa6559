#pragma once

// Batched Bernoulli environment with non-stationary means: per-arm mean
// schedules, a day-indexed traffic schedule, and the sampling step that turns
// an allocation into one day's observation. Days are 1-based throughout.

#include <cmath>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "cumgain/rng.hpp"
#include "cumgain/text.hpp"

namespace cumgain {

struct ConstantSchedule {
  double value = 0.0;
  bool operator==(const ConstantSchedule&) const = default;
};

// Piecewise-constant segments. A segment's value applies from `from_day`
// onward (the boundary day itself already uses the new value) until the next
// segment starts.
struct PiecewiseSegment {
  int from_day = 1;
  double value = 0.0;
  bool operator==(const PiecewiseSegment&) const = default;
};

struct PiecewiseSchedule {
  std::vector<PiecewiseSegment> segments;
  bool operator==(const PiecewiseSchedule&) const = default;
};

// base + amplitude * sin(2*pi*day/period + phase)
struct SinusoidSchedule {
  double base = 0.0;
  double amplitude = 0.0;
  double period = 1.0;
  double phase = 0.0;
  bool operator==(const SinusoidSchedule&) const = default;
};

// Explicit per-day values; values[day - 1] is used for day `day`.
struct TableSchedule {
  std::vector<double> values;
  bool operator==(const TableSchedule&) const = default;
};

using MeanSchedule =
    std::variant<ConstantSchedule, PiecewiseSchedule, SinusoidSchedule, TableSchedule>;

inline double schedule_mean(const MeanSchedule& schedule, int day) {
  if (day < 1) throw std::out_of_range("schedule_mean: day must be at least 1");
  if (const auto* c = std::get_if<ConstantSchedule>(&schedule)) {
    return c->value;
  }
  if (const auto* p = std::get_if<PiecewiseSchedule>(&schedule)) {
    if (p->segments.empty() || day < p->segments.front().from_day) {
      throw std::out_of_range("schedule_mean: day precedes the first piecewise segment");
    }
    double value = p->segments.front().value;
    for (const auto& seg : p->segments) {
      if (seg.from_day <= day) value = seg.value;
    }
    return value;
  }
  if (const auto* s = std::get_if<SinusoidSchedule>(&schedule)) {
    return s->base +
           s->amplitude * std::sin(2.0 * std::numbers::pi * day / s->period + s->phase);
  }
  const auto& table = std::get<TableSchedule>(schedule);
  if (day > static_cast<int>(table.values.size())) {
    throw std::out_of_range("schedule_mean: day beyond the value table");
  }
  return table.values[day - 1];
}

// Daily traffic: one constant, or an explicit per-day list.
using TrafficSchedule = std::variant<std::int64_t, std::vector<std::int64_t>>;

struct Scenario {
  std::string name;
  int arm_count = 0;
  int horizon = 0;
  std::vector<MeanSchedule> means;  // one schedule per arm
  TrafficSchedule traffic = std::int64_t{0};

  bool operator==(const Scenario&) const = default;
};

inline std::int64_t traffic_at(const Scenario& scenario, int day) {
  if (day < 1 || day > scenario.horizon) {
    throw std::out_of_range("traffic_at: day " + format_int(day) + " outside 1.." +
                            format_int(scenario.horizon));
  }
  if (const auto* constant = std::get_if<std::int64_t>(&scenario.traffic)) return *constant;
  const auto& per_day = std::get<std::vector<std::int64_t>>(scenario.traffic);
  return per_day[day - 1];
}

// True means of every arm on `day`. Throws std::out_of_range outside 1..horizon.
inline std::vector<double> means_at(const Scenario& scenario, int day) {
  if (day < 1 || day > scenario.horizon) {
    throw std::out_of_range("means_at: day " + format_int(day) + " outside 1.." +
                            format_int(scenario.horizon));
  }
  std::vector<double> mu(scenario.means.size());
  for (std::size_t i = 0; i < scenario.means.size(); ++i) {
    mu[i] = schedule_mean(scenario.means[i], day);
  }
  return mu;
}

// Full structural check; throws std::invalid_argument naming what failed.
inline void validate_scenario(const Scenario& scenario) {
  if (scenario.arm_count < 2) {
    throw std::invalid_argument("scenario: arm_count must be at least 2");
  }
  if (scenario.horizon < 1) {
    throw std::invalid_argument("scenario: horizon must be at least 1");
  }
  if (static_cast<int>(scenario.means.size()) != scenario.arm_count) {
    throw std::invalid_argument("scenario: expected " + format_int(scenario.arm_count) +
                                " mean schedules, got " + format_int(scenario.means.size()));
  }
  for (std::size_t i = 0; i < scenario.means.size(); ++i) {
    const std::string arm = "arm " + format_int(static_cast<int>(i) + 1);
    if (const auto* p = std::get_if<PiecewiseSchedule>(&scenario.means[i])) {
      if (p->segments.empty()) {
        throw std::invalid_argument("scenario: " + arm + " piecewise schedule has no segments");
      }
      if (p->segments.front().from_day != 1) {
        throw std::invalid_argument("scenario: " + arm + " piecewise schedule must start at day 1");
      }
      for (std::size_t s = 1; s < p->segments.size(); ++s) {
        if (p->segments[s].from_day <= p->segments[s - 1].from_day) {
          throw std::invalid_argument("scenario: " + arm +
                                      " piecewise segments must have increasing from_day");
        }
      }
    }
    if (const auto* s = std::get_if<SinusoidSchedule>(&scenario.means[i])) {
      if (!(s->period > 0.0)) {
        throw std::invalid_argument("scenario: " + arm + " sinusoid period must be positive");
      }
    }
    if (const auto* t = std::get_if<TableSchedule>(&scenario.means[i])) {
      if (static_cast<int>(t->values.size()) < scenario.horizon) {
        throw std::invalid_argument("scenario: " + arm + " value table has " +
                                    format_int(t->values.size()) + " entries, horizon is " +
                                    format_int(scenario.horizon));
      }
    }
  }
  if (const auto* per_day = std::get_if<std::vector<std::int64_t>>(&scenario.traffic)) {
    if (static_cast<int>(per_day->size()) < scenario.horizon) {
      throw std::invalid_argument("scenario: traffic list has " + format_int(per_day->size()) +
                                  " entries, horizon is " + format_int(scenario.horizon));
    }
  }
  for (int day = 1; day <= scenario.horizon; ++day) {
    if (traffic_at(scenario, day) < 1) {
      throw std::invalid_argument("scenario: traffic on day " + format_int(day) +
                                  " must be at least 1");
    }
    const auto mu = means_at(scenario, day);
    for (std::size_t i = 0; i < mu.size(); ++i) {
      if (!(mu[i] >= 0.0 && mu[i] <= 1.0)) {
        throw std::invalid_argument("scenario: mean of arm " + format_int(static_cast<int>(i) + 1) +
                                    " on day " + format_int(day) + " is " + format_double(mu[i]) +
                                    ", outside [0, 1]");
      }
    }
  }
}

// Canonical text form of a scenario; its FNV-1a hash ties traces to the exact
// configuration they were produced from.
inline std::string scenario_digest(const Scenario& scenario) {
  std::string d = "scenario|" + scenario.name + "|k=" + format_int(scenario.arm_count) +
                  "|T=" + format_int(scenario.horizon) + "|traffic=";
  if (const auto* constant = std::get_if<std::int64_t>(&scenario.traffic)) {
    d += format_int(*constant);
  } else {
    for (const auto n : std::get<std::vector<std::int64_t>>(scenario.traffic)) {
      d += format_int(n) + ",";
    }
  }
  for (const auto& schedule : scenario.means) {
    d += "|";
    if (const auto* c = std::get_if<ConstantSchedule>(&schedule)) {
      d += "constant:" + format_double(c->value);
    } else if (const auto* p = std::get_if<PiecewiseSchedule>(&schedule)) {
      d += "piecewise:";
      for (const auto& seg : p->segments) {
        d += format_int(seg.from_day) + ":" + format_double(seg.value) + ",";
      }
    } else if (const auto* s = std::get_if<SinusoidSchedule>(&schedule)) {
      d += "sinusoid:" + format_double(s->base) + "," + format_double(s->amplitude) + "," +
           format_double(s->period) + "," + format_double(s->phase);
    } else {
      d += "table:";
      for (const auto v : std::get<TableSchedule>(schedule).values) {
        d += format_double(v) + ",";
      }
    }
  }
  return d;
}

inline std::uint64_t scenario_hash(const Scenario& scenario) {
  return fnv1a64(scenario_digest(scenario));
}

// Traffic split over arms for one day. Probabilities must be non-negative and
// sum to one within kAllocationSumTolerance; the support is exactly the set of
// arms with positive probability.
struct Allocation {
  std::vector<double> probs;
  bool operator==(const Allocation&) const = default;
};

inline constexpr double kAllocationSumTolerance = 1e-12;

inline void validate_allocation(const Allocation& allocation) {
  if (allocation.probs.empty()) {
    throw std::invalid_argument("allocation: no arms");
  }
  double sum = 0.0;
  for (const double p : allocation.probs) {
    if (!(p >= 0.0)) {
      throw std::invalid_argument("allocation: probabilities must be non-negative");
    }
    sum += p;
  }
  if (std::abs(sum - 1.0) > kAllocationSumTolerance) {
    throw std::invalid_argument("allocation: probabilities sum to " + format_double(sum) +
                                ", expected 1");
  }
}

// One day of the experiment as the estimator sees it.
struct DayObservation {
  int day = 0;
  std::vector<std::int64_t> impressions;
  std::vector<std::int64_t> successes;
  Allocation allocation;

  bool operator==(const DayObservation&) const = default;
};

// Split `total` customers across arms with one multinomial draw, realized as a
// chain of conditional binomials. Zero-probability arms receive exactly zero
// and consume no randomness.
inline std::vector<std::int64_t> allocate_traffic(std::int64_t total,
                                                  const Allocation& allocation, Rng& rng) {
  validate_allocation(allocation);
  if (total < 1) {
    throw std::invalid_argument("allocate_traffic: total traffic must be at least 1");
  }
  const std::size_t k = allocation.probs.size();
  std::vector<std::int64_t> counts(k, 0);
  std::int64_t remaining = total;
  double mass_left = 1.0;
  for (std::size_t i = 0; i < k && remaining > 0; ++i) {
    const double p = allocation.probs[i];
    if (p <= 0.0) continue;
    if (p >= mass_left) {
      counts[i] += remaining;
      remaining = 0;
      break;
    }
    counts[i] = rng.binomial(remaining, p / mass_left);
    remaining -= counts[i];
    mass_left -= p;
  }
  if (remaining > 0) {
    // Float drift left a sliver of mass unassigned; give it to the last
    // positive-probability arm so the split always conserves traffic.
    for (std::size_t i = k; i-- > 0;) {
      if (allocation.probs[i] > 0.0) {
        counts[i] += remaining;
        break;
      }
    }
  }
  return counts;
}

// Sample one day: allocate the day's traffic, then draw each arm's successes
// as Binomial(impressions, true mean).
inline DayObservation sample_day(const Scenario& scenario, int day, const Allocation& allocation,
                                 Rng& rng) {
  const auto mu = means_at(scenario, day);
  if (allocation.probs.size() != mu.size()) {
    throw std::invalid_argument("sample_day: allocation has " +
                                format_int(allocation.probs.size()) + " arms, scenario has " +
                                format_int(mu.size()));
  }
  DayObservation obs;
  obs.day = day;
  obs.allocation = allocation;
  obs.impressions = allocate_traffic(traffic_at(scenario, day), allocation, rng);
  obs.successes.resize(mu.size());
  for (std::size_t i = 0; i < mu.size(); ++i) {
    obs.successes[i] = rng.binomial(obs.impressions[i], mu[i]);
  }
  return obs;
}

}  // namespace cumgain
