#pragma once

// Inverse-propensity estimation of cumulative gain from logged daily batches,
// the paired variance proxy, and the always-valid confidence radius that
// elimination decisions are made against.
//
// For arm i after day t the estimator is
//     ghat_i = sum over days s <= t with p_{i,s} > 0 of  r_{i,s} / p_{i,s},
// an unbiased estimate of the gain the arm would have earned had it served all
// traffic. The paired variance proxy for arms (i, j) accumulates
//     n_s * (muhat_i (1 - muhat_i) / p_{i,s} + muhat_j (1 - muhat_j) / p_{j,s})
// over the days where both arms had positive probability, a day's arm term
// dropping to zero when that arm saw no impressions.

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "cumgain/env.hpp"

namespace cumgain {

struct DayRecord {
  int day = 0;
  std::int64_t total_traffic = 0;
  std::vector<double> probs;
  std::vector<std::int64_t> impressions;
  std::vector<std::int64_t> successes;

  bool operator==(const DayRecord&) const = default;
};

// Value type folding one observation per day; update_gain returns the next
// state. Gains and the pairwise variance proxies are accumulated incrementally
// and always equal a from-scratch pass over `history` (same fold order, so
// bit-exact). All accumulation is in 64-bit floating point.
struct GainState {
  int arm_count = 0;
  int day = 0;  // days folded in so far
  std::vector<double> gains;
  std::vector<double> pair_var;  // arm_count * arm_count, upper triangle used
  std::vector<DayRecord> history;

  bool operator==(const GainState&) const = default;
};

inline GainState make_gain_state(int arm_count) {
  if (arm_count < 1) throw std::invalid_argument("make_gain_state: arm_count must be positive");
  GainState state;
  state.arm_count = arm_count;
  state.gains.assign(arm_count, 0.0);
  state.pair_var.assign(static_cast<std::size_t>(arm_count) * arm_count, 0.0);
  return state;
}

inline GainState update_gain(GainState state, const DayObservation& obs) {
  const int k = state.arm_count;
  if (static_cast<int>(obs.impressions.size()) != k ||
      static_cast<int>(obs.successes.size()) != k ||
      static_cast<int>(obs.allocation.probs.size()) != k) {
    throw std::invalid_argument("update_gain: observation arm count does not match state");
  }
  if (obs.day != state.day + 1) {
    throw std::logic_error("update_gain: expected day " + format_int(state.day + 1) + ", got " +
                           format_int(obs.day));
  }
  std::int64_t total = 0;
  for (int i = 0; i < k; ++i) {
    const double p = obs.allocation.probs[i];
    const std::int64_t n = obs.impressions[i];
    const std::int64_t r = obs.successes[i];
    if (n < 0 || r < 0 || r > n) {
      throw std::invalid_argument("update_gain: arm " + format_int(i + 1) +
                                  " has invalid impression/success counts");
    }
    if (p <= 0.0 && n > 0) {
      throw std::invalid_argument("update_gain: arm " + format_int(i + 1) +
                                  " has impressions but zero probability");
    }
    total += n;
  }

  // Inverse-propensity gain increments: a day's reward over the probability
  // the arm was served with. Arms at zero probability contribute nothing.
  for (int i = 0; i < k; ++i) {
    const double p = obs.allocation.probs[i];
    if (p > 0.0) {
      state.gains[i] += static_cast<double>(obs.successes[i]) / p;
    }
  }

  // Per-arm variance terms for this day; zero-impression arms contribute zero.
  std::vector<double> term(k, 0.0);
  for (int i = 0; i < k; ++i) {
    const double p = obs.allocation.probs[i];
    const std::int64_t n = obs.impressions[i];
    if (p > 0.0 && n > 0) {
      const double muhat =
          static_cast<double>(obs.successes[i]) / static_cast<double>(n);
      term[i] = muhat * (1.0 - muhat) / p;
    }
  }
  const double n_s = static_cast<double>(total);
  for (int i = 0; i < k; ++i) {
    if (!(obs.allocation.probs[i] > 0.0)) continue;
    for (int j = i + 1; j < k; ++j) {
      if (!(obs.allocation.probs[j] > 0.0)) continue;
      state.pair_var[static_cast<std::size_t>(i) * k + j] += n_s * (term[i] + term[j]);
    }
  }

  state.history.push_back(
      DayRecord{obs.day, total, obs.allocation.probs, obs.impressions, obs.successes});
  state.day = obs.day;
  return state;
}

// Accumulated variance proxy for the pair (i, j); symmetric in its arguments.
inline double pair_variance(const GainState& state, int i, int j) {
  const int k = state.arm_count;
  if (i < 0 || i >= k || j < 0 || j >= k) {
    throw std::out_of_range("pair_variance: arm index out of range");
  }
  if (i == j) throw std::invalid_argument("pair_variance: arms must be distinct");
  const int lo = i < j ? i : j;
  const int hi = i < j ? j : i;
  return state.pair_var[static_cast<std::size_t>(lo) * k + hi];
}

struct RadiusParams {
  double rho = 1.0;    // mixture weight; must be positive
  double delta = 0.1;  // error budget in (0, 1]

  bool operator==(const RadiusParams&) const = default;
};

// Any-time valid width for a gain difference at accumulated variance proxy V:
//     sqrt((V + rho) * log((V + rho) / (rho * delta^2)))
// Non-decreasing in V and non-increasing in delta on (0, 1].
inline double confidence_radius(double variance_sum, const RadiusParams& params) {
  if (!(params.rho > 0.0)) {
    throw std::invalid_argument("confidence_radius: rho must be positive");
  }
  if (!(params.delta > 0.0 && params.delta <= 1.0)) {
    throw std::invalid_argument("confidence_radius: delta must lie in (0, 1]");
  }
  if (!(variance_sum >= 0.0)) {
    throw std::invalid_argument("confidence_radius: variance must be non-negative");
  }
  const double a = variance_sum + params.rho;
  return std::sqrt(a * std::log(a / (params.rho * params.delta * params.delta)));
}

// True exactly when `leader` dominates `trailing` beyond the radius:
// ghat_leader - ghat_trailing - radius > 0, strictly.
inline bool should_eliminate(const GainState& state, int leader, int trailing,
                             const RadiusParams& params) {
  const double radius = confidence_radius(pair_variance(state, leader, trailing), params);
  return state.gains[leader] - state.gains[trailing] - radius > 0.0;
}

// Pooled success rate of one arm over the whole history: sum r / sum n.
// This is the quantity a naive end-of-experiment readout would report.
inline double running_empirical_mean(const GainState& state, int arm) {
  if (arm < 0 || arm >= state.arm_count) {
    throw std::out_of_range("running_empirical_mean: arm index out of range");
  }
  std::int64_t impressions = 0;
  std::int64_t successes = 0;
  for (const auto& rec : state.history) {
    impressions += rec.impressions[arm];
    successes += rec.successes[arm];
  }
  if (impressions == 0) {
    throw std::domain_error("running_empirical_mean: arm " + format_int(arm + 1) +
                            " has no impressions");
  }
  return static_cast<double>(successes) / static_cast<double>(impressions);
}

}  // namespace cumgain
