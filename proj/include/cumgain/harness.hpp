#pragma once

// Experiment harness: run a policy against a scenario day by day, record a
// complete trace, and evaluate it afterwards against the scenario's ground
// truth -- counterfactual gains, regret, identification, paradox detection,
// and multi-seed sweeps.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cumgain/errors.hpp"
#include "cumgain/policies.hpp"

namespace cumgain {

// One recorded day: the allocation actually used, what was observed, the
// estimated gains after folding the day in, and the arm set the allocation
// was drawn from (start of day; under successive elimination the allocation's
// support equals this set).
struct TraceDay {
  int day = 0;
  Allocation allocation;
  std::vector<std::int64_t> impressions;
  std::vector<std::int64_t> successes;
  std::vector<double> gains;
  std::vector<bool> active;

  bool operator==(const TraceDay&) const = default;
};

enum class RunStatus { winner, inconclusive };

inline std::string run_status_name(RunStatus status) {
  return status == RunStatus::winner ? "winner" : "inconclusive";
}

// Everything needed to recompute any metric offline. Days are contiguous from
// 1 to stopping_day; `winner` is a 0-based arm index, -1 when inconclusive.
struct Trace {
  std::string scenario_name;
  std::uint64_t scenario_hash = 0;
  PolicyConfig policy;
  std::uint64_t seed = 0;
  int arm_count = 0;
  int horizon = 0;
  std::vector<TraceDay> days;
  RunStatus status = RunStatus::inconclusive;
  int winner = -1;
  int stopping_day = 0;

  bool operator==(const Trace&) const = default;
};

// Run one experiment from a fresh rng stream: each day ask the policy for an
// allocation, sample the day, fold the observation into the estimator and the
// policy, and stop early if the policy has settled on a winner. Configuration
// problems surface before day 1.
inline Trace run_experiment(const Scenario& scenario, const PolicyConfig& policy,
                            std::uint64_t seed) {
  validate_scenario(scenario);
  validate_policy(policy);
  const int k = scenario.arm_count;

  Rng rng(seed);
  GainState gain = make_gain_state(k);
  std::optional<SecgState> secg;
  std::optional<ThompsonState> thompson;
  if (policy.kind == PolicyKind::secg) {
    secg = make_secg(k, SecgParams{policy.delta, policy.rho, policy.settling_days});
  } else if (policy.kind == PolicyKind::thompson) {
    thompson = make_thompson(k, policy.mc_draws);
  }

  Trace trace;
  trace.scenario_name = scenario.name;
  trace.scenario_hash = scenario_hash(scenario);
  trace.policy = policy;
  trace.seed = seed;
  trace.arm_count = k;
  trace.horizon = scenario.horizon;

  const std::vector<bool> all_active(k, true);
  for (int day = 1; day <= scenario.horizon; ++day) {
    Allocation allocation;
    std::vector<bool> active = all_active;
    switch (policy.kind) {
      case PolicyKind::secg:
        allocation = secg_allocation(*secg);
        active = secg->active;
        break;
      case PolicyKind::thompson:
        allocation = thompson_allocation(*thompson, rng);
        break;
      case PolicyKind::uniform:
        allocation = uniform_allocation(k);
        break;
    }

    const DayObservation obs = sample_day(scenario, day, allocation, rng);
    gain = update_gain(std::move(gain), obs);
    if (secg) *secg = secg_update(std::move(*secg), obs);
    if (thompson) *thompson = thompson_update(std::move(*thompson), obs);

    trace.days.push_back(TraceDay{day, allocation, obs.impressions, obs.successes, gain.gains,
                                  std::move(active)});
    trace.stopping_day = day;

    if (secg) {
      if (const auto winner = secg_finished(*secg)) {
        trace.status = RunStatus::winner;
        trace.winner = *winner;
        return trace;
      }
    }
  }
  trace.status = RunStatus::inconclusive;
  trace.winner = -1;
  return trace;
}

// Ground-truth evaluation of one trace.
//
// true_gains are full-horizon: G_i = sum over all scenario days of n_t * mu_i.
// The counterfactual best arm is their argmax (ties to the lowest index).
// Regret is expected, not realized: the best arm's true gain minus the mean
// reward of the traffic as actually allocated; when a run stops early with a
// winner, the remaining days are accounted as if all traffic went to that
// winner, which is what deploying the decision means.
struct RunMetrics {
  std::vector<double> true_gains;
  int counterfactual_best = 0;
  double regret = 0.0;
  std::optional<int> winner;
  bool identified_correct = false;
  int stopping_day = 0;
  std::vector<double> gaps;  // (G_best - G_i) / total traffic

  bool operator==(const RunMetrics&) const = default;
};

inline RunMetrics compute_metrics(const Trace& trace, const Scenario& scenario) {
  if (scenario_hash(scenario) != trace.scenario_hash) {
    throw integrity_error("compute_metrics: trace was not produced from this scenario (hash mismatch)");
  }
  const int k = scenario.arm_count;

  RunMetrics metrics;
  metrics.true_gains.assign(k, 0.0);
  std::int64_t total_traffic = 0;
  for (int day = 1; day <= scenario.horizon; ++day) {
    const auto mu = means_at(scenario, day);
    const auto n = traffic_at(scenario, day);
    total_traffic += n;
    for (int i = 0; i < k; ++i) {
      metrics.true_gains[i] += static_cast<double>(n) * mu[i];
    }
  }
  metrics.counterfactual_best = 0;
  for (int i = 1; i < k; ++i) {
    if (metrics.true_gains[i] > metrics.true_gains[metrics.counterfactual_best]) {
      metrics.counterfactual_best = i;
    }
  }

  double realized = 0.0;
  for (const auto& rec : trace.days) {
    const auto mu = means_at(scenario, rec.day);
    for (int i = 0; i < k; ++i) {
      realized += static_cast<double>(rec.impressions[i]) * mu[i];
    }
  }
  if (trace.status == RunStatus::winner) {
    for (int day = trace.stopping_day + 1; day <= scenario.horizon; ++day) {
      realized += static_cast<double>(traffic_at(scenario, day)) *
                  means_at(scenario, day)[trace.winner];
    }
  }
  metrics.regret = metrics.true_gains[metrics.counterfactual_best] - realized;

  metrics.gaps.assign(k, 0.0);
  for (int i = 0; i < k; ++i) {
    metrics.gaps[i] = (metrics.true_gains[metrics.counterfactual_best] - metrics.true_gains[i]) /
                      static_cast<double>(total_traffic);
  }

  if (trace.status == RunStatus::winner) {
    metrics.winner = trace.winner;
    metrics.identified_correct = trace.winner == metrics.counterfactual_best;
  }
  metrics.stopping_day = trace.stopping_day;
  return metrics;
}

// Day-level vs pooled disagreement for a pair of arms: a paradox day is one
// where the sign of the daily empirical mean difference contradicts the sign
// of the pooled (running) mean difference at that same day. Days where either
// arm has no impressions have no daily mean and are skipped but counted.
struct PairParadox {
  int arm_i = 0;
  int arm_j = 0;
  std::vector<int> paradox_days;
  std::vector<int> skipped_days;
  int compared_days = 0;  // days where both signs were defined and nonzero
  double paradox_fraction = 0.0;

  bool operator==(const PairParadox&) const = default;
};

struct SimpsonsReport {
  std::vector<PairParadox> pairs;

  bool operator==(const SimpsonsReport&) const = default;
};

inline SimpsonsReport detect_simpsons(const Trace& trace) {
  const int k = trace.arm_count;
  SimpsonsReport report;
  for (int i = 0; i < k; ++i) {
    for (int j = i + 1; j < k; ++j) {
      PairParadox pair;
      pair.arm_i = i;
      pair.arm_j = j;
      std::int64_t pooled_n_i = 0, pooled_r_i = 0, pooled_n_j = 0, pooled_r_j = 0;
      for (const auto& rec : trace.days) {
        pooled_n_i += rec.impressions[i];
        pooled_r_i += rec.successes[i];
        pooled_n_j += rec.impressions[j];
        pooled_r_j += rec.successes[j];
        if (rec.impressions[i] == 0 || rec.impressions[j] == 0) {
          pair.skipped_days.push_back(rec.day);
          continue;
        }
        const double daily_diff =
            static_cast<double>(rec.successes[i]) / static_cast<double>(rec.impressions[i]) -
            static_cast<double>(rec.successes[j]) / static_cast<double>(rec.impressions[j]);
        const double pooled_diff =
            static_cast<double>(pooled_r_i) / static_cast<double>(pooled_n_i) -
            static_cast<double>(pooled_r_j) / static_cast<double>(pooled_n_j);
        if (daily_diff == 0.0 || pooled_diff == 0.0) continue;
        ++pair.compared_days;
        if ((daily_diff > 0.0) != (pooled_diff > 0.0)) {
          pair.paradox_days.push_back(rec.day);
        }
      }
      pair.paradox_fraction =
          pair.compared_days > 0
              ? static_cast<double>(pair.paradox_days.size()) / pair.compared_days
              : 0.0;
      report.pairs.push_back(std::move(pair));
    }
  }
  return report;
}

// Two-sided two-proportion z-test with pooled variance; returns the p-value
// via the complementary error function. A zero standard error (identical
// degenerate proportions) reports p = 1.
inline double two_sample_z_test(std::int64_t successes1, std::int64_t trials1,
                                std::int64_t successes2, std::int64_t trials2) {
  if (trials1 <= 0 || trials2 <= 0) {
    throw std::invalid_argument("two_sample_z_test: trial counts must be positive");
  }
  if (successes1 < 0 || successes1 > trials1 || successes2 < 0 || successes2 > trials2) {
    throw std::invalid_argument("two_sample_z_test: successes must lie in [0, trials]");
  }
  const double p1 = static_cast<double>(successes1) / static_cast<double>(trials1);
  const double p2 = static_cast<double>(successes2) / static_cast<double>(trials2);
  const double pooled = static_cast<double>(successes1 + successes2) /
                        static_cast<double>(trials1 + trials2);
  const double se = std::sqrt(pooled * (1.0 - pooled) *
                              (1.0 / static_cast<double>(trials1) +
                               1.0 / static_cast<double>(trials2)));
  if (se == 0.0) return 1.0;
  const double z = (p1 - p2) / se;
  return std::erfc(std::abs(z) / std::sqrt(2.0));
}

// Whether the trace ever saw |(ghat_i - ghat_j) - (G_i - G_j)| reach the
// confidence radius, over any day and any pair of arms. A pair is only
// checkable while the estimator is unbiased for it, i.e. while both arms have
// had positive probability on every day so far; once either arm sits a day
// at zero probability the pair drops out of the check.
inline bool anytime_coverage_violated(const Trace& trace, const Scenario& scenario,
                                      const RadiusParams& params) {
  if (scenario_hash(scenario) != trace.scenario_hash) {
    throw integrity_error("anytime_coverage_violated: trace/scenario hash mismatch");
  }
  const int k = scenario.arm_count;
  GainState gain = make_gain_state(k);
  std::vector<double> true_gain(k, 0.0);
  std::vector<bool> covered(static_cast<std::size_t>(k) * k, true);
  for (const auto& rec : trace.days) {
    DayObservation obs{rec.day, rec.impressions, rec.successes, rec.allocation};
    gain = update_gain(std::move(gain), obs);
    const auto mu = means_at(scenario, rec.day);
    const auto n = static_cast<double>(traffic_at(scenario, rec.day));
    for (int i = 0; i < k; ++i) true_gain[i] += n * mu[i];
    for (int i = 0; i < k; ++i) {
      for (int j = i + 1; j < k; ++j) {
        if (!(rec.allocation.probs[i] > 0.0 && rec.allocation.probs[j] > 0.0)) {
          covered[static_cast<std::size_t>(i) * k + j] = false;
        }
        if (!covered[static_cast<std::size_t>(i) * k + j]) continue;
        const double estimated = gain.gains[i] - gain.gains[j];
        const double truth = true_gain[i] - true_gain[j];
        const double radius = confidence_radius(pair_variance(gain, i, j), params);
        if (std::abs(estimated - truth) >= radius) return true;
      }
    }
  }
  return false;
}

// Multi-seed aggregates. Rates are fractions of seeds; stopping-day stats are
// over all seeds (median of an even count is the mean of the two middle
// values); coverage violations are evaluated at the policy's own delta/rho.
struct SweepSummary {
  std::vector<std::uint64_t> seeds;
  std::vector<RunMetrics> per_seed;
  double correct_rate = 0.0;
  double incorrect_rate = 0.0;
  double inconclusive_rate = 0.0;
  double mean_stopping_day = 0.0;
  double median_stopping_day = 0.0;
  double mean_regret = 0.0;
  double coverage_violation_rate = 0.0;
};

inline void aggregate_sweep(SweepSummary& summary) {
  const std::size_t m = summary.per_seed.size();
  if (m == 0) return;
  std::size_t correct = 0, incorrect = 0, inconclusive = 0;
  double stop_sum = 0.0, regret_sum = 0.0;
  std::vector<int> stops;
  stops.reserve(m);
  for (const auto& metrics : summary.per_seed) {
    if (!metrics.winner) {
      ++inconclusive;
    } else if (metrics.identified_correct) {
      ++correct;
    } else {
      ++incorrect;
    }
    stop_sum += metrics.stopping_day;
    regret_sum += metrics.regret;
    stops.push_back(metrics.stopping_day);
  }
  std::sort(stops.begin(), stops.end());
  summary.correct_rate = static_cast<double>(correct) / m;
  summary.incorrect_rate = static_cast<double>(incorrect) / m;
  summary.inconclusive_rate = static_cast<double>(inconclusive) / m;
  summary.mean_stopping_day = stop_sum / m;
  summary.median_stopping_day =
      m % 2 == 1 ? stops[m / 2] : 0.5 * (stops[m / 2 - 1] + stops[m / 2]);
  summary.mean_regret = regret_sum / m;
}

inline SweepSummary sweep(const Scenario& scenario, const PolicyConfig& policy,
                          const std::vector<std::uint64_t>& seeds) {
  if (seeds.empty()) throw std::invalid_argument("sweep: need at least one seed");
  SweepSummary summary;
  summary.seeds = seeds;
  std::size_t violations = 0;
  for (const auto seed : seeds) {
    const Trace trace = run_experiment(scenario, policy, seed);
    summary.per_seed.push_back(compute_metrics(trace, scenario));
    if (anytime_coverage_violated(trace, scenario, RadiusParams{policy.rho, policy.delta})) {
      ++violations;
    }
  }
  aggregate_sweep(summary);
  summary.coverage_violation_rate = static_cast<double>(violations) / seeds.size();
  return summary;
}

}  // namespace cumgain
