#pragma once

// Allocation policies. Successive elimination on cumulative gain splits
// traffic uniformly over the arms still standing and permanently removes an
// arm once another active arm's estimated gain exceeds its own by more than
// the pairwise confidence radius (run at delta / arm_count). Batched Thompson
// sampling allocates by posterior win probability and never eliminates; the
// uniform baseline just splits evenly.

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "cumgain/estimation.hpp"

namespace cumgain {

enum class PolicyKind { secg, thompson, uniform };

inline std::string policy_name(PolicyKind kind) {
  switch (kind) {
    case PolicyKind::secg: return "secg";
    case PolicyKind::thompson: return "thompson";
    case PolicyKind::uniform: return "uniform";
  }
  throw std::logic_error("policy_name: unknown kind");
}

inline std::optional<PolicyKind> policy_kind_from(std::string_view name) {
  if (name == "secg") return PolicyKind::secg;
  if (name == "thompson") return PolicyKind::thompson;
  if (name == "uniform") return PolicyKind::uniform;
  return std::nullopt;
}

// Hyperparameters for any policy; fields irrelevant to a given kind are
// simply unused. This mirrors the flat run configuration surface.
struct PolicyConfig {
  PolicyKind kind = PolicyKind::secg;
  double delta = 0.1;     // overall error budget (secg)
  double rho = 1.0;       // radius mixture weight (secg)
  int settling_days = 2;  // no eliminations before this day (secg)
  int mc_draws = 10000;   // Monte Carlo draws per allocation (thompson)

  bool operator==(const PolicyConfig&) const = default;
};

inline void validate_policy(const PolicyConfig& policy) {
  if (!(policy.delta > 0.0 && policy.delta < 1.0)) {
    throw std::invalid_argument("policy: delta must lie in (0, 1)");
  }
  if (!(policy.rho > 0.0)) {
    throw std::invalid_argument("policy: rho must be positive");
  }
  if (policy.settling_days < 1) {
    throw std::invalid_argument("policy: settling_days must be at least 1");
  }
  if (policy.mc_draws < 1) {
    throw std::invalid_argument("policy: mc_draws must be at least 1");
  }
}

struct SecgParams {
  double delta = 0.1;
  double rho = 1.0;
  int settling_days = 2;

  bool operator==(const SecgParams&) const = default;
};

struct SecgState {
  SecgParams params;
  std::vector<bool> active;
  GainState gain;

  bool operator==(const SecgState&) const = default;
};

inline SecgState make_secg(int arm_count, const SecgParams& params = {}) {
  if (arm_count < 2) throw std::invalid_argument("make_secg: need at least 2 arms");
  if (!(params.delta > 0.0 && params.delta < 1.0)) {
    throw std::invalid_argument("make_secg: delta must lie in (0, 1)");
  }
  if (!(params.rho > 0.0)) throw std::invalid_argument("make_secg: rho must be positive");
  if (params.settling_days < 1) {
    throw std::invalid_argument("make_secg: settling_days must be at least 1");
  }
  SecgState state;
  state.params = params;
  state.active.assign(arm_count, true);
  state.gain = make_gain_state(arm_count);
  return state;
}

// Uniform over the arms still active.
inline Allocation secg_allocation(const SecgState& state) {
  int active_count = 0;
  for (const bool a : state.active) active_count += a ? 1 : 0;
  Allocation allocation;
  allocation.probs.assign(state.active.size(), 0.0);
  for (std::size_t i = 0; i < state.active.size(); ++i) {
    if (state.active[i]) allocation.probs[i] = 1.0 / active_count;
  }
  return allocation;
}

// Fold in one day and, once past the settling period, run a single
// elimination pass: every active arm is tested against the active set as it
// stood at the start of the pass, and all dominated arms drop together. The
// pairwise radius runs at delta / arm_count. Eliminated arms stay eliminated.
inline SecgState secg_update(SecgState state, const DayObservation& obs) {
  state.gain = update_gain(std::move(state.gain), obs);
  if (obs.day >= state.params.settling_days) {
    const int k = state.gain.arm_count;
    const RadiusParams pairwise{state.params.rho, state.params.delta / k};
    std::vector<bool> keep = state.active;
    for (int j = 0; j < k; ++j) {
      if (!state.active[j]) continue;
      for (int i = 0; i < k; ++i) {
        if (i == j || !state.active[i]) continue;
        if (should_eliminate(state.gain, i, j, pairwise)) {
          keep[j] = false;
          break;
        }
      }
    }
    state.active = std::move(keep);
  }
  return state;
}

// The winner once exactly one arm remains, otherwise nothing.
inline std::optional<int> secg_finished(const SecgState& state) {
  int active_count = 0;
  int last = -1;
  for (std::size_t i = 0; i < state.active.size(); ++i) {
    if (state.active[i]) {
      ++active_count;
      last = static_cast<int>(i);
    }
  }
  if (active_count == 1) return last;
  return std::nullopt;
}

// Beta-Bernoulli posteriors, one per arm, updated on daily batch totals.
struct ThompsonState {
  std::vector<double> alpha;
  std::vector<double> beta;
  int mc_draws = 10000;

  bool operator==(const ThompsonState&) const = default;
};

inline ThompsonState make_thompson(int arm_count, int mc_draws = 10000) {
  if (arm_count < 1) throw std::invalid_argument("make_thompson: arm_count must be positive");
  if (mc_draws < 1) throw std::invalid_argument("make_thompson: mc_draws must be positive");
  ThompsonState state;
  state.alpha.assign(arm_count, 1.0);
  state.beta.assign(arm_count, 1.0);
  state.mc_draws = mc_draws;
  return state;
}

// Posterior probability of being the best arm, estimated with mc_draws Monte
// Carlo rounds: each round samples every posterior once and credits the
// strictly largest draw (ties go to the lowest index). Fractions of mc_draws,
// so an arm's probability can resolve to exactly zero.
inline Allocation thompson_allocation(const ThompsonState& state, Rng& rng) {
  const std::size_t k = state.alpha.size();
  std::vector<std::int64_t> wins(k, 0);
  for (int draw = 0; draw < state.mc_draws; ++draw) {
    std::size_t best = 0;
    double best_sample = -1.0;
    for (std::size_t i = 0; i < k; ++i) {
      const double sample = rng.beta(state.alpha[i], state.beta[i]);
      if (sample > best_sample) {
        best_sample = sample;
        best = i;
      }
    }
    ++wins[best];
  }
  Allocation allocation;
  allocation.probs.resize(k);
  for (std::size_t i = 0; i < k; ++i) {
    allocation.probs[i] =
        static_cast<double>(wins[i]) / static_cast<double>(state.mc_draws);
  }
  return allocation;
}

// Conjugate update on the day's totals: alpha += successes, beta += failures.
inline ThompsonState thompson_update(ThompsonState state, const DayObservation& obs) {
  const std::size_t k = state.alpha.size();
  if (obs.impressions.size() != k || obs.successes.size() != k) {
    throw std::invalid_argument("thompson_update: observation arm count does not match state");
  }
  for (std::size_t i = 0; i < k; ++i) {
    const std::int64_t n = obs.impressions[i];
    const std::int64_t r = obs.successes[i];
    if (n < 0 || r < 0 || r > n) {
      throw std::invalid_argument("thompson_update: arm " + format_int(i + 1) +
                                  " has invalid impression/success counts");
    }
    state.alpha[i] += static_cast<double>(r);
    state.beta[i] += static_cast<double>(n - r);
  }
  return state;
}

inline Allocation uniform_allocation(int arm_count) {
  if (arm_count < 1) throw std::invalid_argument("uniform_allocation: arm_count must be positive");
  Allocation allocation;
  allocation.probs.assign(arm_count, 1.0 / arm_count);
  return allocation;
}

}  // namespace cumgain
