#include "cumgain/policies.hpp"

#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>

#include <gtest/gtest.h>

namespace cumgain {
namespace {

DayObservation obs(int day, std::vector<double> probs, std::vector<std::int64_t> n,
                   std::vector<std::int64_t> r) {
  DayObservation o;
  o.day = day;
  o.allocation.probs = std::move(probs);
  o.impressions = std::move(n);
  o.successes = std::move(r);
  return o;
}

TEST(PolicyNames, RoundTrip) {
  EXPECT_EQ(policy_name(PolicyKind::secg), "secg");
  EXPECT_EQ(policy_name(PolicyKind::thompson), "thompson");
  EXPECT_EQ(policy_name(PolicyKind::uniform), "uniform");
  EXPECT_EQ(policy_kind_from("secg"), PolicyKind::secg);
  EXPECT_EQ(policy_kind_from("thompson"), PolicyKind::thompson);
  EXPECT_EQ(policy_kind_from("uniform"), PolicyKind::uniform);
  EXPECT_EQ(policy_kind_from("egreedy"), std::nullopt);
}

TEST(PolicyConfigValidation, RejectsOutOfRangeKnobs) {
  PolicyConfig config;
  validate_policy(config);  // defaults are fine
  config.delta = 1.0;
  EXPECT_THROW(validate_policy(config), std::invalid_argument);
  config.delta = 0.0;
  EXPECT_THROW(validate_policy(config), std::invalid_argument);
  config = PolicyConfig{};
  config.rho = 0.0;
  EXPECT_THROW(validate_policy(config), std::invalid_argument);
  config = PolicyConfig{};
  config.settling_days = 0;
  EXPECT_THROW(validate_policy(config), std::invalid_argument);
  config = PolicyConfig{};
  config.mc_draws = 0;
  EXPECT_THROW(validate_policy(config), std::invalid_argument);
}

TEST(SecgAllocation, UniformOverActiveSet) {
  SecgState state = make_secg(4);
  EXPECT_EQ(secg_allocation(state).probs, (std::vector<double>{0.25, 0.25, 0.25, 0.25}));

  state = make_secg(3);
  state.active = {false, true, false};
  EXPECT_EQ(secg_allocation(state).probs, (std::vector<double>{0.0, 1.0, 0.0}));
  state.active = {true, false, true};
  EXPECT_EQ(secg_allocation(state).probs, (std::vector<double>{0.5, 0.0, 0.5}));
}

TEST(SecgAllocation, SupportEqualsActiveSet) {
  SecgState state = make_secg(5);
  state.active = {true, false, true, false, true};
  const Allocation allocation = secg_allocation(state);
  validate_allocation(allocation);
  for (std::size_t i = 0; i < state.active.size(); ++i) {
    EXPECT_EQ(allocation.probs[i] > 0.0, static_cast<bool>(state.active[i]));
  }
}

TEST(Secg, NoEliminationDuringSettling) {
  // overwhelming gap on day 1, but tau = 2 blocks the pass
  SecgState state = make_secg(2, SecgParams{0.1, 1.0, 2});
  state = secg_update(std::move(state), obs(1, {0.5, 0.5}, {500, 500}, {500, 0}));
  EXPECT_EQ(state.active, (std::vector<bool>{true, true}));
  EXPECT_FALSE(secg_finished(state).has_value());
  // day 2 is past the gate; the same evidence now eliminates
  state = secg_update(std::move(state), obs(2, {0.5, 0.5}, {500, 500}, {500, 0}));
  EXPECT_EQ(state.active, (std::vector<bool>{true, false}));
  ASSERT_TRUE(secg_finished(state).has_value());
  EXPECT_EQ(*secg_finished(state), 0);
}

TEST(Secg, SimultaneousCascadeDropsAllDominatedArms) {
  // arm 3 dominates both others past the radius; everything falls in one pass
  SecgState state = make_secg(3, SecgParams{0.1, 1.0, 1});
  state = secg_update(std::move(state),
                      obs(1, {1.0 / 3, 1.0 / 3, 1.0 / 3}, {300, 300, 300}, {0, 30, 300}));
  EXPECT_EQ(state.active, (std::vector<bool>{false, false, true}));
  ASSERT_TRUE(secg_finished(state).has_value());
  EXPECT_EQ(*secg_finished(state), 2);
}

TEST(Secg, TiesSurvive) {
  SecgState state = make_secg(2, SecgParams{0.1, 1.0, 1});
  for (int day = 1; day <= 10; ++day) {
    state = secg_update(std::move(state), obs(day, {0.5, 0.5}, {100, 100}, {40, 40}));
    ASSERT_EQ(state.active, (std::vector<bool>{true, true}));
  }
  EXPECT_FALSE(secg_finished(state).has_value());
}

TEST(Secg, ActiveSetIsMonotone) {
  SecgState state = make_secg(3, SecgParams{0.1, 1.0, 1});
  std::vector<bool> previous = state.active;
  Rng rng(11);
  for (int day = 1; day <= 30; ++day) {
    const Allocation allocation = secg_allocation(state);
    std::vector<std::int64_t> n(3, 0), r(3, 0);
    for (int i = 0; i < 3; ++i) {
      if (allocation.probs[i] > 0.0) {
        n[i] = 200;
        r[i] = rng.binomial(200, 0.2 + 0.2 * i);
      }
    }
    state = secg_update(std::move(state), obs(day, allocation.probs, std::move(n), std::move(r)));
    for (std::size_t i = 0; i < 3; ++i) {
      // once out, never back in
      EXPECT_TRUE(previous[i] || !state.active[i]);
    }
    previous = state.active;
  }
}

TEST(Secg, RejectsBadConstruction) {
  EXPECT_THROW(make_secg(1), std::invalid_argument);
  EXPECT_THROW(make_secg(2, SecgParams{1.0, 1.0, 2}), std::invalid_argument);
  EXPECT_THROW(make_secg(2, SecgParams{0.1, 0.0, 2}), std::invalid_argument);
  EXPECT_THROW(make_secg(2, SecgParams{0.1, 1.0, 0}), std::invalid_argument);
}

TEST(Thompson, SymmetricPriorsSplitEvenly) {
  const ThompsonState state = make_thompson(2, 100000);
  Rng rng(31337);
  const Allocation allocation = thompson_allocation(state, rng);
  validate_allocation(allocation);
  EXPECT_NEAR(allocation.probs[0], 0.5, 0.01);
  EXPECT_NEAR(allocation.probs[1], 0.5, 0.01);
}

TEST(Thompson, LopsidedPosteriorsConcentrate) {
  ThompsonState state = make_thompson(2, 10000);
  state.alpha = {1000.0, 10.0};
  state.beta = {10.0, 1000.0};
  Rng rng(7);
  const Allocation allocation = thompson_allocation(state, rng);
  EXPECT_GT(allocation.probs[0], 0.999);
}

TEST(Thompson, SingleArmGetsEverything) {
  const ThompsonState state = make_thompson(1, 100);
  Rng rng(5);
  EXPECT_EQ(thompson_allocation(state, rng).probs, (std::vector<double>{1.0}));
}

TEST(Thompson, DeterministicGivenSeed) {
  const ThompsonState state = make_thompson(3, 10000);
  Rng a(123), b(123);
  EXPECT_EQ(thompson_allocation(state, a), thompson_allocation(state, b));
}

TEST(Thompson, ConjugateUpdate) {
  ThompsonState state = make_thompson(2, 100);
  state = thompson_update(std::move(state), obs(1, {0.5, 0.5}, {10, 0}, {3, 0}));
  EXPECT_DOUBLE_EQ(state.alpha[0], 4.0);
  EXPECT_DOUBLE_EQ(state.beta[0], 8.0);
  // zero-impression arm unchanged
  EXPECT_DOUBLE_EQ(state.alpha[1], 1.0);
  EXPECT_DOUBLE_EQ(state.beta[1], 1.0);
  // additive across days
  state = thompson_update(std::move(state), obs(2, {0.5, 0.5}, {5, 2}, {5, 1}));
  EXPECT_DOUBLE_EQ(state.alpha[0], 9.0);
  EXPECT_DOUBLE_EQ(state.beta[0], 8.0);
  EXPECT_DOUBLE_EQ(state.alpha[1], 2.0);
  EXPECT_DOUBLE_EQ(state.beta[1], 2.0);
}

TEST(Thompson, RejectsInvalidCounts) {
  ThompsonState state = make_thompson(2, 100);
  EXPECT_THROW(thompson_update(state, obs(1, {0.5, 0.5}, {10, 0}, {11, 0})),
               std::invalid_argument);
  EXPECT_THROW(thompson_update(state, obs(1, {0.5, 0.5}, {10}, {3})), std::invalid_argument);
}

TEST(UniformAllocation, EqualWeights) {
  EXPECT_EQ(uniform_allocation(2).probs, (std::vector<double>{0.5, 0.5}));
  EXPECT_EQ(uniform_allocation(1).probs, (std::vector<double>{1.0}));
  const Allocation five = uniform_allocation(5);
  validate_allocation(five);
  for (const double p : five.probs) EXPECT_DOUBLE_EQ(p, 0.2);
  EXPECT_THROW(uniform_allocation(0), std::invalid_argument);
}

}  // namespace
}  // namespace cumgain
