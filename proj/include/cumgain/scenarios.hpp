#pragma once

// Built-in scenarios. All numbers here are synthetic; case_study in
// particular was tuned by hand until the qualitative pattern it exists to
// demonstrate shows up reliably (see its comment).

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cumgain/env.hpp"

namespace cumgain {

struct NamedScenario {
  Scenario scenario;
  std::string description;
};

inline std::vector<NamedScenario> builtin_scenarios() {
  std::vector<NamedScenario> all;

  // Two messages over two weeks. The test launches alongside a three-day
  // sale event (heavy traffic, the two messages performing the same), then
  // drops to a small everyday slice. From day 4 message 2 rides a topical
  // spike and beats message 1 on nearly every daily comparison; from day 12
  // the spike is stale and its rate collapses. Pooled running means still
  // favor message 1 at day 14 -- the heavy identical-rate anchor plus the
  // collapse swamp the spike -- while the daily comparisons say the
  // opposite. A posterior-pooling allocator believes the pooled read and
  // shifts traffic to message 1. Numbers were tuned by simulation until this
  // reversal shows up in well over half of the runs.
  {
    Scenario s;
    s.name = "case_study";
    s.arm_count = 2;
    s.horizon = 14;
    s.means = {
        ConstantSchedule{0.32},
        PiecewiseSchedule{{{1, 0.318}, {4, 0.41}, {12, 0.02}}},
    };
    s.traffic = std::vector<std::int64_t>{16600, 15800, 15600, 470, 440, 460, 430,
                                          450, 420, 480, 440, 450, 430, 410};
    all.push_back({std::move(s),
                   "two arms, 14 days; daily means favor arm 2 mid-experiment but the pooled "
                   "readout favors arm 1"});
  }

  // Three stationary arms with 0.05 gaps; the standard identification check.
  {
    Scenario s;
    s.name = "stationary_3arm";
    s.arm_count = 3;
    s.horizon = 200;
    s.means = {ConstantSchedule{0.5}, ConstantSchedule{0.45}, ConstantSchedule{0.4}};
    s.traffic = std::int64_t{2000};
    all.push_back({std::move(s), "three stationary arms at 0.5/0.45/0.4, 2000 impressions per day"});
  }

  // A gap so wide that elimination should land within a few days.
  {
    Scenario s;
    s.name = "stationary_2arm_easy";
    s.arm_count = 2;
    s.horizon = 20;
    s.means = {ConstantSchedule{0.9}, ConstantSchedule{0.1}};
    s.traffic = std::int64_t{10000};
    all.push_back({std::move(s), "two stationary arms at 0.9/0.1, 10000 impressions per day"});
  }

  return all;
}

inline std::optional<Scenario> builtin_scenario(std::string_view name) {
  for (auto& named : builtin_scenarios()) {
    if (named.scenario.name == name) return std::move(named.scenario);
  }
  return std::nullopt;
}

}  // namespace cumgain
