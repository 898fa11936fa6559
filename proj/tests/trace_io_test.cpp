#include "cumgain/trace_io.hpp"

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <string>

#include <gtest/gtest.h>

namespace cumgain {
namespace {

Scenario two_arm_constant(double mu1, double mu2, std::int64_t traffic, int horizon) {
  Scenario s;
  s.name = "test";
  s.arm_count = 2;
  s.horizon = horizon;
  s.means = {ConstantSchedule{mu1}, ConstantSchedule{mu2}};
  s.traffic = traffic;
  return s;
}

std::string fresh_dir(const std::string& tag) {
  const auto dir = std::filesystem::path(::testing::TempDir()) / ("cumgain_" + tag);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir.string();
}

PolicyConfig uniform_policy() {
  PolicyConfig policy;
  policy.kind = PolicyKind::uniform;
  return policy;
}

TEST(TraceCsv, GoldenLayout) {
  const Scenario s = two_arm_constant(0.6, 0.4, 20, 2);
  Trace trace;
  trace.scenario_name = s.name;
  trace.scenario_hash = scenario_hash(s);
  trace.policy = uniform_policy();
  trace.seed = 9;
  trace.arm_count = 2;
  trace.horizon = 2;
  trace.status = RunStatus::inconclusive;
  trace.stopping_day = 2;
  TraceDay day1;
  day1.day = 1;
  day1.allocation.probs = {0.5, 0.5};
  day1.impressions = {10, 10};
  day1.successes = {5, 3};
  day1.gains = {10.0, 6.0};
  day1.active = {true, true};
  TraceDay day2 = day1;
  day2.day = 2;
  day2.successes = {0, 1};
  day2.gains = {10.0, 8.0};
  trace.days = {day1, day2};

  EXPECT_EQ(render_trace_csv(trace),
            "day,p1,p2,n1,n2,r1,r2,ghat1,ghat2,active1,active2\n"
            "1,0.5,0.5,10,10,5,3,10,6,1,1\n"
            "2,0.5,0.5,10,10,0,1,10,8,1,1\n");
}

TEST(TraceRoundTrip, BitExactThroughDisk) {
  const Scenario s = two_arm_constant(0.6, 0.3, 777, 9);  // odd traffic: ragged thirds
  const std::string dir = fresh_dir("roundtrip");
  PolicyConfig policy;
  policy.kind = PolicyKind::secg;
  const Trace trace = run_experiment(s, policy, 31);
  const TracePaths paths = write_trace(trace, s, dir);

  const LoadedTrace loaded = load_trace(paths.csv);
  EXPECT_EQ(loaded.scenario, s);
  EXPECT_EQ(loaded.trace, trace);

  // metrics recomputed from the reloaded trace are identical, field by field
  EXPECT_EQ(compute_metrics(loaded.trace, loaded.scenario), compute_metrics(trace, s));
}

TEST(TraceRoundTrip, ThompsonAllocationsSurviveSerialization) {
  const Scenario s = two_arm_constant(0.55, 0.45, 300, 6);
  const std::string dir = fresh_dir("thompson_roundtrip");
  PolicyConfig policy;
  policy.kind = PolicyKind::thompson;
  policy.mc_draws = 3000;
  const Trace trace = run_experiment(s, policy, 5);
  const TracePaths paths = write_trace(trace, s, dir);
  const LoadedTrace loaded = load_trace(paths.csv);
  EXPECT_EQ(loaded.trace, trace);
}

TEST(TraceRoundTrip, RewritingProducesIdenticalBytes) {
  const Scenario s = two_arm_constant(0.8, 0.2, 500, 5);
  const Trace trace = run_experiment(s, uniform_policy(), 12);
  const std::string a = render_trace_csv(trace);
  const std::string b = render_trace_csv(run_experiment(s, uniform_policy(), 12));
  EXPECT_EQ(a, b);
  EXPECT_EQ(render_trace_meta(trace, s), render_trace_meta(trace, s));
}

TEST(TraceLoader, MissingFilesAreIoErrors) {
  EXPECT_THROW(load_trace("/nonexistent/trace_1.csv"), io_error);
  EXPECT_THROW(load_trace("trace_without_suffix"), io_error);
}

TEST(TraceLoader, RejectsTamperedGainColumn) {
  const Scenario s = two_arm_constant(0.6, 0.4, 100, 3);
  const std::string dir = fresh_dir("tampered");
  const Trace trace = run_experiment(s, uniform_policy(), 3);
  const TracePaths paths = write_trace(trace, s, dir);

  Trace copy = trace;
  copy.days[1].gains[0] += 1.0;  // bump day 2's ghat1
  write_text_file(paths.csv, render_trace_csv(copy));
  try {
    load_trace(paths.csv);
    FAIL() << "tampered gain column was accepted";
  } catch (const integrity_error& e) {
    EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos) << e.what();
    EXPECT_NE(std::string(e.what()).find("ghat1"), std::string::npos) << e.what();
  }
}

TEST(TraceLoader, RejectsStructuralDamage) {
  const Scenario s = two_arm_constant(0.6, 0.4, 100, 3);
  const std::string dir = fresh_dir("structure");
  const Trace trace = run_experiment(s, uniform_policy(), 3);
  const TracePaths paths = write_trace(trace, s, dir);
  const std::string original = read_text_file(paths.csv);

  // wrong header name
  write_text_file(paths.csv, "day,p1,p2,n1,n2,r1,r2,gain1,gain2,active1,active2\n" +
                                 original.substr(original.find('\n') + 1));
  EXPECT_THROW(load_trace(paths.csv), integrity_error);

  // dropped field on a row
  std::string missing_field = original;
  missing_field.replace(missing_field.find("\n1,"), 3, "\n1");
  write_text_file(paths.csv, missing_field);
  EXPECT_THROW(load_trace(paths.csv), integrity_error);

  // non-contiguous days
  std::string skipped_day = original;
  skipped_day.replace(skipped_day.find("\n2,"), 3, "\n5,");
  write_text_file(paths.csv, skipped_day);
  EXPECT_THROW(load_trace(paths.csv), integrity_error);

  // not a number
  std::string garbage = original;
  garbage.replace(garbage.find("0.5"), 3, "0x5");
  write_text_file(paths.csv, garbage);
  EXPECT_THROW(load_trace(paths.csv), integrity_error);

  // empty file
  write_text_file(paths.csv, "");
  EXPECT_THROW(load_trace(paths.csv), integrity_error);
}

TEST(TraceLoader, RejectsMetaDisagreements) {
  const Scenario s = two_arm_constant(0.6, 0.4, 100, 3);
  const std::string dir = fresh_dir("meta");
  const Trace trace = run_experiment(s, uniform_policy(), 3);
  const TracePaths paths = write_trace(trace, s, dir);

  // stopping_day out of step with the rows
  nlohmann::json meta = trace_meta_to_json(trace, s);
  meta["stopping_day"] = 99;
  write_text_file(paths.meta, meta.dump(2) + "\n");
  EXPECT_THROW(load_trace(paths.csv), integrity_error);

  // hash that does not match the embedded scenario
  meta = trace_meta_to_json(trace, s);
  meta["scenario_hash"] = 12345;
  write_text_file(paths.meta, meta.dump(2) + "\n");
  EXPECT_THROW(load_trace(paths.csv), integrity_error);

  // arm count that does not match the trace columns
  meta = trace_meta_to_json(trace, s);
  meta["arm_count"] = 3;
  write_text_file(paths.meta, meta.dump(2) + "\n");
  EXPECT_THROW(load_trace(paths.csv), integrity_error);

  // broken JSON maps to parse_error
  write_text_file(paths.meta, "{\"format_version\": 1,\n");
  EXPECT_THROW(load_trace(paths.csv), parse_error);
}

TEST(Figdata, PanelShapesAndEmptyCells) {
  const Scenario s = two_arm_constant(0.5, 0.5, 50, 4);
  Trace trace;
  trace.scenario_name = s.name;
  trace.scenario_hash = scenario_hash(s);
  trace.policy = uniform_policy();
  trace.arm_count = 2;
  trace.horizon = 4;
  trace.stopping_day = 3;
  for (int day = 1; day <= 3; ++day) {
    TraceDay rec;
    rec.day = day;
    rec.allocation.probs = {0.5, 0.5};
    rec.impressions = {10, 10};
    rec.successes = {5, 2};
    rec.gains = {static_cast<double>(10 * day), static_cast<double>(4 * day)};
    rec.active = {true, true};
    trace.days.push_back(std::move(rec));
  }
  // arm 2 sees no traffic on day 1: daily mean empty, running mean empty too
  trace.days[0].impressions = {10, 0};
  trace.days[0].successes = {5, 0};

  EXPECT_EQ(render_play_probability_csv(trace),
            "day,p1,p2\n1,0.5,0.5\n2,0.5,0.5\n3,0.5,0.5\n");
  EXPECT_EQ(render_daily_mean_csv(trace),
            "day,mean1,mean2\n1,0.5,\n2,0.5,0.2\n3,0.5,0.2\n");
  EXPECT_EQ(render_running_mean_csv(trace),
            "day,mean1,mean2\n1,0.5,\n2,0.5,0.2\n3,0.5,0.2\n");
  EXPECT_EQ(render_cumulative_gain_csv(trace),
            "day,ghat1,ghat2\n1,10,4\n2,20,8\n3,30,12\n");
}

TEST(Figdata, WritesFourFilesPerStem) {
  const Scenario s = two_arm_constant(0.9, 0.1, 100, 1);
  const std::string dir = fresh_dir("figdata");
  const Trace trace = run_experiment(s, uniform_policy(), 8);
  const auto paths = write_figdata(trace, dir + "/trace_8");
  ASSERT_EQ(paths.size(), 4u);
  for (const auto& path : paths) {
    const std::string text = read_text_file(path);
    // single-day trace: header plus exactly one row
    EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 2) << path;
  }
}

}  // namespace
}  // namespace cumgain
