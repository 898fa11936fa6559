#pragma once

// Trace persistence. A run produces two files:
//
//   trace_<seed>.csv       one row per day: day, p_i, n_i, r_i, ghat_i, active_i
//   trace_<seed>.meta.json scenario config + hash, policy, seed, outcome
//
// Doubles are written in shortest round-trip form so load(save(trace)) is
// bit-exact, and the loader re-derives the gain column from the observation
// columns to catch tampered or truncated files. Plot-ready per-panel CSVs
// (play probability, daily mean, running mean, cumulative gain) are derived
// from a loaded trace.

#include <cstdint>
#include <fstream>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cumgain/config.hpp"
#include "cumgain/errors.hpp"
#include "cumgain/estimation.hpp"
#include "cumgain/harness.hpp"

namespace cumgain {

inline std::string trace_basename(std::uint64_t seed) {
  return "trace_" + std::to_string(seed);
}

inline std::string render_trace_csv(const Trace& trace) {
  const int k = trace.arm_count;
  std::string out = "day";
  const auto column_block = [&](const char* prefix) {
    for (int i = 1; i <= k; ++i) {
      out += ',';
      out += prefix;
      out += format_int(i);
    }
  };
  column_block("p");
  column_block("n");
  column_block("r");
  column_block("ghat");
  column_block("active");
  out += '\n';
  for (const auto& rec : trace.days) {
    out += format_int(rec.day);
    for (int i = 0; i < k; ++i) out += ',' + format_double(rec.allocation.probs[i]);
    for (int i = 0; i < k; ++i) out += ',' + format_int(rec.impressions[i]);
    for (int i = 0; i < k; ++i) out += ',' + format_int(rec.successes[i]);
    for (int i = 0; i < k; ++i) out += ',' + format_double(rec.gains[i]);
    for (int i = 0; i < k; ++i) out += ',' + std::string(rec.active[i] ? "1" : "0");
    out += '\n';
  }
  return out;
}

inline nlohmann::json trace_meta_to_json(const Trace& trace, const Scenario& scenario) {
  nlohmann::json j;
  j["format_version"] = 1;
  j["scenario"] = scenario_to_json(scenario);
  j["scenario_hash"] = trace.scenario_hash;
  j["policy"] = {{"name", policy_name(trace.policy.kind)},
                 {"delta", trace.policy.delta},
                 {"rho", trace.policy.rho},
                 {"tau", trace.policy.settling_days},
                 {"mc_draws", trace.policy.mc_draws}};
  j["seed"] = trace.seed;
  j["arm_count"] = trace.arm_count;
  j["horizon"] = trace.horizon;
  j["status"] = run_status_name(trace.status);
  if (trace.status == RunStatus::winner) {
    j["winner"] = trace.winner + 1;  // arms are 1-based everywhere user-facing
  } else {
    j["winner"] = nullptr;
  }
  j["stopping_day"] = trace.stopping_day;
  return j;
}

inline std::string render_trace_meta(const Trace& trace, const Scenario& scenario) {
  return trace_meta_to_json(trace, scenario).dump(2) + "\n";
}

inline void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw io_error("cannot open '" + path + "' for writing");
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  out.flush();
  if (!out) throw io_error("failed writing '" + path + "'");
}

struct TracePaths {
  std::string csv;
  std::string meta;
};

inline TracePaths trace_paths(const std::string& dir, std::uint64_t seed) {
  const std::string stem = dir + "/" + trace_basename(seed);
  return TracePaths{stem + ".csv", stem + ".meta.json"};
}

inline TracePaths write_trace(const Trace& trace, const Scenario& scenario,
                              const std::string& dir) {
  const TracePaths paths = trace_paths(dir, trace.seed);
  write_text_file(paths.csv, render_trace_csv(trace));
  write_text_file(paths.meta, render_trace_meta(trace, scenario));
  return paths;
}

namespace detail {

inline std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      fields.push_back(line.substr(start));
      return fields;
    }
    fields.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
}

[[noreturn]] inline void bad_trace(const std::string& origin, std::size_t line,
                                   const std::string& what) {
  throw integrity_error(origin + ": line " + format_int(line) + ": " + what);
}

}  // namespace detail

struct LoadedTrace {
  Trace trace;
  Scenario scenario;

  bool operator==(const LoadedTrace&) const = default;
};

// Parse the day rows of a trace CSV. Metadata fields of the returned Trace
// (policy, seed, hashes, status) are left at defaults; load_trace fills them
// from the sidecar and validates the pair as a whole.
inline Trace parse_trace_csv(const std::string& text, const std::string& origin) {
  std::vector<std::string_view> lines;
  {
    std::string_view rest = text;
    while (!rest.empty()) {
      const std::size_t nl = rest.find('\n');
      if (nl == std::string_view::npos) {
        lines.push_back(rest);
        break;
      }
      lines.push_back(rest.substr(0, nl));
      rest.remove_prefix(nl + 1);
    }
  }
  if (lines.empty()) detail::bad_trace(origin, 1, "empty trace file");

  const auto header = detail::split_fields(lines[0]);
  if (header.size() < 6 || header[0] != "day" || (header.size() - 1) % 5 != 0) {
    detail::bad_trace(origin, 1, "header must be day followed by p/n/r/ghat/active blocks");
  }
  const int k = static_cast<int>((header.size() - 1) / 5);
  {
    const char* prefixes[] = {"p", "n", "r", "ghat", "active"};
    std::size_t column = 1;
    for (const char* prefix : prefixes) {
      for (int i = 1; i <= k; ++i, ++column) {
        if (header[column] != std::string(prefix) + format_int(i)) {
          detail::bad_trace(origin, 1,
                            "unexpected column '" + std::string(header[column]) + "', wanted '" +
                                prefix + format_int(i) + "'");
        }
      }
    }
  }

  Trace trace;
  trace.arm_count = k;
  for (std::size_t row = 1; row < lines.size(); ++row) {
    const std::size_t line_no = row + 1;
    if (lines[row].empty()) {
      if (row + 1 == lines.size()) break;  // trailing newline
      detail::bad_trace(origin, line_no, "blank line inside trace");
    }
    const auto fields = detail::split_fields(lines[row]);
    if (fields.size() != header.size()) {
      detail::bad_trace(origin, line_no,
                        "expected " + format_int(header.size()) + " fields, got " +
                            format_int(fields.size()));
    }
    TraceDay rec;
    try {
      std::size_t col = 0;
      rec.day = static_cast<int>(parse_int(fields[col++]));
      rec.allocation.probs.resize(k);
      for (int i = 0; i < k; ++i) rec.allocation.probs[i] = parse_double(fields[col++]);
      for (int i = 0; i < k; ++i) rec.impressions.push_back(parse_int(fields[col++]));
      for (int i = 0; i < k; ++i) rec.successes.push_back(parse_int(fields[col++]));
      rec.gains.resize(k);
      for (int i = 0; i < k; ++i) rec.gains[i] = parse_double(fields[col++]);
      for (int i = 0; i < k; ++i) {
        const auto flag = parse_int(fields[col++]);
        if (flag != 0 && flag != 1) throw std::invalid_argument("active flag must be 0 or 1");
        rec.active.push_back(flag == 1);
      }
    } catch (const std::invalid_argument& e) {
      detail::bad_trace(origin, line_no, e.what());
    }
    const int expected_day = static_cast<int>(row);
    if (rec.day != expected_day) {
      detail::bad_trace(origin, line_no,
                        "days must be contiguous from 1; expected day " +
                            format_int(expected_day) + ", got " + format_int(rec.day));
    }
    trace.days.push_back(std::move(rec));
  }
  if (trace.days.empty()) detail::bad_trace(origin, 2, "trace has no day rows");
  trace.stopping_day = trace.days.back().day;
  return trace;
}

// Load and cross-check a trace pair. The gain column must equal a fresh
// estimator pass over the observation columns bit for bit -- the trace is
// self-consistent or it is rejected.
inline LoadedTrace load_trace(const std::string& csv_path) {
  std::string meta_path = csv_path;
  static constexpr std::string_view kCsvSuffix = ".csv";
  if (meta_path.size() < kCsvSuffix.size() ||
      meta_path.compare(meta_path.size() - kCsvSuffix.size(), kCsvSuffix.size(), kCsvSuffix) !=
          0) {
    throw io_error("trace file '" + csv_path + "' must end in .csv");
  }
  meta_path.replace(meta_path.size() - kCsvSuffix.size(), kCsvSuffix.size(), ".meta.json");

  LoadedTrace loaded;
  loaded.trace = parse_trace_csv(read_text_file(csv_path), csv_path);

  const nlohmann::json meta = parse_json_text(read_text_file(meta_path), meta_path);
  try {
    if (meta.at("format_version").get<int>() != 1) {
      throw integrity_error(meta_path + ": unsupported format_version");
    }
    loaded.scenario = scenario_from_json(meta.at("scenario"));
    loaded.trace.scenario_name = loaded.scenario.name;
    loaded.trace.scenario_hash = meta.at("scenario_hash").get<std::uint64_t>();
    const auto& policy = meta.at("policy");
    const auto kind = policy_kind_from(policy.at("name").get<std::string>());
    if (!kind) throw integrity_error(meta_path + ": unknown policy name");
    loaded.trace.policy.kind = *kind;
    loaded.trace.policy.delta = policy.at("delta").get<double>();
    loaded.trace.policy.rho = policy.at("rho").get<double>();
    loaded.trace.policy.settling_days = policy.at("tau").get<int>();
    loaded.trace.policy.mc_draws = policy.at("mc_draws").get<int>();
    loaded.trace.seed = meta.at("seed").get<std::uint64_t>();
    loaded.trace.horizon = meta.at("horizon").get<int>();
    const std::string status = meta.at("status").get<std::string>();
    if (status == "winner") {
      loaded.trace.status = RunStatus::winner;
      loaded.trace.winner = meta.at("winner").get<int>() - 1;
    } else if (status == "inconclusive") {
      loaded.trace.status = RunStatus::inconclusive;
      loaded.trace.winner = -1;
    } else {
      throw integrity_error(meta_path + ": unknown status '" + status + "'");
    }
  } catch (const nlohmann::json::exception& e) {
    throw integrity_error(meta_path + ": " + e.what());
  }

  if (meta.at("arm_count").get<int>() != loaded.trace.arm_count) {
    throw integrity_error(meta_path + ": arm_count disagrees with the trace columns");
  }
  if (loaded.scenario.arm_count != loaded.trace.arm_count) {
    throw integrity_error(meta_path + ": scenario arm count disagrees with the trace");
  }
  if (scenario_hash(loaded.scenario) != loaded.trace.scenario_hash) {
    throw integrity_error(meta_path + ": scenario_hash does not match the embedded scenario");
  }
  if (meta.at("stopping_day").get<int>() != loaded.trace.stopping_day) {
    throw integrity_error(meta_path + ": stopping_day disagrees with the trace rows");
  }

  // Bit-exact recompute of the gain column from the observations.
  GainState gain = make_gain_state(loaded.trace.arm_count);
  for (const auto& rec : loaded.trace.days) {
    try {
      validate_allocation(rec.allocation);
      gain = update_gain(std::move(gain),
                         DayObservation{rec.day, rec.impressions, rec.successes, rec.allocation});
    } catch (const std::exception& e) {
      detail::bad_trace(csv_path, static_cast<std::size_t>(rec.day) + 1, e.what());
    }
    for (int i = 0; i < loaded.trace.arm_count; ++i) {
      if (gain.gains[i] != rec.gains[i]) {
        detail::bad_trace(csv_path, static_cast<std::size_t>(rec.day) + 1,
                          "ghat" + format_int(i + 1) + " does not equal recomputation from the "
                          "recorded observations");
      }
    }
  }
  return loaded;
}

// --- Plot-ready per-panel CSVs ------------------------------------------------
//
// Four derived files, one column per arm, one row per recorded day. Cells
// without a defined value (daily mean with zero impressions; running mean
// before an arm's first impression) are left empty.

inline std::string render_play_probability_csv(const Trace& trace) {
  const int k = trace.arm_count;
  std::string out = "day";
  for (int i = 1; i <= k; ++i) out += ",p" + format_int(i);
  out += '\n';
  for (const auto& rec : trace.days) {
    out += format_int(rec.day);
    for (int i = 0; i < k; ++i) out += ',' + format_double(rec.allocation.probs[i]);
    out += '\n';
  }
  return out;
}

inline std::string render_daily_mean_csv(const Trace& trace) {
  const int k = trace.arm_count;
  std::string out = "day";
  for (int i = 1; i <= k; ++i) out += ",mean" + format_int(i);
  out += '\n';
  for (const auto& rec : trace.days) {
    out += format_int(rec.day);
    for (int i = 0; i < k; ++i) {
      out += ',';
      if (rec.impressions[i] > 0) {
        out += format_double(static_cast<double>(rec.successes[i]) /
                             static_cast<double>(rec.impressions[i]));
      }
    }
    out += '\n';
  }
  return out;
}

inline std::string render_running_mean_csv(const Trace& trace) {
  const int k = trace.arm_count;
  std::string out = "day";
  for (int i = 1; i <= k; ++i) out += ",mean" + format_int(i);
  out += '\n';
  std::vector<std::int64_t> n(k, 0), r(k, 0);
  for (const auto& rec : trace.days) {
    out += format_int(rec.day);
    for (int i = 0; i < k; ++i) {
      n[i] += rec.impressions[i];
      r[i] += rec.successes[i];
      out += ',';
      if (n[i] > 0) {
        out += format_double(static_cast<double>(r[i]) / static_cast<double>(n[i]));
      }
    }
    out += '\n';
  }
  return out;
}

inline std::string render_cumulative_gain_csv(const Trace& trace) {
  const int k = trace.arm_count;
  std::string out = "day";
  for (int i = 1; i <= k; ++i) out += ",ghat" + format_int(i);
  out += '\n';
  for (const auto& rec : trace.days) {
    out += format_int(rec.day);
    for (int i = 0; i < k; ++i) out += ',' + format_double(rec.gains[i]);
    out += '\n';
  }
  return out;
}

// Write the four panel files next to a trace stem ("<dir>/trace_7" produces
// "<dir>/trace_7_play_probability.csv" and friends). Returns the paths in a
// fixed order.
inline std::vector<std::string> write_figdata(const Trace& trace, const std::string& stem) {
  const std::vector<std::pair<std::string, std::string>> files = {
      {stem + "_play_probability.csv", render_play_probability_csv(trace)},
      {stem + "_daily_mean.csv", render_daily_mean_csv(trace)},
      {stem + "_running_mean.csv", render_running_mean_csv(trace)},
      {stem + "_cumulative_gain.csv", render_cumulative_gain_csv(trace)},
  };
  std::vector<std::string> paths;
  for (const auto& [path, content] : files) {
    write_text_file(path, content);
    paths.push_back(path);
  }
  return paths;
}

}  // namespace cumgain
