#pragma once

// JSON configuration surface: scenario files, run configuration, and their
// renderers. Rendering is canonical (resolved scenario inlined, seed list
// explicit), so parse(render(config)) == config.

#include <cstdint>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "cumgain/errors.hpp"
#include "cumgain/harness.hpp"
#include "cumgain/scenarios.hpp"

namespace cumgain {

namespace detail {

inline void reject_unknown_keys(const nlohmann::json& object, const char* context,
                                std::initializer_list<const char*> allowed) {
  for (const auto& [key, value] : object.items()) {
    bool known = false;
    for (const char* name : allowed) {
      if (key == name) {
        known = true;
        break;
      }
    }
    if (!known) {
      throw config_error(std::string(context) + ": unknown key '" + key + "'");
    }
  }
}

inline const nlohmann::json& require(const nlohmann::json& object, const char* key,
                                     const char* context) {
  const auto it = object.find(key);
  if (it == object.end()) {
    throw config_error(std::string(context) + ": missing key '" + key + "'");
  }
  return *it;
}

inline double number_field(const nlohmann::json& value, const std::string& name) {
  if (!value.is_number()) throw config_error(name + " must be a number");
  return value.get<double>();
}

inline std::int64_t integer_field(const nlohmann::json& value, const std::string& name) {
  if (!value.is_number_integer()) throw config_error(name + " must be an integer");
  return value.get<std::int64_t>();
}

}  // namespace detail

inline MeanSchedule schedule_from_json(const nlohmann::json& j, const std::string& arm_label) {
  if (!j.is_object()) throw config_error(arm_label + ".schedule must be an object");
  const std::string kind = detail::require(j, "kind", arm_label.c_str()).get<std::string>();
  if (kind == "constant") {
    detail::reject_unknown_keys(j, arm_label.c_str(), {"kind", "value"});
    return ConstantSchedule{
        detail::number_field(detail::require(j, "value", arm_label.c_str()), arm_label + ".value")};
  }
  if (kind == "piecewise") {
    detail::reject_unknown_keys(j, arm_label.c_str(), {"kind", "segments"});
    const auto& segments = detail::require(j, "segments", arm_label.c_str());
    if (!segments.is_array() || segments.empty()) {
      throw config_error(arm_label + ".segments must be a non-empty array");
    }
    PiecewiseSchedule schedule;
    for (const auto& seg : segments) {
      detail::reject_unknown_keys(seg, arm_label.c_str(), {"from_day", "value"});
      schedule.segments.push_back(PiecewiseSegment{
          static_cast<int>(
              detail::integer_field(detail::require(seg, "from_day", arm_label.c_str()),
                                    arm_label + ".from_day")),
          detail::number_field(detail::require(seg, "value", arm_label.c_str()),
                               arm_label + ".value")});
    }
    return schedule;
  }
  if (kind == "sinusoid") {
    detail::reject_unknown_keys(j, arm_label.c_str(),
                                {"kind", "base", "amplitude", "period", "phase"});
    SinusoidSchedule schedule;
    schedule.base =
        detail::number_field(detail::require(j, "base", arm_label.c_str()), arm_label + ".base");
    schedule.amplitude = detail::number_field(
        detail::require(j, "amplitude", arm_label.c_str()), arm_label + ".amplitude");
    schedule.period = detail::number_field(detail::require(j, "period", arm_label.c_str()),
                                           arm_label + ".period");
    schedule.phase = j.contains("phase")
                         ? detail::number_field(j.at("phase"), arm_label + ".phase")
                         : 0.0;
    return schedule;
  }
  if (kind == "table") {
    detail::reject_unknown_keys(j, arm_label.c_str(), {"kind", "values"});
    const auto& values = detail::require(j, "values", arm_label.c_str());
    if (!values.is_array()) throw config_error(arm_label + ".values must be an array");
    TableSchedule schedule;
    for (const auto& v : values) {
      schedule.values.push_back(detail::number_field(v, arm_label + ".values"));
    }
    return schedule;
  }
  throw config_error(arm_label + ".kind '" + kind +
                     "' is not one of constant, piecewise, sinusoid, table");
}

inline nlohmann::json schedule_to_json(const MeanSchedule& schedule) {
  nlohmann::json j;
  if (const auto* c = std::get_if<ConstantSchedule>(&schedule)) {
    j["kind"] = "constant";
    j["value"] = c->value;
  } else if (const auto* p = std::get_if<PiecewiseSchedule>(&schedule)) {
    j["kind"] = "piecewise";
    j["segments"] = nlohmann::json::array();
    for (const auto& seg : p->segments) {
      j["segments"].push_back({{"from_day", seg.from_day}, {"value", seg.value}});
    }
  } else if (const auto* s = std::get_if<SinusoidSchedule>(&schedule)) {
    j["kind"] = "sinusoid";
    j["base"] = s->base;
    j["amplitude"] = s->amplitude;
    j["period"] = s->period;
    j["phase"] = s->phase;
  } else {
    j["kind"] = "table";
    j["values"] = std::get<TableSchedule>(schedule).values;
  }
  return j;
}

inline Scenario scenario_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw config_error("scenario must be an object");
  detail::reject_unknown_keys(j, "scenario", {"name", "k", "horizon", "traffic", "arms"});
  Scenario scenario;
  scenario.name = detail::require(j, "name", "scenario").get<std::string>();
  const auto& arms = detail::require(j, "arms", "scenario");
  if (!arms.is_array() || arms.empty()) {
    throw config_error("scenario.arms must be a non-empty array");
  }
  scenario.arm_count = static_cast<int>(arms.size());
  if (j.contains("k")) {
    const auto k = detail::integer_field(j.at("k"), "scenario.k");
    if (k != scenario.arm_count) {
      throw config_error("scenario.k is " + format_int(k) + " but " +
                         format_int(scenario.arm_count) + " arms are listed");
    }
  }
  scenario.horizon = static_cast<int>(
      detail::integer_field(detail::require(j, "horizon", "scenario"), "scenario.horizon"));
  const auto& traffic = detail::require(j, "traffic", "scenario");
  if (traffic.is_number_integer()) {
    scenario.traffic = traffic.get<std::int64_t>();
  } else if (traffic.is_array()) {
    std::vector<std::int64_t> per_day;
    for (const auto& v : traffic) {
      per_day.push_back(detail::integer_field(v, "scenario.traffic"));
    }
    scenario.traffic = std::move(per_day);
  } else {
    throw config_error("scenario.traffic must be an integer or an array of integers");
  }
  int arm_index = 0;
  for (const auto& arm : arms) {
    ++arm_index;
    const std::string label = "scenario.arms[" + format_int(arm_index) + "]";
    detail::reject_unknown_keys(arm, label.c_str(), {"schedule"});
    scenario.means.push_back(
        schedule_from_json(detail::require(arm, "schedule", label.c_str()), label));
  }
  try {
    validate_scenario(scenario);
  } catch (const std::invalid_argument& e) {
    throw config_error(e.what());
  }
  return scenario;
}

inline nlohmann::json scenario_to_json(const Scenario& scenario) {
  nlohmann::json j;
  j["name"] = scenario.name;
  j["k"] = scenario.arm_count;
  j["horizon"] = scenario.horizon;
  if (const auto* constant = std::get_if<std::int64_t>(&scenario.traffic)) {
    j["traffic"] = *constant;
  } else {
    j["traffic"] = std::get<std::vector<std::int64_t>>(scenario.traffic);
  }
  j["arms"] = nlohmann::json::array();
  for (const auto& schedule : scenario.means) {
    j["arms"].push_back({{"schedule", schedule_to_json(schedule)}});
  }
  return j;
}

// A fully resolved run: scenario inlined, per-run seed list explicit.
struct RunConfig {
  Scenario scenario;
  PolicyConfig policy;
  std::vector<std::uint64_t> seeds;
  std::uint64_t master_seed = 0;
  std::string out_dir = "out";

  bool operator==(const RunConfig&) const = default;
};

inline void validate_run_config(const RunConfig& config) {
  try {
    validate_scenario(config.scenario);
  } catch (const std::invalid_argument& e) {
    throw config_error(e.what());
  }
  if (!(config.policy.delta > 0.0 && config.policy.delta < 1.0)) {
    throw config_error("delta must lie in (0, 1); got " + format_double(config.policy.delta));
  }
  if (!(config.policy.rho > 0.0)) {
    throw config_error("rho must be positive; got " + format_double(config.policy.rho));
  }
  if (config.policy.settling_days < 1) {
    throw config_error("tau must be at least 1; got " + format_int(config.policy.settling_days));
  }
  if (config.policy.mc_draws < 1) {
    throw config_error("mc_draws must be at least 1; got " + format_int(config.policy.mc_draws));
  }
  if (config.seeds.empty()) {
    throw config_error("seeds: need at least one seed");
  }
  if (config.out_dir.empty()) {
    throw config_error("out must not be empty");
  }
}

// Parse JSON text, mapping syntax errors to parse_error with a line number.
inline nlohmann::json parse_json_text(const std::string& text, const std::string& origin) {
  try {
    return nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    std::size_t line = 1;
    for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
      if (text[i] == '\n') ++line;
    }
    throw parse_error(origin + ": line " + format_int(line) + ": " + e.what());
  }
}

inline std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw io_error("cannot open '" + path + "' for reading");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  if (in.bad()) throw io_error("failed reading '" + path + "'");
  return buffer.str();
}

// A scenario reference is a built-in name, a path to a scenario JSON file, or
// an inline object.
inline Scenario resolve_scenario(const nlohmann::json& ref) {
  if (ref.is_object()) return scenario_from_json(ref);
  if (!ref.is_string()) {
    throw config_error("scenario must be a name, a file path, or an object");
  }
  const std::string name = ref.get<std::string>();
  if (auto builtin = builtin_scenario(name)) return std::move(*builtin);
  if (name.ends_with(".json")) {
    const std::string text = read_text_file(name);
    return scenario_from_json(parse_json_text(text, name));
  }
  throw config_error("scenario '" + name + "' is neither a built-in scenario nor a .json file");
}

inline RunConfig run_config_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw config_error("run config must be an object");
  detail::reject_unknown_keys(j, "run config",
                              {"scenario", "policy", "delta", "rho", "tau", "mc_draws", "seeds",
                               "num_seeds", "master_seed", "out"});
  RunConfig config;
  config.scenario = resolve_scenario(detail::require(j, "scenario", "run config"));

  const std::string policy =
      detail::require(j, "policy", "run config").get<std::string>();
  const auto kind = policy_kind_from(policy);
  if (!kind) {
    throw config_error("policy '" + policy + "' is not one of secg, thompson, uniform");
  }
  config.policy.kind = *kind;
  if (j.contains("delta")) config.policy.delta = detail::number_field(j.at("delta"), "delta");
  if (j.contains("rho")) config.policy.rho = detail::number_field(j.at("rho"), "rho");
  if (j.contains("tau")) {
    config.policy.settling_days = static_cast<int>(detail::integer_field(j.at("tau"), "tau"));
  }
  if (j.contains("mc_draws")) {
    config.policy.mc_draws = static_cast<int>(detail::integer_field(j.at("mc_draws"), "mc_draws"));
  }

  if (j.contains("master_seed")) {
    if (!j.at("master_seed").is_number_unsigned() && !j.at("master_seed").is_number_integer()) {
      throw config_error("master_seed must be an unsigned integer");
    }
    config.master_seed = j.at("master_seed").get<std::uint64_t>();
  }
  if (j.contains("seeds") && j.contains("num_seeds")) {
    throw config_error("seeds and num_seeds are mutually exclusive");
  }
  if (j.contains("seeds")) {
    const auto& seeds = j.at("seeds");
    if (!seeds.is_array() || seeds.empty()) {
      throw config_error("seeds must be a non-empty array");
    }
    for (const auto& s : seeds) {
      if (!s.is_number_unsigned() && !s.is_number_integer()) {
        throw config_error("seeds must contain unsigned integers");
      }
      config.seeds.push_back(s.get<std::uint64_t>());
    }
  } else {
    std::int64_t count = 1;
    if (j.contains("num_seeds")) count = detail::integer_field(j.at("num_seeds"), "num_seeds");
    if (count < 1) throw config_error("num_seeds must be at least 1");
    for (std::int64_t i = 0; i < count; ++i) {
      config.seeds.push_back(derive_run_seed(config.master_seed, static_cast<std::uint64_t>(i)));
    }
  }

  if (j.contains("out")) config.out_dir = j.at("out").get<std::string>();
  validate_run_config(config);
  return config;
}

inline RunConfig parse_run_config(const std::string& text, const std::string& origin = "config") {
  return run_config_from_json(parse_json_text(text, origin));
}

inline nlohmann::json run_config_to_json(const RunConfig& config) {
  nlohmann::json j;
  j["scenario"] = scenario_to_json(config.scenario);
  j["policy"] = policy_name(config.policy.kind);
  j["delta"] = config.policy.delta;
  j["rho"] = config.policy.rho;
  j["tau"] = config.policy.settling_days;
  j["mc_draws"] = config.policy.mc_draws;
  j["seeds"] = config.seeds;
  j["master_seed"] = config.master_seed;
  j["out"] = config.out_dir;
  return j;
}

inline std::string render_run_config(const RunConfig& config) {
  return run_config_to_json(config).dump(2) + "\n";
}

}  // namespace cumgain
