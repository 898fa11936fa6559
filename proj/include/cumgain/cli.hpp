#pragma once

// Command-line front end. run_cli is the whole program minus main(), taking
// argv-style arguments plus explicit output streams so tests can drive it
// in-process.
//
// Exit codes / stderr prefixes (single line, machine-parsable):
//   2 E_USAGE      bad flags or subcommand
//   3 E_CONFIG     semantically invalid configuration
//   4 E_PARSE      malformed JSON
//   5 E_IO         filesystem failure
//   6 E_INTEGRITY  trace fails self-consistency checks
//   7 E_INTERNAL   anything else (a bug)

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cumgain/config.hpp"
#include "cumgain/trace_io.hpp"

namespace cumgain {

namespace detail {

// Fields settable from the command line; merged over the config file.
struct CliOverrides {
  std::string config_path;
  std::string scenario;
  std::string policy;
  std::int64_t num_seeds = 0;
  std::uint64_t master_seed = 0;
  bool master_seed_set = false;
  double delta = 0.0;
  bool delta_set = false;
  double rho = 0.0;
  bool rho_set = false;
  std::int64_t tau = 0;
  bool tau_set = false;
  std::string out_dir;
};

inline RunConfig assemble_run_config(const CliOverrides& cli) {
  nlohmann::json j = nlohmann::json::object();
  if (!cli.config_path.empty()) {
    j = parse_json_text(read_text_file(cli.config_path), cli.config_path);
    if (!j.is_object()) throw config_error(cli.config_path + ": run config must be an object");
  }
  if (!cli.scenario.empty()) j["scenario"] = cli.scenario;
  if (!cli.policy.empty()) j["policy"] = cli.policy;
  if (cli.num_seeds > 0) {
    j.erase("seeds");  // a seed count on the command line replaces a file seed list
    j["num_seeds"] = cli.num_seeds;
  }
  if (cli.master_seed_set) j["master_seed"] = cli.master_seed;
  if (cli.delta_set) j["delta"] = cli.delta;
  if (cli.rho_set) j["rho"] = cli.rho;
  if (cli.tau_set) j["tau"] = cli.tau;
  if (!cli.out_dir.empty()) j["out"] = cli.out_dir;
  if (!j.contains("scenario")) {
    throw config_error("no scenario given (use --scenario or a config file)");
  }
  if (!j.contains("policy")) {
    throw config_error("no policy given (use --policy or a config file)");
  }
  return run_config_from_json(j);
}

inline std::string render_metrics_csv(const std::vector<std::uint64_t>& seeds,
                                      const std::vector<RunMetrics>& per_seed) {
  std::string out = "seed,status,winner,stopping_day,regret,identified_correct\n";
  for (std::size_t i = 0; i < seeds.size(); ++i) {
    const auto& m = per_seed[i];
    out += std::to_string(seeds[i]);
    out += m.winner ? ",winner," + format_int(*m.winner + 1) : ",inconclusive,";
    out += ',' + format_int(m.stopping_day);
    out += ',' + format_double(m.regret);
    out += ',';
    out += m.winner ? (m.identified_correct ? "1" : "0") : "";
    out += '\n';
  }
  return out;
}

inline nlohmann::json summary_to_json(const RunConfig& config, const SweepSummary& summary) {
  const auto& reference = summary.per_seed.front();
  nlohmann::json j;
  j["scenario"] = config.scenario.name;
  j["scenario_hash"] = scenario_hash(config.scenario);
  j["policy"] = {{"name", policy_name(config.policy.kind)},
                 {"delta", config.policy.delta},
                 {"rho", config.policy.rho},
                 {"tau", config.policy.settling_days},
                 {"mc_draws", config.policy.mc_draws}};
  j["seeds"] = summary.seeds;
  j["counterfactual_best"] = reference.counterfactual_best + 1;
  j["true_gains"] = reference.true_gains;
  j["correct_rate"] = summary.correct_rate;
  j["incorrect_rate"] = summary.incorrect_rate;
  j["inconclusive_rate"] = summary.inconclusive_rate;
  j["mean_stopping_day"] = summary.mean_stopping_day;
  j["median_stopping_day"] = summary.median_stopping_day;
  j["mean_regret"] = summary.mean_regret;
  j["coverage_violation_rate"] = summary.coverage_violation_rate;
  return j;
}

inline int cmd_run(const CliOverrides& cli, std::ostream& out) {
  const RunConfig config = assemble_run_config(cli);

  std::error_code ec;
  std::filesystem::create_directories(config.out_dir, ec);
  if (ec) throw io_error("cannot create output directory '" + config.out_dir + "'");

  out << "scenario=" << config.scenario.name << " policy=" << policy_name(config.policy.kind)
      << " seeds=" << config.seeds.size() << " out=" << config.out_dir << "\n";

  SweepSummary summary;
  summary.seeds = config.seeds;
  std::size_t violations = 0;
  std::size_t files = 0;
  for (const auto seed : config.seeds) {
    const Trace trace = run_experiment(config.scenario, config.policy, seed);
    write_trace(trace, config.scenario, config.out_dir);
    files += 2;
    RunMetrics metrics = compute_metrics(trace, config.scenario);
    if (anytime_coverage_violated(trace, config.scenario,
                                  RadiusParams{config.policy.rho, config.policy.delta})) {
      ++violations;
    }
    out << "seed=" << seed << " status=" << run_status_name(trace.status) << " arm="
        << (metrics.winner ? format_int(*metrics.winner + 1) : std::string("-"))
        << " stopping_day=" << metrics.stopping_day
        << " regret=" << format_double(metrics.regret) << "\n";
    summary.per_seed.push_back(std::move(metrics));
  }
  aggregate_sweep(summary);
  summary.coverage_violation_rate =
      static_cast<double>(violations) / static_cast<double>(config.seeds.size());

  write_text_file(config.out_dir + "/metrics.csv",
                  render_metrics_csv(config.seeds, summary.per_seed));
  write_text_file(config.out_dir + "/summary.json",
                  summary_to_json(config, summary).dump(2) + "\n");
  files += 2;

  out << "correct_rate=" << format_double(summary.correct_rate)
      << " incorrect_rate=" << format_double(summary.incorrect_rate)
      << " inconclusive_rate=" << format_double(summary.inconclusive_rate)
      << " mean_stopping_day=" << format_double(summary.mean_stopping_day)
      << " median_stopping_day=" << format_double(summary.median_stopping_day)
      << " mean_regret=" << format_double(summary.mean_regret)
      << " coverage_violation_rate=" << format_double(summary.coverage_violation_rate) << "\n";
  out << "wrote " << files << " files to " << config.out_dir << "\n";
  return 0;
}

inline int cmd_figdata(const std::vector<std::string>& trace_files, std::ostream& out) {
  for (const auto& path : trace_files) {
    const LoadedTrace loaded = load_trace(path);
    const std::string stem = path.substr(0, path.size() - 4);  // checked: ends in .csv
    for (const auto& written : write_figdata(loaded.trace, stem)) {
      out << written << "\n";
    }
  }
  return 0;
}

inline int cmd_scenarios(std::ostream& out) {
  for (const auto& named : builtin_scenarios()) {
    out << named.scenario.name << "  k=" << named.scenario.arm_count
        << " horizon=" << named.scenario.horizon << "  " << named.description << "\n";
  }
  return 0;
}

}  // namespace detail

inline int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Adaptive experiments over batched Bernoulli feedback: simulate, "
               "estimate cumulative gain, and identify the counterfactual best arm."};
  app.require_subcommand(1);

  detail::CliOverrides cli;

  auto* run = app.add_subcommand("run", "Run one or more seeds of a scenario/policy pair");
  run->alias("sweep");
  run->add_option("--config", cli.config_path, "Run config JSON file");
  run->add_option("--scenario", cli.scenario, "Built-in scenario name or scenario JSON file");
  run->add_option("--policy", cli.policy, "Policy: secg, thompson, or uniform");
  run->add_option("--seeds", cli.num_seeds, "Number of seeds (derived from the master seed)")
      ->check(CLI::PositiveNumber);
  auto* master_seed_opt =
      run->add_option("--master-seed", cli.master_seed, "Master seed for seed derivation");
  auto* delta_opt = run->add_option("--delta", cli.delta, "Error budget, in (0, 1)");
  auto* rho_opt = run->add_option("--rho", cli.rho, "Mixture weight, > 0");
  auto* tau_opt = run->add_option("--tau", cli.tau, "Settling days before elimination, >= 1");
  run->add_option("--out", cli.out_dir, "Output directory");

  std::vector<std::string> trace_files;
  auto* figdata =
      app.add_subcommand("figdata", "Derive plot-ready per-panel CSVs from trace files");
  figdata->add_option("traces", trace_files, "Trace CSV files")->required()->expected(-1);

  auto* scenarios = app.add_subcommand("scenarios", "List built-in scenarios");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "E_USAGE: " << e.what() << "\n";
    return 2;
  }

  cli.master_seed_set = master_seed_opt->count() > 0;
  cli.delta_set = delta_opt->count() > 0;
  cli.rho_set = rho_opt->count() > 0;
  cli.tau_set = tau_opt->count() > 0;

  try {
    if (run->parsed()) return detail::cmd_run(cli, out);
    if (figdata->parsed()) return detail::cmd_figdata(trace_files, out);
    if (scenarios->parsed()) return detail::cmd_scenarios(out);
    err << "E_USAGE: no subcommand given\n";
    return 2;
  } catch (const parse_error& e) {
    err << "E_PARSE: " << e.what() << "\n";
    return 4;
  } catch (const io_error& e) {
    err << "E_IO: " << e.what() << "\n";
    return 5;
  } catch (const integrity_error& e) {
    err << "E_INTEGRITY: " << e.what() << "\n";
    return 6;
  } catch (const config_error& e) {
    err << "E_CONFIG: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    err << "E_INTERNAL: " << e.what() << "\n";
    return 7;
  }
}

}  // namespace cumgain
