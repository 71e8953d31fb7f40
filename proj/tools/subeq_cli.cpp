// Command-line driver: volatile runs, transmission sweeps, connectivity
// analysis and action-sequence validation.

#include "subeq/connectivity.hpp"
#include "subeq/errors.hpp"
#include "subeq/harness.hpp"

#include "CLI11.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

namespace {

using namespace subeq;

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write '" + path + "'");
  return out;
}

// `stem.csv` becomes `stem_<i>.csv` when a run has several scenarios.
std::string indexed_path(const std::string& path, int index) {
  const std::filesystem::path p(path);
  return (p.parent_path() / (p.stem().string() + "_" + std::to_string(index) + p.extension().string())).string();
}

int run_volatile_command(const std::string& config_path, std::optional<std::uint64_t> seed,
                         const std::optional<std::string>& out_path) {
  ScenarioConfig config = load_config(config_path);
  if (config.kind != ExperimentKind::volatile_run) throw ConfigError("config kind is not 'volatile'");
  VolatileConfig& c = config.volatile_run;
  if (seed) c.seed = *seed;
  if (out_path) c.output = *out_path;
  for (int s = 0; s < c.scenarios; ++s) {
    const RunTrace run = run_volatile(c, s);
    const std::string trace_path = c.scenarios == 1 ? c.output : indexed_path(c.output, s);
    auto out = open_output(trace_path);
    write_trace_csv(out, run.trace);
    if (!c.actions_output.empty()) {
      auto actions = open_output(c.scenarios == 1 ? c.actions_output : indexed_path(c.actions_output, s));
      write_actions_csv(actions, run);
    }
    const auto& last = run.trace.rows.back();
    std::cout << trace_path << ": k=" << last.k << " members=" << last.members << " V=" << last.lyapunov
              << " max_error=" << last.max_error << '\n';
  }
  return 0;
}

int run_sweep_command(const std::string& config_path, std::optional<std::uint64_t> seed,
                      const std::optional<std::string>& out_path) {
  ScenarioConfig config = load_config(config_path);
  if (config.kind != ExperimentKind::sweep) throw ConfigError("config kind is not 'sweep'");
  SweepConfig& c = config.sweep;
  if (seed) c.seed = *seed;
  if (out_path) c.output = *out_path;
  const auto rows = run_sweep(c);
  auto out = open_output(c.output);
  write_sweep_csv(out, rows);
  out.close();
  std::cout << "wrote " << c.output << '\n';
  int status = 0;
  for (const auto& r : rows) {
    if (r.scenarios_converged < r.scenarios) {
      std::cerr << "error: " << to_string(r.algorithm) << " at " << r.param_value << " converged in "
                << r.scenarios_converged << "/" << r.scenarios << " scenarios within the step cap\n";
      status = 1;
    }
  }
  return status;
}

int run_connectivity_command(const std::string& seq_path, std::int64_t window, std::optional<std::int64_t> horizon,
                             const std::optional<std::string>& out_path) {
  const ActionSequence seq = load_sequence(seq_path);
  const auto problems = validate_action_sequence(seq, std::max<std::int64_t>(window, seq.prefix_length()));
  if (!problems.empty()) throw ValidationError(problems.front().message);
  const auto report = h_star(seq, window, horizon.value_or(default_horizon(seq)));
  const std::string text = to_json(report).dump(2) + "\n";
  if (out_path) {
    auto out = open_output(*out_path);
    out << text;
  } else {
    std::cout << text;
  }
  return 0;
}

int run_validate_command(const std::string& seq_path, std::optional<std::int64_t> horizon) {
  const ActionSequence seq = load_sequence(seq_path);
  const std::int64_t through =
      horizon.value_or(seq.prefix_length() + 2LL * (seq.is_periodic() ? *seq.period : 0));
  const auto problems = validate_action_sequence(seq, through);
  if (problems.empty()) {
    std::cout << "ok\n";
    return 0;
  }
  for (const auto& v : problems) {
    std::cout << "k=" << v.k << " " << to_string(v.clause) << ": " << v.message << '\n';
  }
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Subset Equalizing simulator"};
  app.require_subcommand(1);
  app.failure_message(CLI::FailureMessage::help);

  std::string config_path;
  std::string seq_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out_path;
  std::int64_t window = 0;
  std::optional<std::int64_t> horizon;

  auto* vol = app.add_subcommand("volatile", "Run SE on a random volatile network and write its trace CSV");
  auto* sweep = app.add_subcommand("sweep", "Compare transmission costs of PE, GE, MDW, MW and flooding");
  for (auto* sub : {vol, sweep}) {
    sub->add_option("--config", config_path, "Experiment config (JSON)")->required()->check(CLI::ExistingFile);
    sub->add_option("--seed", seed, "Override the base seed");
    sub->add_option("--out", out_path, "Override the output CSV path");
  }

  auto* conn = app.add_subcommand("connectivity", "Report h(k) for k in [0, K] and their supremum");
  conn->add_option("--seq", seq_path, "Action sequence (JSON)")->required()->check(CLI::ExistingFile);
  conn->add_option("--k", window, "Last origin time K")->check(CLI::NonNegativeNumber);
  conn->add_option("--horizon", horizon, "Search horizon per origin")->check(CLI::PositiveNumber);
  conn->add_option("--out", out_path, "Write the JSON report here instead of stdout");

  auto* val = app.add_subcommand("validate", "Check an action sequence against the network model");
  val->add_option("--seq", seq_path, "Action sequence (JSON)")->required()->check(CLI::ExistingFile);
  val->add_option("--horizon", horizon, "Check steps 1..H (default: prefix plus two periods)")
      ->check(CLI::NonNegativeNumber);

  CLI11_PARSE(app, argc, argv);

  try {
    if (vol->parsed()) return run_volatile_command(config_path, seed, out_path);
    if (sweep->parsed()) return run_sweep_command(config_path, seed, out_path);
    if (conn->parsed()) return run_connectivity_command(seq_path, window, horizon, out_path);
    if (val->parsed()) return run_validate_command(seq_path, horizon);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
