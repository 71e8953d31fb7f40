#pragma once

#include "subeq/baselines.hpp"
#include "subeq/network.hpp"
#include "subeq/subset_equalizing.hpp"
#include "subeq/topology.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace subeq {

inline constexpr double kDefaultThreshold = 0.005;
inline constexpr std::int64_t kDefaultStepCap = 1'000'000;

/// Independent generator for one purpose (`tag`) of one scenario.
std::mt19937_64 substream(std::uint64_t scenario_seed, std::uint64_t tag);

struct VolatileConfig {
  int num_agents = 100;
  AgentSet founders;
  int n = 4;
  int horizon = 1000;
  ChurnModel churn;
  std::uint64_t seed = 1;
  int scenarios = 1;
  std::vector<AgentId> tracked{1, 51};
  std::string output = "volatile.csv";
  std::string actions_output;  // empty: no per-agent action log
};

enum class Algorithm { pe, ge, mdw, mw, flooding };

std::string to_string(Algorithm a);
Algorithm algorithm_from_string(const std::string& name);  // throws ConfigError

/// One (N, 2L/N, n) triple.
struct SweepPoint {
  int num_nodes = 50;
  int degree = 20;
  int n = 4;

  int num_links() const { return num_nodes * degree / 2; }
};

enum class SweepAxis { num_nodes, degree, dim };

struct SweepConfig {
  std::vector<SweepPoint> points;
  SweepAxis vary = SweepAxis::num_nodes;
  std::vector<Algorithm> algorithms{Algorithm::pe, Algorithm::ge, Algorithm::mdw, Algorithm::mw, Algorithm::flooding};
  int scenarios = 10;
  std::uint64_t seed = 1;
  double threshold = kDefaultThreshold;
  std::int64_t step_cap = kDefaultStepCap;
  int threads = 1;
  std::string output = "sweep.csv";
};

enum class ExperimentKind { volatile_run, sweep };

struct ScenarioConfig {
  ExperimentKind kind = ExperimentKind::volatile_run;
  VolatileConfig volatile_run;
  SweepConfig sweep;
};

/// Parses and validates a config document. Throws ConfigError.
ScenarioConfig config_from_json(const nlohmann::json& doc);
ScenarioConfig load_config(const std::string& path);

/// The five things an agent can be doing at a step.
enum class ActionClass { joins, interacts, leaves, idle_member, idle_nonmember };

std::string to_string(ActionClass c);
ActionClass classify(AgentId id, const AgentSet& previous_members, const ActionStep& step);

struct TrackedAgent {
  AgentId id = 0;
  std::vector<ActionClass> actions;  // index k-1 for k = 1..horizon
  std::vector<double> error;         // index k for k = 0..horizon; NaN while not a member
};

struct RunTrace {
  LyapunovTrace trace;
  std::vector<TrackedAgent> tracked;
};

/// One volatile scenario with seed `config.seed + scenario`.
RunTrace run_volatile(const VolatileConfig& config, int scenario = 0);

/// Writes `k,agent,action,error`.
void write_actions_csv(std::ostream& out, const RunTrace& run);

struct RunOutcome {
  bool converged = false;
  std::int64_t iterations = 0;
  std::int64_t transmissions = 0;
};

/// PE or GE from se_init on all nodes until max node error < threshold.
RunOutcome run_equalizing(const UGraph& graph, const Observations& obs, EqualizingMode mode,
                          double threshold, std::int64_t step_cap, std::uint64_t scheduler_seed);

/// MDW or MW rounds until max node error < threshold.
RunOutcome run_consensus(const UGraph& graph, const Observations& obs, const WeightMatrix& weights,
                         double threshold, std::int64_t round_cap);

/// Max over nodes of ‖z_i - truth‖, used by the consensus runner.
double max_node_error(const ConsensusState& state, const Vector& truth);

struct SweepRow {
  double param_value = 0.0;
  Algorithm algorithm = Algorithm::pe;
  double mean_transmissions = 0.0;  // over converged scenarios; 0 when none converged
  double mean_iterations = 0.0;
  int scenarios_converged = 0;
  int scenarios = 0;
};

/// One row per (point, algorithm), in config order.
std::vector<SweepRow> run_sweep(const SweepConfig& config);

void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows);

}  // namespace subeq
