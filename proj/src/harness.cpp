#include "subeq/harness.hpp"

#include "subeq/csv.hpp"
#include "subeq/errors.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <limits>
#include <ostream>
#include <thread>

namespace subeq {

std::mt19937_64 substream(std::uint64_t scenario_seed, std::uint64_t tag) {
  std::seed_seq seq{static_cast<std::uint32_t>(scenario_seed), static_cast<std::uint32_t>(scenario_seed >> 32),
                    static_cast<std::uint32_t>(tag), static_cast<std::uint32_t>(tag >> 32)};
  return std::mt19937_64(seq);
}

std::string to_string(Algorithm a) {
  switch (a) {
    case Algorithm::pe: return "PE";
    case Algorithm::ge: return "GE";
    case Algorithm::mdw: return "MDW";
    case Algorithm::mw: return "MW";
    case Algorithm::flooding: return "flooding";
  }
  return "unknown";
}

Algorithm algorithm_from_string(const std::string& name) {
  std::string lower = name;
  std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
  if (lower == "pe") return Algorithm::pe;
  if (lower == "ge") return Algorithm::ge;
  if (lower == "mdw") return Algorithm::mdw;
  if (lower == "mw") return Algorithm::mw;
  if (lower == "flooding") return Algorithm::flooding;
  throw ConfigError("unknown algorithm '" + name + "'");
}

namespace {

template <typename T>
T value_or(const nlohmann::json& doc, const char* key, T fallback) {
  return doc.contains(key) ? doc.at(key).get<T>() : fallback;
}

VolatileConfig volatile_from_json(const nlohmann::json& doc) {
  VolatileConfig c;
  c.num_agents = value_or(doc, "M", c.num_agents);
  if (doc.contains("founders")) {
    c.founders = doc.at("founders").get<AgentSet>();
  } else {
    const int count = value_or(doc, "num_founders", c.num_agents / 2);
    for (AgentId i = 1; i <= count; ++i) c.founders.insert(i);
  }
  c.n = value_or(doc, "n", c.n);
  c.horizon = value_or(doc, "horizon", c.horizon);
  if (doc.contains("churn")) {
    const auto& ch = doc.at("churn");
    c.churn.join_prob = value_or(ch, "join_prob", c.churn.join_prob);
    c.churn.leave_prob = value_or(ch, "leave_prob", c.churn.leave_prob);
    c.churn.min_interact = value_or(ch, "min_interact", c.churn.min_interact);
    c.churn.max_interact = value_or(ch, "max_interact", c.churn.max_interact);
  }
  c.seed = value_or<std::uint64_t>(doc, "seed", c.seed);
  c.scenarios = value_or(doc, "scenarios", c.scenarios);
  if (doc.contains("tracked")) c.tracked = doc.at("tracked").get<std::vector<AgentId>>();
  c.output = value_or<std::string>(doc, "output", c.output);
  c.actions_output = value_or<std::string>(doc, "actions_output", c.actions_output);

  if (c.num_agents < 2) throw ConfigError("volatile: M must be at least 2");
  if (c.founders.empty() || *c.founders.begin() < 1 || *c.founders.rbegin() > c.num_agents) {
    throw ConfigError("volatile: founders must be a nonempty subset of 1..M");
  }
  if (c.n < 1) throw ConfigError("volatile: n must be positive");
  if (c.horizon < 0) throw ConfigError("volatile: horizon must be nonnegative");
  if (c.scenarios < 1) throw ConfigError("volatile: scenarios must be at least 1");
  const auto prob_ok = [](double p) { return p >= 0.0 && p <= 1.0; };
  if (!prob_ok(c.churn.join_prob) || !prob_ok(c.churn.leave_prob)) {
    throw ConfigError("volatile: churn probabilities must lie in [0, 1]");
  }
  if (c.churn.min_interact < 1 || c.churn.max_interact < c.churn.min_interact) {
    throw ConfigError("volatile: need 1 <= min_interact <= max_interact");
  }
  for (AgentId id : c.tracked) {
    if (id < 1 || id > c.num_agents) throw ConfigError("volatile: tracked agent out of range");
  }
  return c;
}

SweepConfig sweep_from_json(const nlohmann::json& doc) {
  SweepConfig c;
  for (const auto& p : doc.at("points")) {
    c.points.push_back({p.at("N").get<int>(), p.at("degree").get<int>(), p.at("n").get<int>()});
  }
  if (doc.contains("vary")) {
    const auto axis = doc.at("vary").get<std::string>();
    if (axis == "N") {
      c.vary = SweepAxis::num_nodes;
    } else if (axis == "degree") {
      c.vary = SweepAxis::degree;
    } else if (axis == "n") {
      c.vary = SweepAxis::dim;
    } else {
      throw ConfigError("sweep: vary must be one of N, degree, n");
    }
  }
  if (doc.contains("algorithms")) {
    c.algorithms.clear();
    for (const auto& a : doc.at("algorithms")) c.algorithms.push_back(algorithm_from_string(a.get<std::string>()));
  }
  c.scenarios = value_or(doc, "scenarios", c.scenarios);
  c.seed = value_or<std::uint64_t>(doc, "seed", c.seed);
  c.threshold = value_or(doc, "threshold", c.threshold);
  c.step_cap = value_or<std::int64_t>(doc, "step_cap", c.step_cap);
  c.threads = value_or(doc, "threads", c.threads);
  c.output = value_or<std::string>(doc, "output", c.output);

  if (c.points.empty()) throw ConfigError("sweep: points must be nonempty");
  for (const auto& p : c.points) {
    if (p.num_nodes < 2 || p.n < 1 || p.degree < 1) throw ConfigError("sweep: need N >= 2, degree >= 1, n >= 1");
    if ((p.num_nodes * p.degree) % 2 != 0) throw ConfigError("sweep: N * degree must be even");
    const long long max_links = static_cast<long long>(p.num_nodes) * (p.num_nodes - 1) / 2;
    if (p.num_links() < p.num_nodes - 1 || p.num_links() > max_links) {
      throw ConfigError("sweep: degree " + std::to_string(p.degree) + " infeasible for N=" +
                        std::to_string(p.num_nodes));
    }
  }
  if (c.algorithms.empty()) throw ConfigError("sweep: algorithms must be nonempty");
  if (!(c.threshold > 0.0)) throw ConfigError("sweep: threshold must be positive");
  if (c.scenarios < 1) throw ConfigError("sweep: scenarios must be at least 1");
  if (c.step_cap < 1) throw ConfigError("sweep: step_cap must be positive");
  if (c.threads < 1) throw ConfigError("sweep: threads must be at least 1");
  return c;
}

}  // namespace

ScenarioConfig config_from_json(const nlohmann::json& doc) {
  try {
    ScenarioConfig c;
    const auto kind = doc.at("kind").get<std::string>();
    if (kind == "volatile") {
      c.kind = ExperimentKind::volatile_run;
      c.volatile_run = volatile_from_json(doc);
    } else if (kind == "sweep") {
      c.kind = ExperimentKind::sweep;
      c.sweep = sweep_from_json(doc);
    } else {
      throw ConfigError("kind must be 'volatile' or 'sweep', got '" + kind + "'");
    }
    return c;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed config: ") + e.what());
  }
}

ScenarioConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path + "'");
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("config '" + path + "' is not valid JSON: " + e.what());
  }
  return config_from_json(doc);
}

std::string to_string(ActionClass c) {
  switch (c) {
    case ActionClass::joins: return "joins";
    case ActionClass::interacts: return "interacts";
    case ActionClass::leaves: return "leaves";
    case ActionClass::idle_member: return "idle_member";
    case ActionClass::idle_nonmember: return "idle_nonmember";
  }
  return "unknown";
}

ActionClass classify(AgentId id, const AgentSet& previous_members, const ActionStep& step) {
  if (step.join.contains(id)) return ActionClass::joins;
  if (step.interact.contains(id)) return ActionClass::interacts;
  if (step.leave.contains(id)) return ActionClass::leaves;
  return previous_members.contains(id) ? ActionClass::idle_member : ActionClass::idle_nonmember;
}

namespace {

double member_error(const NetworkState& state, AgentId id) {
  if (!state.is_member(id)) return std::numeric_limits<double>::quiet_NaN();
  return (state.slot(id).z - state.truth()).norm();
}

}  // namespace

RunTrace run_volatile(const VolatileConfig& config, int scenario) {
  const std::uint64_t seed = config.seed + static_cast<std::uint64_t>(scenario);
  auto seq_rng = substream(seed, 1);
  auto obs_rng = substream(seed, 2);
  const ActionSequence seq =
      random_volatile_sequence(config.num_agents, config.founders, config.horizon, config.churn, seq_rng());
  const Observations obs = random_observations(config.founders, config.n, obs_rng);

  NetworkState state = se_init(obs, config.founders, config.num_agents);
  RunTrace run;
  run.trace = start_trace(state);
  for (AgentId id : config.tracked) run.tracked.push_back({id, {}, {member_error(state, id)}});
  for (std::int64_t k = 1; k <= config.horizon; ++k) {
    const ActionStep& step = seq.step(k);
    for (auto& t : run.tracked) t.actions.push_back(classify(t.id, state.members(), step));
    state.apply(step);
    run.trace.rows.push_back(observe(state));
    for (auto& t : run.tracked) t.error.push_back(member_error(state, t.id));
  }
  return run;
}

void write_actions_csv(std::ostream& out, const RunTrace& run) {
  out << "k,agent,action,error\n";
  for (const auto& t : run.tracked) {
    for (std::size_t k = 1; k < t.error.size(); ++k) {
      out << k << ',' << t.id << ',' << to_string(t.actions[k - 1]) << ',' << format_double(t.error[k]) << '\n';
    }
  }
}

RunOutcome run_equalizing(const UGraph& graph, const Observations& obs, EqualizingMode mode,
                          double threshold, std::int64_t step_cap, std::uint64_t scheduler_seed) {
  const int nodes = graph.num_nodes();
  AgentSet all;
  for (AgentId i = 1; i <= nodes; ++i) all.insert(i);
  NetworkState state = se_init(obs, all, nodes);
  // Membership is static here; an occasional audit keeps the per-step cost O(|I|).
  state.set_conservation_check_interval(nodes);

  const int n = state.dim();
  TxLedger ledger;
  ledger.record({mode == EqualizingMode::pairwise ? TxKind::pe_init : TxKind::ge_init, n, nodes, 0});

  std::vector<double> err(static_cast<std::size_t>(nodes) + 1, 0.0);
  for (AgentId i = 1; i <= nodes; ++i) err[i] = (state.slot(i).z - state.truth()).norm();
  const auto max_err = [&] { return *std::max_element(err.begin() + 1, err.end()); };

  RunOutcome out;
  if (max_err() < threshold) {
    out.converged = true;
    out.transmissions = ledger.total();
    return out;
  }
  UniformScheduler scheduler(graph, mode, scheduler_seed);
  for (std::int64_t k = 1; k <= step_cap; ++k) {
    const ScheduledStep s = scheduler.next();
    state.apply(s.step);
    if (mode == EqualizingMode::pairwise) {
      ledger.record({TxKind::pe_iteration, n, nodes, 0});
    } else {
      ledger.record({TxKind::ge_iteration, n, nodes, graph.degree(s.initiator)});
    }
    // Every updated node holds the same estimate.
    const double e = (state.slot(s.initiator).z - state.truth()).norm();
    for (AgentId id : s.step.interact) err[id] = e;
    out.iterations = k;
    if (max_err() < threshold) {
      out.converged = true;
      break;
    }
  }
  out.transmissions = ledger.total();
  return out;
}

double max_node_error(const ConsensusState& state, const Vector& truth) {
  double worst = 0.0;
  for (AgentId i = 1; i <= state.num_nodes(); ++i) worst = std::max(worst, (state.estimate(i) - truth).norm());
  return worst;
}

RunOutcome run_consensus(const UGraph& graph, const Observations& obs, const WeightMatrix& weights,
                         double threshold, std::int64_t round_cap) {
  const Vector truth = ground_truth(obs);
  ConsensusState state(weights, obs);
  TxLedger ledger;
  const int n = static_cast<int>(truth.size());
  RunOutcome out;
  if (max_node_error(state, truth) < threshold) {
    out.converged = true;
    return out;
  }
  for (std::int64_t r = 1; r <= round_cap; ++r) {
    state.step();
    ledger.record({TxKind::consensus_round, n, graph.num_nodes(), 0});
    out.iterations = r;
    if (max_node_error(state, truth) < threshold) {
      out.converged = true;
      break;
    }
  }
  out.transmissions = ledger.total();
  return out;
}

namespace {

double axis_value(const SweepPoint& p, SweepAxis axis) {
  switch (axis) {
    case SweepAxis::num_nodes: return p.num_nodes;
    case SweepAxis::degree: return p.degree;
    case SweepAxis::dim: return p.n;
  }
  return 0.0;
}

// Per-scenario stream tags; each sweep point gets its own block.
enum Purpose : std::uint64_t { graph_tag = 0, obs_tag = 1, pe_tag = 2, ge_tag = 3, tags_per_point = 8 };

std::vector<RunOutcome> run_scenario(const SweepConfig& config, std::size_t point_index, int scenario) {
  const SweepPoint& p = config.points[point_index];
  const std::uint64_t seed = config.seed + static_cast<std::uint64_t>(scenario);
  const std::uint64_t base = point_index * tags_per_point;
  auto graph_rng = substream(seed, base + graph_tag);
  auto obs_rng = substream(seed, base + obs_tag);
  const UGraph graph = random_geometric(p.num_nodes, p.num_links(), graph_rng);
  AgentSet nodes;
  for (AgentId i = 1; i <= p.num_nodes; ++i) nodes.insert(i);
  const Observations obs = random_observations(nodes, p.n, obs_rng);

  std::vector<RunOutcome> outcomes;
  for (Algorithm a : config.algorithms) {
    switch (a) {
      case Algorithm::pe:
        outcomes.push_back(run_equalizing(graph, obs, EqualizingMode::pairwise, config.threshold, config.step_cap,
                                          substream(seed, base + pe_tag)()));
        break;
      case Algorithm::ge:
        outcomes.push_back(run_equalizing(graph, obs, EqualizingMode::groupwise, config.threshold, config.step_cap,
                                          substream(seed, base + ge_tag)()));
        break;
      case Algorithm::mdw:
        outcomes.push_back(run_consensus(graph, obs, mdw_weights(graph), config.threshold, config.step_cap));
        break;
      case Algorithm::mw:
        outcomes.push_back(run_consensus(graph, obs, mw_weights(graph), config.threshold, config.step_cap));
        break;
      case Algorithm::flooding:
        outcomes.push_back({true, 0, tx_cost({TxKind::flooding, p.n, p.num_nodes, 0})});
        break;
    }
  }
  return outcomes;
}

}  // namespace

std::vector<SweepRow> run_sweep(const SweepConfig& config) {
  const std::size_t cells = config.points.size() * static_cast<std::size_t>(config.scenarios);
  std::vector<std::vector<RunOutcome>> results(cells);
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::atomic<bool> failed{false};
  const auto worker = [&] {
    for (std::size_t job = next++; job < cells && !failed; job = next++) {
      try {
        results[job] = run_scenario(config, job / config.scenarios, static_cast<int>(job % config.scenarios));
      } catch (...) {
        if (!failed.exchange(true)) failure = std::current_exception();
      }
    }
  };
  const int threads = std::max(1, std::min<int>(config.threads, static_cast<int>(cells)));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (failure) std::rethrow_exception(failure);

  std::vector<SweepRow> rows;
  for (std::size_t pi = 0; pi < config.points.size(); ++pi) {
    for (std::size_t ai = 0; ai < config.algorithms.size(); ++ai) {
      SweepRow row;
      row.param_value = axis_value(config.points[pi], config.vary);
      row.algorithm = config.algorithms[ai];
      row.scenarios = config.scenarios;
      double tx = 0.0;
      double it = 0.0;
      for (int s = 0; s < config.scenarios; ++s) {
        const RunOutcome& o = results[pi * config.scenarios + s][ai];
        if (!o.converged) continue;
        ++row.scenarios_converged;
        tx += static_cast<double>(o.transmissions);
        it += static_cast<double>(o.iterations);
      }
      if (row.scenarios_converged > 0) {
        row.mean_transmissions = tx / row.scenarios_converged;
        row.mean_iterations = it / row.scenarios_converged;
      }
      rows.push_back(row);
    }
  }
  return rows;
}

void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows) {
  out << "param_value,algorithm,mean_transmissions,mean_iterations,scenarios_converged\n";
  for (const auto& r : rows) {
    out << format_double(r.param_value) << ',' << to_string(r.algorithm) << ',' << format_double(r.mean_transmissions)
        << ',' << format_double(r.mean_iterations) << ',' << r.scenarios_converged << '\n';
  }
}

}  // namespace subeq
