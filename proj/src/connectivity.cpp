#include "subeq/connectivity.hpp"

#include "subeq/errors.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <queue>
#include <utility>

namespace subeq {

PartitionState::PartitionState(std::int64_t origin, const AgentSet& members)
    : origin_(origin), at_(origin) {
  blocks_.reserve(members.size());
  for (AgentId id : members) blocks_.push_back({id});
}

AgentSet PartitionState::members() const {
  AgentSet all;
  for (const auto& b : blocks_) all.insert(b.begin(), b.end());
  return all;
}

AgentSet PartitionState::block_of(AgentId id) const {
  for (const auto& b : blocks_) {
    if (b.contains(id)) return b;
  }
  return {};
}

void PartitionState::canonicalize() {
  std::sort(blocks_.begin(), blocks_.end(),
            [](const AgentSet& a, const AgentSet& b) { return *a.begin() < *b.begin(); });
}

void PartitionState::step(const ActionStep& step, int num_agents) {
  const auto found = validate_step(step, members(), num_agents, at_ + 1);
  if (!found.empty()) throw ValidationError(found.front().message);

  // Every block touched by an interacting or leaving member is merged with the
  // joiners; leavers are then evicted from the merged block.
  AgentSet merged = step.join;
  std::vector<AgentSet> untouched;
  untouched.reserve(blocks_.size());
  for (auto& block : blocks_) {
    const bool touched = std::any_of(block.begin(), block.end(), [&](AgentId id) {
      return step.interact.contains(id) || step.leave.contains(id);
    });
    if (touched) {
      merged.insert(block.begin(), block.end());
    } else {
      untouched.push_back(std::move(block));
    }
  }
  for (AgentId id : step.leave) merged.erase(id);
  if (!merged.empty()) untouched.push_back(std::move(merged));
  blocks_ = std::move(untouched);
  canonicalize();
  ++at_;
}

PartitionState partition_init(const ActionSequence& seq, std::int64_t k) {
  return PartitionState(k, membership_at(seq, k));
}

PartitionState partition_step(PartitionState state, const ActionStep& step, int num_agents) {
  state.step(step, num_agents);
  return state;
}

std::string to_string(HValue::Kind kind) {
  switch (kind) {
    case HValue::Kind::finite: return "finite";
    case HValue::Kind::unresolved: return "unresolved";
    case HValue::Kind::infinite: return "certified-infinite";
  }
  return "unknown";
}

std::string to_string(HStar::Kind kind) {
  switch (kind) {
    case HStar::Kind::finite: return "finite";
    case HStar::Kind::unbounded_evidence: return "unbounded-evidence";
    case HStar::Kind::unresolved: return "unresolved";
    case HStar::Kind::infinite: return "infinite";
  }
  return "unknown";
}

std::int64_t default_horizon(const ActionSequence& seq) {
  return std::max<std::int64_t>(1, 10LL * seq.num_agents * seq.prefix_length());
}

HValue h_of(const ActionSequence& seq, std::int64_t k, std::int64_t horizon) {
  if (horizon < 1) throw DomainError("h_of: horizon must be at least 1");
  PartitionState state = partition_init(seq, k);
  std::set<std::pair<int, std::vector<AgentSet>>> seen;
  for (std::int64_t ell = k;; ++ell) {
    if (state.covered()) return HValue::finite(ell - k);
    if (ell - k >= horizon || !seq.has_step(ell + 1)) return HValue::unresolved(ell - k);
    if (const auto ph = seq.phase(ell + 1)) {
      if (!seen.emplace(*ph, state.blocks()).second) return HValue::infinite();
    }
    state.step(seq.step(ell + 1), seq.num_agents);
  }
}

ConnectivityReport h_star(const ActionSequence& seq, std::int64_t window, std::int64_t horizon) {
  if (window < 0) throw DomainError("h_star: window must be nonnegative");
  if (!seq.is_periodic() && window > seq.prefix_length()) {
    throw DomainError("h_star: origin " + std::to_string(window) + " lies past the end of a " +
                      std::to_string(seq.prefix_length()) + "-step sequence");
  }
  ConnectivityReport report;
  bool any_infinite = false;
  bool any_unresolved = false;
  std::int64_t running_max = -1;
  int records = 0;
  std::int64_t last_record = 0;
  for (std::int64_t k = 0; k <= window; ++k) {
    const HValue h = h_of(seq, k, horizon);
    report.h_values[k] = h;
    switch (h.kind) {
      case HValue::Kind::infinite: any_infinite = true; break;
      case HValue::Kind::unresolved: any_unresolved = true; break;
      case HValue::Kind::finite:
        if (h.value > running_max) {
          if (running_max >= 0) {
            ++records;
            last_record = k;
          }
          running_max = h.value;
        }
        break;
    }
  }
  if (any_infinite) {
    report.h_star = {HStar::Kind::infinite, 0};
  } else if (!seq.is_periodic() && records >= 3 && 2 * last_record > window) {
    report.h_star = {HStar::Kind::unbounded_evidence, running_max};
  } else if (any_unresolved) {
    report.h_star = {HStar::Kind::unresolved, std::max<std::int64_t>(running_max, 0)};
  } else {
    report.h_star = {HStar::Kind::finite, running_max};
  }
  return report;
}

nlohmann::json to_json(const ConnectivityReport& report) {
  auto values = nlohmann::json::array();
  for (const auto& [k, h] : report.h_values) {
    nlohmann::json entry{{"k", k}, {"kind", to_string(h.kind)}};
    if (h.kind == HValue::Kind::finite) entry["value"] = h.value;
    if (h.kind == HValue::Kind::unresolved) entry["searched"] = h.value;
    values.push_back(std::move(entry));
  }
  nlohmann::json star{{"kind", to_string(report.h_star.kind)}};
  if (report.h_star.kind != HStar::Kind::infinite) star["value"] = report.h_star.value;
  return {{"h_values", std::move(values)}, {"h_star", std::move(star)}};
}

namespace {

bool graph_connected(const AgentSet& vertices, const std::set<std::pair<AgentId, AgentId>>& edges) {
  if (vertices.size() <= 1) return true;
  std::map<AgentId, std::vector<AgentId>> adjacency;
  for (const auto& [a, b] : edges) {
    adjacency[a].push_back(b);
    adjacency[b].push_back(a);
  }
  AgentSet reached{*vertices.begin()};
  std::queue<AgentId> frontier;
  frontier.push(*vertices.begin());
  while (!frontier.empty()) {
    const AgentId v = frontier.front();
    frontier.pop();
    for (AgentId w : adjacency[v]) {
      if (reached.insert(w).second) frontier.push(w);
    }
  }
  return reached.size() == vertices.size();
}

}  // namespace

EInftyVerdict einfty_equivalence(const ActionSequence& seq) {
  if (!seq.is_periodic() || *seq.period < 1 || *seq.period > seq.prefix_length()) {
    throw PreconditionError("einfty_equivalence: sequence must be periodic");
  }
  for (std::size_t i = 0; i < seq.steps.size(); ++i) {
    if (!seq.steps[i].join.empty() || !seq.steps[i].leave.empty()) {
      throw PreconditionError("einfty_equivalence: step " + std::to_string(i + 1) +
                              " changes membership");
    }
  }
  const auto problems = validate_action_sequence(seq, seq.prefix_length());
  if (!problems.empty()) throw ValidationError(problems.front().message);

  const int p = *seq.period;
  const std::int64_t len = seq.prefix_length();

  // Only coarsening is possible, so a full period without a merge repeats the state.
  const std::int64_t horizon = len + static_cast<std::int64_t>(p) * (seq.founders.size() + 2);
  EInftyVerdict verdict;
  verdict.connected_by_h = true;
  for (std::int64_t k = 0; k < len; ++k) {
    const HValue h = h_of(seq, k, horizon);
    if (h.kind == HValue::Kind::unresolved) {
      throw Error("einfty_equivalence: h(" + std::to_string(k) + ") did not resolve");
    }
    if (!h.is_finite()) {
      verdict.connected_by_h = false;
      break;
    }
  }

  // Pairs interacting inside the repeating block recur infinitely often.
  std::set<std::pair<AgentId, AgentId>> edges;
  for (std::int64_t k = len - p + 1; k <= len; ++k) {
    const auto& group = seq.step(k).interact;
    for (auto a = group.begin(); a != group.end(); ++a) {
      for (auto b = std::next(a); b != group.end(); ++b) edges.emplace(*a, *b);
    }
  }
  verdict.connected_by_graph = graph_connected(seq.founders, edges);
  return verdict;
}

}  // namespace subeq
