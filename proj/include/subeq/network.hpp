#pragma once

#include "json.hpp"

#include <cstdint>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

namespace subeq {

/// Agents are labeled 1..M.
using AgentId = int;
using AgentSet = std::set<AgentId>;

/// The actions taken at one time k ≥ 1: who joins, who interacts while
/// staying, and who leaves after interacting.
struct ActionStep {
  AgentSet join;
  AgentSet interact;
  AgentSet leave;

  friend bool operator==(const ActionStep&, const ActionStep&) = default;
};

/// The exogenous driver of the network: founders plus a step list for k = 1..K.
///
/// When `period` is set to p, the last p steps repeat forever, so step K+1 is
/// step K-p+1 and so on.
struct ActionSequence {
  int num_agents = 0;
  AgentSet founders;
  std::vector<ActionStep> steps;
  std::optional<int> period;

  int prefix_length() const { return static_cast<int>(steps.size()); }
  bool is_periodic() const { return period.has_value(); }

  /// True when step k (k ≥ 1) is defined, either directly or by periodic unrolling.
  bool has_step(std::int64_t k) const;

  /// The step at time k ≥ 1. Throws DomainError when k is past the end of a
  /// non-periodic sequence.
  const ActionStep& step(std::int64_t k) const;

  /// Position of time k inside the repeating block, or nullopt when k lies in the
  /// non-repeating prefix.
  std::optional<int> phase(std::int64_t k) const;

  friend bool operator==(const ActionSequence&, const ActionSequence&) = default;
};

/// Which clause of the network model a step breaks.
enum class Clause {
  too_few_agents,
  founders_empty,
  id_out_of_range,
  bad_period,
  join_not_nonmember,
  interact_not_member,
  leave_not_member,
  interact_empty,
  leave_not_proper,
  not_disjoint,
};

std::string to_string(Clause clause);

struct Violation {
  std::int64_t k = 0;  // 0 for sequence-level problems
  Clause clause{};
  std::string message;
};

/// Checks the step at time k against the membership after time k-1.
std::vector<Violation> validate_step(const ActionStep& step, const AgentSet& previous_members,
                                     int num_agents, std::int64_t k);

/// Checks every step up to `horizon` (periodic steps are unrolled). An empty result means valid.
std::vector<Violation> validate_action_sequence(const ActionSequence& seq, std::int64_t horizon);

/// (M ∪ J) − L, without validation.
AgentSet apply_membership(const AgentSet& members, const ActionStep& step);

/// The members after time k. Throws ValidationError naming the first invalid step.
AgentSet membership_at(const ActionSequence& seq, std::int64_t k);

/// ℳ(0..K) in one pass.
struct MembershipTrace {
  std::vector<AgentSet> members_at;
};
MembershipTrace membership_trace(const ActionSequence& seq, std::int64_t horizon);

/// Knobs for random churn. Interaction sizes are uniform on
/// {min_interact..min(max_interact, |ℳ(k-1)|)}; every non-member joins and
/// every non-interacting member leaves independently with the given probability.
struct ChurnModel {
  double join_prob = 0.05;
  double leave_prob = 0.05;
  int min_interact = 1;
  int max_interact = 5;
};

/// Random steps satisfying every model constraint by construction: the
/// interacting set is drawn first, leavers come from the remaining members,
/// joiners from the non-members.
ActionSequence random_volatile_sequence(int num_agents, const AgentSet& founders, int horizon,
                                        const ChurnModel& churn, std::uint64_t seed);

/// Draws one step for the given current membership.
ActionStep random_volatile_step(int num_agents, const AgentSet& members, const ChurnModel& churn,
                                std::mt19937_64& rng);

/// {"M":…, "founders":[…], "steps":[{"join":[…],"interact":[…],"leave":[…]}…], "period":…}
nlohmann::json to_json(const ActionSequence& seq);
ActionSequence sequence_from_json(const nlohmann::json& doc);
ActionSequence load_sequence(const std::string& path);
void save_sequence(const ActionSequence& seq, const std::string& path);

}  // namespace subeq
