#include "subeq/network.hpp"

#include "subeq/errors.hpp"

#include <algorithm>
#include <fstream>
#include <iterator>
#include <sstream>

namespace subeq {

bool ActionSequence::has_step(std::int64_t k) const {
  if (k < 1) return false;
  return k <= prefix_length() || (period && *period > 0 && *period <= prefix_length());
}

std::optional<int> ActionSequence::phase(std::int64_t k) const {
  if (!period || *period < 1 || *period > prefix_length() || k < 1) return std::nullopt;
  const std::int64_t start = prefix_length() - *period;
  if (k <= start) return std::nullopt;
  return static_cast<int>((k - 1 - start) % *period);
}

const ActionStep& ActionSequence::step(std::int64_t k) const {
  if (k < 1) throw DomainError("ActionSequence::step: time index must be at least 1");
  if (k <= prefix_length()) return steps[static_cast<std::size_t>(k - 1)];
  const auto ph = phase(k);
  if (!ph) {
    std::ostringstream os;
    os << "ActionSequence::step: k=" << k << " is past the end of a non-periodic sequence of "
       << prefix_length() << " steps";
    throw DomainError(os.str());
  }
  return steps[static_cast<std::size_t>(prefix_length() - *period + *ph)];
}

std::string to_string(Clause clause) {
  switch (clause) {
    case Clause::too_few_agents: return "M >= 2";
    case Clause::founders_empty: return "founders nonempty";
    case Clause::id_out_of_range: return "ids in 1..M";
    case Clause::bad_period: return "period in 1..K";
    case Clause::join_not_nonmember: return "J(k) subset of non-members";
    case Clause::interact_not_member: return "I(k) subset of members";
    case Clause::leave_not_member: return "L(k) subset of members";
    case Clause::interact_empty: return "I(k) nonempty";
    case Clause::leave_not_proper: return "L(k) proper subset";
    case Clause::not_disjoint: return "J(k), I(k), L(k) pairwise disjoint";
  }
  return "unknown";
}

namespace {

std::string describe(const AgentSet& ids) {
  std::ostringstream os;
  os << '{';
  bool first = true;
  for (AgentId id : ids) {
    if (!first) os << ',';
    os << id;
    first = false;
  }
  os << '}';
  return os.str();
}

void add(std::vector<Violation>& out, std::int64_t k, Clause clause, const std::string& detail) {
  std::ostringstream os;
  os << "k=" << k << ": " << to_string(clause) << " violated";
  if (!detail.empty()) os << " (" << detail << ")";
  out.push_back({k, clause, os.str()});
}

AgentSet intersection(const AgentSet& a, const AgentSet& b) {
  AgentSet out;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::inserter(out, out.end()));
  return out;
}

AgentSet difference(const AgentSet& a, const AgentSet& b) {
  AgentSet out;
  std::set_difference(a.begin(), a.end(), b.begin(), b.end(), std::inserter(out, out.end()));
  return out;
}

}  // namespace

std::vector<Violation> validate_step(const ActionStep& step, const AgentSet& previous_members,
                                     int num_agents, std::int64_t k) {
  std::vector<Violation> out;
  for (const AgentSet* part : {&step.join, &step.interact, &step.leave}) {
    for (AgentId id : *part) {
      if (id < 1 || id > num_agents) add(out, k, Clause::id_out_of_range, "agent " + std::to_string(id));
    }
  }
  if (auto bad = intersection(step.join, previous_members); !bad.empty()) {
    add(out, k, Clause::join_not_nonmember, describe(bad) + " already members");
  }
  if (auto bad = difference(step.interact, previous_members); !bad.empty()) {
    add(out, k, Clause::interact_not_member, describe(bad) + " not members");
  }
  if (auto bad = difference(step.leave, previous_members); !bad.empty()) {
    add(out, k, Clause::leave_not_member, describe(bad) + " not members");
  }
  if (step.interact.empty()) add(out, k, Clause::interact_empty, "");
  if (!previous_members.empty() && std::includes(step.leave.begin(), step.leave.end(),
                                                 previous_members.begin(), previous_members.end())) {
    add(out, k, Clause::leave_not_proper, "every member leaves");
  }
  const auto ji = intersection(step.join, step.interact);
  const auto jl = intersection(step.join, step.leave);
  const auto il = intersection(step.interact, step.leave);
  if (!ji.empty() || !jl.empty() || !il.empty()) {
    AgentSet all = ji;
    all.insert(jl.begin(), jl.end());
    all.insert(il.begin(), il.end());
    add(out, k, Clause::not_disjoint, describe(all) + " in more than one set");
  }
  return out;
}

AgentSet apply_membership(const AgentSet& members, const ActionStep& step) {
  AgentSet next = members;
  next.insert(step.join.begin(), step.join.end());
  for (AgentId id : step.leave) next.erase(id);
  return next;
}

namespace {

std::vector<Violation> validate_header(const ActionSequence& seq) {
  std::vector<Violation> out;
  if (seq.num_agents < 2) add(out, 0, Clause::too_few_agents, "M=" + std::to_string(seq.num_agents));
  if (seq.founders.empty()) add(out, 0, Clause::founders_empty, "");
  for (AgentId id : seq.founders) {
    if (id < 1 || id > seq.num_agents) add(out, 0, Clause::id_out_of_range, "founder " + std::to_string(id));
  }
  if (seq.period && (*seq.period < 1 || *seq.period > seq.prefix_length())) {
    add(out, 0, Clause::bad_period, "period " + std::to_string(*seq.period));
  }
  return out;
}

}  // namespace

std::vector<Violation> validate_action_sequence(const ActionSequence& seq, std::int64_t horizon) {
  auto out = validate_header(seq);
  if (!out.empty()) return out;
  AgentSet members = seq.founders;
  for (std::int64_t k = 1; k <= horizon && seq.has_step(k); ++k) {
    const ActionStep& step = seq.step(k);
    auto found = validate_step(step, members, seq.num_agents, k);
    out.insert(out.end(), found.begin(), found.end());
    members = apply_membership(members, step);
  }
  return out;
}

AgentSet membership_at(const ActionSequence& seq, std::int64_t k) {
  auto header = validate_header(seq);
  if (!header.empty()) throw ValidationError(header.front().message);
  AgentSet members = seq.founders;
  for (std::int64_t t = 1; t <= k; ++t) {
    const ActionStep& step = seq.step(t);
    auto found = validate_step(step, members, seq.num_agents, t);
    if (!found.empty()) throw ValidationError(found.front().message);
    members = apply_membership(members, step);
  }
  return members;
}

MembershipTrace membership_trace(const ActionSequence& seq, std::int64_t horizon) {
  auto header = validate_header(seq);
  if (!header.empty()) throw ValidationError(header.front().message);
  MembershipTrace trace;
  trace.members_at.reserve(static_cast<std::size_t>(horizon + 1));
  trace.members_at.push_back(seq.founders);
  for (std::int64_t t = 1; t <= horizon; ++t) {
    const ActionStep& step = seq.step(t);
    auto found = validate_step(step, trace.members_at.back(), seq.num_agents, t);
    if (!found.empty()) throw ValidationError(found.front().message);
    trace.members_at.push_back(apply_membership(trace.members_at.back(), step));
  }
  return trace;
}

ActionStep random_volatile_step(int num_agents, const AgentSet& members, const ChurnModel& churn,
                                std::mt19937_64& rng) {
  ActionStep step;
  const std::vector<AgentId> pool(members.begin(), members.end());
  const int cap = std::min<int>(churn.max_interact, static_cast<int>(pool.size()));
  const int low = std::clamp(churn.min_interact, 1, cap);
  std::uniform_int_distribution<int> size_dist(low, cap);
  const int size = size_dist(rng);
  std::vector<AgentId> chosen;
  std::sample(pool.begin(), pool.end(), std::back_inserter(chosen), size, rng);
  step.interact.insert(chosen.begin(), chosen.end());

  // Leavers come from members outside the interacting set, so at least one member stays.
  std::bernoulli_distribution leaves(churn.leave_prob);
  for (AgentId id : pool) {
    if (!step.interact.contains(id) && leaves(rng)) step.leave.insert(id);
  }
  std::bernoulli_distribution joins(churn.join_prob);
  for (AgentId id = 1; id <= num_agents; ++id) {
    if (!members.contains(id) && joins(rng)) step.join.insert(id);
  }
  return step;
}

ActionSequence random_volatile_sequence(int num_agents, const AgentSet& founders, int horizon,
                                        const ChurnModel& churn, std::uint64_t seed) {
  if (founders.empty()) throw DomainError("random_volatile_sequence: founders must be nonempty");
  for (AgentId id : founders) {
    if (id < 1 || id > num_agents) throw DomainError("random_volatile_sequence: founder id out of range");
  }
  if (churn.join_prob < 0 || churn.join_prob > 1 || churn.leave_prob < 0 || churn.leave_prob > 1) {
    throw DomainError("random_volatile_sequence: probabilities must lie in [0,1]");
  }
  if (churn.max_interact < 1 || churn.min_interact > churn.max_interact) {
    throw DomainError("random_volatile_sequence: interaction size bounds are inconsistent");
  }
  ActionSequence seq;
  seq.num_agents = num_agents;
  seq.founders = founders;
  seq.steps.reserve(static_cast<std::size_t>(std::max(horizon, 0)));
  std::mt19937_64 rng(seed);
  AgentSet members = founders;
  for (int k = 1; k <= horizon; ++k) {
    seq.steps.push_back(random_volatile_step(num_agents, members, churn, rng));
    members = apply_membership(members, seq.steps.back());
  }
  return seq;
}

nlohmann::json to_json(const ActionSequence& seq) {
  nlohmann::json doc;
  doc["M"] = seq.num_agents;
  doc["founders"] = seq.founders;
  auto steps = nlohmann::json::array();
  for (const auto& s : seq.steps) {
    steps.push_back({{"join", s.join}, {"interact", s.interact}, {"leave", s.leave}});
  }
  doc["steps"] = std::move(steps);
  doc["period"] = seq.period ? nlohmann::json(*seq.period) : nlohmann::json(nullptr);
  return doc;
}

namespace {

AgentSet read_ids(const nlohmann::json& doc, const char* key) {
  if (!doc.contains(key)) return {};
  const auto& arr = doc.at(key);
  if (!arr.is_array()) throw ConfigError(std::string("action sequence: '") + key + "' must be an array");
  AgentSet ids;
  for (const auto& v : arr) {
    if (!v.is_number_integer()) throw ConfigError(std::string("action sequence: '") + key + "' holds a non-integer");
    ids.insert(v.get<int>());
  }
  return ids;
}

}  // namespace

ActionSequence sequence_from_json(const nlohmann::json& doc) {
  if (!doc.is_object()) throw ConfigError("action sequence: document must be a JSON object");
  if (!doc.contains("M") || !doc.at("M").is_number_integer()) {
    throw ConfigError("action sequence: missing integer field 'M'");
  }
  if (!doc.contains("founders")) throw ConfigError("action sequence: missing field 'founders'");
  ActionSequence seq;
  seq.num_agents = doc.at("M").get<int>();
  seq.founders = read_ids(doc, "founders");
  if (doc.contains("steps")) {
    if (!doc.at("steps").is_array()) throw ConfigError("action sequence: 'steps' must be an array");
    for (const auto& s : doc.at("steps")) {
      if (!s.is_object()) throw ConfigError("action sequence: each step must be an object");
      seq.steps.push_back({read_ids(s, "join"), read_ids(s, "interact"), read_ids(s, "leave")});
    }
  }
  if (doc.contains("period") && !doc.at("period").is_null()) {
    if (!doc.at("period").is_number_integer()) throw ConfigError("action sequence: 'period' must be an integer");
    seq.period = doc.at("period").get<int>();
  }
  return seq;
}

ActionSequence load_sequence(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open action sequence file: " + path);
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("malformed JSON in " + path + ": " + e.what());
  }
  return sequence_from_json(doc);
}

void save_sequence(const ActionSequence& seq, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write action sequence file: " + path);
  out << to_json(seq).dump(1) << '\n';
}

}  // namespace subeq
