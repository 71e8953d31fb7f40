#pragma once

#include "subeq/network.hpp"

#include <cstdint>
#include <map>
#include <vector>

namespace subeq {

/// The family of message-mixing sets C_i(origin, at) as a partition of ℳ(at).
///
/// Every member belongs to exactly one block; non-members belong to none.
/// Blocks are kept sorted by their smallest id so two states compare equal
/// exactly when they describe the same partition.
class PartitionState {
public:
  PartitionState(std::int64_t origin, const AgentSet& members);

  std::int64_t origin() const { return origin_; }
  std::int64_t at() const { return at_; }
  const std::vector<AgentSet>& blocks() const { return blocks_; }
  std::size_t block_count() const { return blocks_.size(); }

  /// Union of all blocks, i.e. ℳ(at).
  AgentSet members() const;

  /// C_i(origin, at); empty for a non-member.
  AgentSet block_of(AgentId id) const;

  /// True when a single block covers the whole membership (at ∈ D_origin).
  bool covered() const { return blocks_.size() == 1; }

  /// Applies the actions at time at()+1. Throws ValidationError when the step
  /// does not fit the current membership.
  void step(const ActionStep& step, int num_agents);

  friend bool operator==(const PartitionState& a, const PartitionState& b) {
    return a.blocks_ == b.blocks_;
  }

private:
  void canonicalize();

  std::int64_t origin_;
  std::int64_t at_;
  std::vector<AgentSet> blocks_;
};

/// Singleton blocks over ℳ(k).
PartitionState partition_init(const ActionSequence& seq, std::int64_t k);

/// Value-returning wrapper around PartitionState::step.
PartitionState partition_step(PartitionState state, const ActionStep& step, int num_agents);

/// h(k) as far as it can be decided.
struct HValue {
  enum class Kind { finite, unresolved, infinite };
  Kind kind = Kind::unresolved;
  /// h(k) when finite; the number of steps searched when unresolved; unused when infinite.
  std::int64_t value = 0;

  static HValue finite(std::int64_t h) { return {Kind::finite, h}; }
  static HValue unresolved(std::int64_t searched) { return {Kind::unresolved, searched}; }
  static HValue infinite() { return {Kind::infinite, 0}; }

  bool is_finite() const { return kind == Kind::finite; }
  friend bool operator==(const HValue&, const HValue&) = default;
};

/// sup h(k) over the analysed window.
struct HStar {
  enum class Kind { finite, unbounded_evidence, unresolved, infinite };
  Kind kind = Kind::unresolved;
  std::int64_t value = 0;

  friend bool operator==(const HStar&, const HStar&) = default;
};

std::string to_string(HValue::Kind kind);
std::string to_string(HStar::Kind kind);

struct ConnectivityReport {
  std::map<std::int64_t, HValue> h_values;
  HStar h_star;
};

/// Horizon used when the caller does not give one: 10·M·(number of listed steps), at least 1.
std::int64_t default_horizon(const ActionSequence& seq);

/// Smallest ℓ-k with a single block covering ℳ(ℓ), searched for ℓ ≤ k+H.
///
/// For periodic sequences a repeated (phase, partition) state before coverage
/// certifies h(k) = ∞. Otherwise, running out of horizon or of listed steps
/// yields unresolved.
HValue h_of(const ActionSequence& seq, std::int64_t k, std::int64_t horizon);

/// h(k) for every k in [0, window] and their supremum.
///
/// A certified-infinite h(k) makes h* infinite. For non-periodic sequences,
/// h* is reported as unbounded evidence when the running maximum of h set at
/// least three new records and the last one fell in the second half of the window.
/// Throws DomainError when a non-periodic sequence ends before `window`.
ConnectivityReport h_star(const ActionSequence& seq, std::int64_t window, std::int64_t horizon);

nlohmann::json to_json(const ConnectivityReport& report);

struct EInftyVerdict {
  bool connected_by_h = false;
  bool connected_by_graph = false;
};

/// Connectivity of a static-membership periodic sequence decided two ways:
/// through h(k) < ∞ for every k, and through the graph on the founders whose
/// edges are the pairs that interact together somewhere in the repeating block.
/// Throws PreconditionError if any step has a join or leave, or the sequence is not periodic.
EInftyVerdict einfty_equivalence(const ActionSequence& seq);

}  // namespace subeq
