#pragma once

#include "subeq/subset_equalizing.hpp"
#include "subeq/topology.hpp"

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace subeq {

/// Symmetric doubly-stochastic weights supported on the graph's edges plus the diagonal.
class WeightMatrix {
public:
  struct Entry {
    AgentId j;
    double w;
  };

  int num_nodes() const { return static_cast<int>(rows_.size()) - 1; }
  /// Nonzero weights of row i in ascending column order, diagonal included.
  const std::vector<Entry>& row(AgentId i) const { return rows_.at(i); }
  double weight(AgentId i, AgentId j) const;
  Matrix dense() const;

  friend WeightMatrix weights_from_edges(const UGraph& graph, double (*edge_weight)(int, int, int));

private:
  std::vector<std::vector<Entry>> rows_;  // index 0 unused
};

/// Edge weights from (d_i, d_j, d_max); the diagonal takes the remainder of each row.
WeightMatrix weights_from_edges(const UGraph& graph, double (*edge_weight)(int, int, int));

/// 1/(1+d_max) on every edge.
WeightMatrix mdw_weights(const UGraph& graph);

/// 1/(1+max(d_i, d_j)) on every edge.
WeightMatrix mw_weights(const UGraph& graph);

/// Synchronous element-wise averaging of (P_i, q_i) followed by a local solve.
class ConsensusState {
public:
  /// `obs` must hold exactly the ids 1..W.num_nodes().
  ConsensusState(WeightMatrix weights, const Observations& obs);

  int num_nodes() const { return weights_.num_nodes(); }
  std::int64_t rounds() const { return rounds_; }
  const WeightMatrix& weights() const { return weights_; }
  const Matrix& averaged_p(AgentId i) const { return p_.at(i); }
  const Vector& averaged_q(AgentId i) const { return q_.at(i); }
  Matrix sum_p() const;
  Vector sum_q() const;

  /// solve(P̄_i, q̄_i). Throws SolveError if P̄_i lost definiteness.
  Vector estimate(AgentId i) const;

  /// One synchronous round P̄_i ← Σ_j W_ij P̄_j, q̄_i ← Σ_j W_ij q̄_j.
  void step();

private:
  WeightMatrix weights_;
  std::vector<Matrix> p_;  // index 0 unused
  std::vector<Vector> q_;
  std::int64_t rounds_ = 0;
};

ConsensusState consensus_step(ConsensusState state);

enum class TxKind { pe_init, ge_init, pe_iteration, ge_iteration, consensus_round, flooding };

std::string to_string(TxKind kind);
/// Throws DomainError for an unknown name.
TxKind tx_kind_from_string(std::string_view name);

struct TxEvent {
  TxKind kind = TxKind::pe_iteration;
  int n = 0;          // unknown dimension
  int num_nodes = 0;  // used by init, consensus and flooding events
  int neighbors = 0;  // |N_i| of a GE initiator
};

/// Real-number transmissions of one event; symmetric matrices count n(n+1)/2 entries.
std::int64_t tx_cost(const TxEvent& event);

/// Running transmission totals for one algorithm run.
class TxLedger {
public:
  void record(const TxEvent& event);
  std::int64_t init_total() const { return init_; }
  std::int64_t iteration_total() const { return iterations_; }
  std::int64_t total() const { return init_ + iterations_; }
  std::int64_t events() const { return events_; }

private:
  std::int64_t init_ = 0;
  std::int64_t iterations_ = 0;
  std::int64_t events_ = 0;
};

}  // namespace subeq
