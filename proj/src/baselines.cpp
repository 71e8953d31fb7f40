#include "subeq/baselines.hpp"

#include "subeq/errors.hpp"

#include <algorithm>

namespace subeq {

double WeightMatrix::weight(AgentId i, AgentId j) const {
  for (const auto& e : row(i)) {
    if (e.j == j) return e.w;
  }
  return 0.0;
}

Matrix WeightMatrix::dense() const {
  const int n = num_nodes();
  Matrix w = Matrix::Zero(n, n);
  for (AgentId i = 1; i <= n; ++i) {
    for (const auto& e : rows_[i]) w(i - 1, e.j - 1) = e.w;
  }
  return w;
}

WeightMatrix weights_from_edges(const UGraph& graph, double (*edge_weight)(int, int, int)) {
  const int n = graph.num_nodes();
  const int dmax = graph.max_degree();
  WeightMatrix w;
  w.rows_.resize(static_cast<std::size_t>(n) + 1);
  for (AgentId i = 1; i <= n; ++i) {
    double off = 0.0;
    auto& row = w.rows_[i];
    for (AgentId j : graph.neighbors(i)) {
      const double wij = edge_weight(graph.degree(i), graph.degree(j), dmax);
      row.push_back({j, wij});
      off += wij;
    }
    row.push_back({i, 1.0 - off});
    std::sort(row.begin(), row.end(), [](const auto& a, const auto& b) { return a.j < b.j; });
  }
  return w;
}

WeightMatrix mdw_weights(const UGraph& graph) {
  return weights_from_edges(graph, [](int, int, int dmax) { return 1.0 / (1.0 + dmax); });
}

WeightMatrix mw_weights(const UGraph& graph) {
  return weights_from_edges(graph, [](int di, int dj, int) { return 1.0 / (1.0 + std::max(di, dj)); });
}

ConsensusState::ConsensusState(WeightMatrix weights, const Observations& obs) : weights_(std::move(weights)) {
  const int nodes = weights_.num_nodes();
  if (static_cast<int>(obs.size()) != nodes || obs.begin()->first != 1 || obs.rbegin()->first != nodes) {
    throw DomainError("ConsensusState: observations must cover nodes 1..N exactly");
  }
  p_.resize(static_cast<std::size_t>(nodes) + 1);
  q_.resize(static_cast<std::size_t>(nodes) + 1);
  for (const auto& [id, o] : obs) {
    p_[id] = o.p.entries();
    q_[id] = o.q;
  }
}

Matrix ConsensusState::sum_p() const {
  Matrix total = Matrix::Zero(p_[1].rows(), p_[1].cols());
  for (AgentId i = 1; i <= num_nodes(); ++i) total += p_[i];
  return total;
}

Vector ConsensusState::sum_q() const {
  Vector total = Vector::Zero(q_[1].size());
  for (AgentId i = 1; i <= num_nodes(); ++i) total += q_[i];
  return total;
}

Vector ConsensusState::estimate(AgentId i) const {
  // Averaging can leave last-bit asymmetry; symmetrize before the checked solve.
  const Matrix& p = p_.at(i);
  return solve_spd(SpdMatrix(0.5 * (p + p.transpose())), q_.at(i));
}

void ConsensusState::step() {
  const int nodes = num_nodes();
  std::vector<Matrix> next_p(p_.size());
  std::vector<Vector> next_q(q_.size());
  for (AgentId i = 1; i <= nodes; ++i) {
    Matrix acc_p = Matrix::Zero(p_[i].rows(), p_[i].cols());
    Vector acc_q = Vector::Zero(q_[i].size());
    for (const auto& e : weights_.row(i)) {
      acc_p += e.w * p_[e.j];
      acc_q += e.w * q_[e.j];
    }
    next_p[i] = std::move(acc_p);
    next_q[i] = std::move(acc_q);
  }
  p_ = std::move(next_p);
  q_ = std::move(next_q);
  ++rounds_;
}

ConsensusState consensus_step(ConsensusState state) {
  state.step();
  return state;
}

std::string to_string(TxKind kind) {
  switch (kind) {
    case TxKind::pe_init: return "pe_init";
    case TxKind::ge_init: return "ge_init";
    case TxKind::pe_iteration: return "pe_iteration";
    case TxKind::ge_iteration: return "ge_iteration";
    case TxKind::consensus_round: return "consensus_round";
    case TxKind::flooding: return "flooding";
  }
  throw DomainError("unknown transmission event kind");
}

TxKind tx_kind_from_string(std::string_view name) {
  for (TxKind k : {TxKind::pe_init, TxKind::ge_init, TxKind::pe_iteration, TxKind::ge_iteration,
                   TxKind::consensus_round, TxKind::flooding}) {
    if (to_string(k) == name) return k;
  }
  throw DomainError("unknown transmission event '" + std::string(name) + "'");
}

std::int64_t tx_cost(const TxEvent& event) {
  if (event.n < 1) throw DomainError("tx_cost: n must be positive");
  const std::int64_t n = event.n;
  const std::int64_t sym = n * (n + 1) / 2;
  const std::int64_t nodes = event.num_nodes;
  const auto need_nodes = [&] {
    if (nodes < 1) throw DomainError("tx_cost: " + to_string(event.kind) + " needs N >= 1");
  };
  switch (event.kind) {
    case TxKind::pe_init:
    case TxKind::ge_init:
      need_nodes();
      return sym * nodes;
    case TxKind::pe_iteration:
      return 2 * n;
    case TxKind::ge_iteration:
      if (event.neighbors < 0) throw DomainError("tx_cost: negative neighbor count");
      return n * (event.neighbors + 1);
    case TxKind::consensus_round:
      need_nodes();
      return (sym + n) * nodes;
    case TxKind::flooding:
      need_nodes();
      return (sym + n) * nodes * nodes;
  }
  throw DomainError("tx_cost: unknown event kind");
}

void TxLedger::record(const TxEvent& event) {
  const std::int64_t c = tx_cost(event);
  if (event.kind == TxKind::pe_init || event.kind == TxKind::ge_init) {
    init_ += c;
  } else {
    iterations_ += c;
  }
  ++events_;
}

}  // namespace subeq
