#pragma once

#include "subeq/network.hpp"
#include "subeq/spd.hpp"

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <vector>

namespace subeq {

/// One-time observation (P_i, q_i) of a founder.
struct Observation {
  SpdMatrix p;
  Vector q;
};
using Observations = std::map<AgentId, Observation>;

/// Random observations for every id in `agents`: P = XᵀX and q with i.i.d. standard normal entries.
Observations random_observations(const AgentSet& agents, int n, std::mt19937_64& rng);

/// z solving (Σ P_i) z = Σ q_i.
Vector ground_truth(const Observations& obs);

/// Per-agent state. Present exactly while the agent is a member.
struct AgentSlot {
  Vector z;
  SpdMatrix q;
};

/// Relative drift of the two conserved sums, measured after the latest step.
struct ConservationResidual {
  double weighted_sum = 0.0;  // Σ Q_i z_i
  double weight_sum = 0.0;    // Σ Q_i
};

inline constexpr double kConservationTolerance = 1e-9;

/// Network-wide state of the Subset Equalizing iteration.
///
/// Slots are indexed by agent id 1..M. The truth vector is computed once at
/// initialization for monitoring and is never read by the update itself.
class NetworkState {
public:
  int num_agents() const { return static_cast<int>(slots_.size()) - 1; }
  int dim() const { return static_cast<int>(truth_.size()); }
  std::int64_t time() const { return time_; }

  bool is_member(AgentId id) const;
  const AgentSet& members() const { return members_; }
  const AgentSlot& slot(AgentId id) const;  // throws DomainError for non-members
  const std::optional<AgentSlot>& maybe_slot(AgentId id) const;

  const Vector& conserved_weighted_sum() const { return conserved_qz_; }
  const SpdMatrix& conserved_weight_sum() const { return conserved_q_; }
  const Vector& truth() const { return truth_; }

  /// Residuals of the conserved sums as of now, recomputed from the slots.
  ConservationResidual conservation_residual() const;

  /// Applies the actions of time()+1 in place.
  ///
  /// Throws ValidationError for an invalid step, SolveError when the pooled
  /// weight matrix is numerically singular, and ConservationError when a
  /// conserved sum drifts beyond kConservationTolerance (checked every
  /// `check_interval` steps; 0 disables the check).
  void apply(const ActionStep& step);

  void set_conservation_check_interval(int every) { check_interval_ = every; }

  friend NetworkState se_init(const Observations& obs, const AgentSet& founders, int num_agents);

private:
  std::int64_t time_ = 0;
  std::vector<std::optional<AgentSlot>> slots_;  // index 0 unused
  AgentSet members_;
  Vector conserved_qz_;
  double initial_magnitude_ = 0.0;  // Σ ‖Q_i‖‖z_i‖ at k = 0
  SpdMatrix conserved_q_;
  Vector truth_;
  int check_interval_ = 1;
};

/// z_i(0) = P_i⁻¹ q_i and Q_i(0) = P_i for founders; every other agent undefined.
NetworkState se_init(const Observations& obs, const AgentSet& founders, int num_agents);

/// Value-returning form of NetworkState::apply.
NetworkState se_step(NetworkState state, const ActionStep& step);

/// (Σ_{i∈X} Q_i)⁻¹ Σ_{i∈X} Q_i z_i. When every z_i in X is identical that
/// common value is returned exactly.
Vector weighted_mean(const NetworkState& state, const AgentSet& subset);

/// Σ_{members} (z_i - z)ᵀ Q_i (z_i - z).
double lyapunov(const NetworkState& state);

/// Σ_{i∈X} ‖a_i - b_i‖²_{Q_i} helpers used by the monitors.
double weighted_spread(const NetworkState& state, const AgentSet& subset, const Vector& center);

/// One monitoring sample.
struct TraceRow {
  std::int64_t k = 0;
  int members = 0;
  double lyapunov = 0.0;
  double max_error = 0.0;
  double min_error = 0.0;
  double min_eigenvalue = 0.0;  // over all member Q_i
  double max_eigenvalue = 0.0;
};

/// Samples state between steps.
TraceRow observe(const NetworkState& state);

/// Monitoring record of a run. `beta` is the spectral radius of Σ P_i.
struct LyapunovTrace {
  double beta = 0.0;
  std::vector<TraceRow> rows;
};

LyapunovTrace start_trace(const NetworkState& state);

/// Writes `k,members,lyapunov,max_error,min_eigenvalue`, one row per sample.
void write_trace_csv(std::ostream& out, const LyapunovTrace& trace);

/// Finite-horizon evidence for uniform positive definiteness.
struct UpdEvidence {
  double alpha_hat = 0.0;             // min member eigenvalue over from ≤ k ≤ horizon
  std::vector<double> min_eigenvalue;  // per k in that range
  double beta = 0.0;
  double max_eigenvalue = 0.0;        // max member eigenvalue over the same range
  bool bounded_by_beta = true;        // every Q_i(k) ⪯ (β + 1e-9) I
};

UpdEvidence upd_evidence(const LyapunovTrace& trace, std::int64_t horizon, std::int64_t from = 0);

/// ((4β/α)^{M-1}·M·M!) / ((4β/α)^{M-1}·M·M! + 1), computed in log space.
double contraction_factor(int num_agents, double alpha, double beta);

/// V0 · factor^⌊k/h*⌋.
double rate_envelope(double v0, int num_agents, double alpha, double beta, std::int64_t h_star,
                     std::int64_t k);

/// rate_envelope / α: bound on ‖z_i(k) - z‖².
double error_ball_radius_sq(double v0, int num_agents, double alpha, double beta,
                            std::int64_t h_star, std::int64_t k);

}  // namespace subeq
