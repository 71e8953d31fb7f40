#include "subeq/subset_equalizing.hpp"

#include "subeq/csv.hpp"
#include "subeq/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <sstream>

namespace subeq {

Observations random_observations(const AgentSet& agents, int n, std::mt19937_64& rng) {
  if (n < 1) throw DomainError("random_observations: dimension must be positive");
  Observations obs;
  for (AgentId id : agents) {
    SpdMatrix p = random_spd(n, rng);
    Vector q = random_normal_vector(n, rng);
    obs.emplace(id, Observation{std::move(p), std::move(q)});
  }
  return obs;
}

Vector ground_truth(const Observations& obs) {
  if (obs.empty()) throw DomainError("ground_truth: no observations");
  const int n = obs.begin()->second.p.dim();
  SpdMatrix total = SpdMatrix::zero(n);
  Vector rhs = Vector::Zero(n);
  for (const auto& [id, o] : obs) {
    if (o.p.dim() != n || o.q.size() != n) {
      throw DomainError("ground_truth: observation of agent " + std::to_string(id) + " has the wrong dimension");
    }
    total += o.p;
    rhs += o.q;
  }
  return solve_spd(total, rhs);
}

bool NetworkState::is_member(AgentId id) const {
  return id >= 1 && id < static_cast<int>(slots_.size()) && slots_[id].has_value();
}

const std::optional<AgentSlot>& NetworkState::maybe_slot(AgentId id) const {
  if (id < 1 || id >= static_cast<int>(slots_.size())) {
    throw DomainError("NetworkState: agent id " + std::to_string(id) + " out of range");
  }
  return slots_[id];
}

const AgentSlot& NetworkState::slot(AgentId id) const {
  const auto& s = maybe_slot(id);
  if (!s) throw DomainError("NetworkState: agent " + std::to_string(id) + " is not a member");
  return *s;
}

ConservationResidual NetworkState::conservation_residual() const {
  const int n = dim();
  Vector qz = Vector::Zero(n);
  Matrix q = Matrix::Zero(n, n);
  double magnitude = 0.0;
  for (AgentId id : members_) {
    const auto& s = *slots_[id];
    qz += s.q.entries() * s.z;
    q += s.q.entries();
    magnitude += s.q.entries().norm() * s.z.norm();
  }
  ConservationResidual r;
  // Rounding from the largest terms ever summed persists after they shrink.
  const double qz_scale =
      std::max({conserved_qz_.norm(), magnitude, initial_magnitude_, std::numeric_limits<double>::min()});
  r.weighted_sum = (qz - conserved_qz_).norm() / qz_scale;
  r.weight_sum = (q - conserved_q_.entries()).norm() / conserved_q_.entries().norm();
  return r;
}

NetworkState se_init(const Observations& obs, const AgentSet& founders, int num_agents) {
  if (founders.empty()) throw DomainError("se_init: founders must be nonempty");
  if (num_agents < static_cast<int>(founders.size()) || *founders.rbegin() > num_agents || *founders.begin() < 1) {
    throw DomainError("se_init: founder ids must lie in 1..M");
  }
  if (obs.size() != founders.size() ||
      !std::all_of(founders.begin(), founders.end(), [&](AgentId id) { return obs.contains(id); })) {
    throw DomainError("se_init: observations must cover exactly the founders");
  }
  const int n = obs.begin()->second.p.dim();
  NetworkState state;
  state.slots_.resize(static_cast<std::size_t>(num_agents) + 1);
  state.conserved_qz_ = Vector::Zero(n);
  state.conserved_q_ = SpdMatrix::zero(n);
  for (const auto& [id, o] : obs) {
    if (o.p.dim() != n || o.q.size() != n) throw DomainError("se_init: observation dimension mismatch");
    if (auto check = assert_spd(o.p); !check) {
      throw DomainError("se_init: P of agent " + std::to_string(id) + " is not SPD: " + check.violation);
    }
    state.slots_[id] = AgentSlot{solve_spd(o.p, o.q), o.p};
    state.initial_magnitude_ += o.p.entries().norm() * state.slots_[id]->z.norm();
    state.members_.insert(id);
    state.conserved_qz_ += o.q;
    state.conserved_q_ += o.p;
  }
  state.truth_ = solve_spd(state.conserved_q_, state.conserved_qz_);
  return state;
}

Vector weighted_mean(const NetworkState& state, const AgentSet& subset) {
  if (subset.empty()) throw DomainError("weighted_mean: subset must be nonempty");
  const AgentSlot& first = state.slot(*subset.begin());
  bool all_equal = true;
  SpdMatrix total = SpdMatrix::zero(state.dim());
  Vector rhs = Vector::Zero(state.dim());
  for (AgentId id : subset) {
    const AgentSlot& s = state.slot(id);
    all_equal = all_equal && s.z == first.z;
    total += s.q;
    rhs += s.q.entries() * s.z;
  }
  if (all_equal) return first.z;
  return solve_spd(total, rhs);
}

void NetworkState::apply(const ActionStep& step) {
  const auto found = validate_step(step, members_, num_agents(), time_ + 1);
  if (!found.empty()) throw ValidationError(found.front().message);

  AgentSet sources = step.interact;
  sources.insert(step.leave.begin(), step.leave.end());
  AgentSet receivers = step.interact;
  receivers.insert(step.join.begin(), step.join.end());

  const Vector z_new = weighted_mean(*this, sources);
  const bool membership_changes = !step.join.empty() || !step.leave.empty();
  std::optional<SpdMatrix> q_new;
  if (membership_changes) {
    SpdMatrix pooled = SpdMatrix::zero(dim());
    for (AgentId id : sources) pooled += slots_[id]->q;
    pooled /= static_cast<double>(receivers.size());
    q_new = std::move(pooled);
  }

  for (AgentId id : step.leave) {
    slots_[id].reset();
    members_.erase(id);
  }
  for (AgentId id : receivers) {
    if (slots_[id]) {
      slots_[id]->z = z_new;
      if (q_new) slots_[id]->q = *q_new;
    } else {
      // Joiners only occur together with a membership change, so q_new is set.
      slots_[id] = AgentSlot{z_new, *q_new};
      members_.insert(id);
    }
  }
  ++time_;

  if (check_interval_ > 0 && time_ % check_interval_ == 0) {
    const auto r = conservation_residual();
    if (!(r.weighted_sum <= kConservationTolerance) || !(r.weight_sum <= kConservationTolerance)) {
      std::ostringstream os;
      os << "conservation breached at k=" << time_ << ": weighted-sum residual " << r.weighted_sum
         << ", weight-sum residual " << r.weight_sum;
      throw ConservationError(os.str());
    }
  }
}

NetworkState se_step(NetworkState state, const ActionStep& step) {
  state.apply(step);
  return state;
}

double weighted_spread(const NetworkState& state, const AgentSet& subset, const Vector& center) {
  double total = 0.0;
  for (AgentId id : subset) {
    const AgentSlot& s = state.slot(id);
    total += quadratic_form(s.q, s.z - center);
  }
  return total;
}

double lyapunov(const NetworkState& state) {
  return weighted_spread(state, state.members(), state.truth());
}

TraceRow observe(const NetworkState& state) {
  TraceRow row;
  row.k = state.time();
  row.members = static_cast<int>(state.members().size());
  row.min_error = std::numeric_limits<double>::infinity();
  row.min_eigenvalue = std::numeric_limits<double>::infinity();
  row.max_eigenvalue = 0.0;
  for (AgentId id : state.members()) {
    const AgentSlot& s = state.slot(id);
    const Vector diff = s.z - state.truth();
    row.lyapunov += quadratic_form(s.q, diff);
    const double err = diff.norm();
    row.max_error = std::max(row.max_error, err);
    row.min_error = std::min(row.min_error, err);
    const Vector ev = symmetric_eigenvalues(s.q);
    row.min_eigenvalue = std::min(row.min_eigenvalue, ev(0));
    row.max_eigenvalue = std::max(row.max_eigenvalue, ev(ev.size() - 1));
  }
  return row;
}

LyapunovTrace start_trace(const NetworkState& state) {
  LyapunovTrace trace;
  trace.beta = spectral_radius(state.conserved_weight_sum());
  trace.rows.push_back(observe(state));
  return trace;
}

void write_trace_csv(std::ostream& out, const LyapunovTrace& trace) {
  out << "k,members,lyapunov,max_error,min_eigenvalue\n";
  for (const auto& r : trace.rows) {
    out << r.k << ',' << r.members << ',' << format_double(r.lyapunov) << ','
        << format_double(r.max_error) << ',' << format_double(r.min_eigenvalue) << '\n';
  }
}

UpdEvidence upd_evidence(const LyapunovTrace& trace, std::int64_t horizon, std::int64_t from) {
  if (trace.rows.empty()) throw DomainError("upd_evidence: empty trace");
  if (from > horizon) throw DomainError("upd_evidence: empty range");
  UpdEvidence ev;
  ev.beta = trace.beta;
  ev.alpha_hat = std::numeric_limits<double>::infinity();
  for (const auto& r : trace.rows) {
    if (r.k > horizon) break;
    if (r.k < from) continue;
    ev.min_eigenvalue.push_back(r.min_eigenvalue);
    ev.alpha_hat = std::min(ev.alpha_hat, r.min_eigenvalue);
    ev.max_eigenvalue = std::max(ev.max_eigenvalue, r.max_eigenvalue);
  }
  ev.bounded_by_beta = ev.max_eigenvalue <= trace.beta + 1e-9;
  return ev;
}

double contraction_factor(int num_agents, double alpha, double beta) {
  if (num_agents < 2) throw DomainError("contraction_factor: M must be at least 2");
  if (!(alpha > 0.0) || !(beta >= alpha) || !std::isfinite(beta)) {
    throw DomainError("contraction_factor: need 0 < alpha <= beta");
  }
  const double m = num_agents;
  const double log_a = (m - 1.0) * std::log(4.0 * beta / alpha) + std::log(m) + std::lgamma(m + 1.0);
  // A/(A+1) = 1/(1 + e^{-log A}).
  return 1.0 / (1.0 + std::exp(-log_a));
}

double rate_envelope(double v0, int num_agents, double alpha, double beta, std::int64_t h_star,
                     std::int64_t k) {
  if (h_star < 1) throw DomainError("rate_envelope: h* must be at least 1");
  if (k < 0 || v0 < 0) throw DomainError("rate_envelope: k and V0 must be nonnegative");
  const double factor = contraction_factor(num_agents, alpha, beta);
  return v0 * std::pow(factor, static_cast<double>(k / h_star));
}

double error_ball_radius_sq(double v0, int num_agents, double alpha, double beta,
                            std::int64_t h_star, std::int64_t k) {
  return rate_envelope(v0, num_agents, alpha, beta, h_star, k) / alpha;
}

}  // namespace subeq
