#pragma once

// Ground-truth tabular MDPs: representation, exact average-reward solver,
// minimal expected hitting times, and the problem-dependent quantities that
// enter regret bounds (diameter, local diameter, Gini index, local effective
// support).

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace ucrl {

using State = std::size_t;
using Action = std::size_t;

/// Deterministic stationary policy: one action per state.
using Policy = std::vector<Action>;

/// Raised when a model or its inputs violate the model invariants.
class ModelError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised when an iterative solver exhausts its iteration budget or a
/// hitting-time target is unreachable.
class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Tabular MDP with Bernoulli-style bounded rewards.
///
/// Transition probabilities are stored densely and row-major in (s, a, s'),
/// mean rewards in (s, a).
class MdpModel {
 public:
  MdpModel() = default;
  MdpModel(std::size_t n_states, std::size_t n_actions);
  MdpModel(std::size_t n_states, std::size_t n_actions, std::vector<double> transition,
           std::vector<double> reward_mean);

  [[nodiscard]] std::size_t n_states() const { return n_states_; }
  [[nodiscard]] std::size_t n_actions() const { return n_actions_; }
  [[nodiscard]] std::size_t n_pairs() const { return n_states_ * n_actions_; }

  [[nodiscard]] std::span<const double> row(State s, Action a) const {
    return {transition_.data() + (s * n_actions_ + a) * n_states_, n_states_};
  }
  [[nodiscard]] std::span<double> row(State s, Action a) {
    return {transition_.data() + (s * n_actions_ + a) * n_states_, n_states_};
  }
  [[nodiscard]] double p(State s, Action a, State next) const { return row(s, a)[next]; }
  [[nodiscard]] double& p(State s, Action a, State next) { return row(s, a)[next]; }
  [[nodiscard]] double reward(State s, Action a) const { return reward_mean_[s * n_actions_ + a]; }
  [[nodiscard]] double& reward(State s, Action a) { return reward_mean_[s * n_actions_ + a]; }

  [[nodiscard]] const std::vector<double>& transition() const { return transition_; }
  [[nodiscard]] const std::vector<double>& reward_mean() const { return reward_mean_; }

  /// Throws ModelError unless every row is a distribution (sum within 1e-12)
  /// and every mean reward lies in [0, 1].
  void validate() const;

  friend bool operator==(const MdpModel&, const MdpModel&) = default;

 private:
  std::size_t n_states_ = 0;
  std::size_t n_actions_ = 0;
  std::vector<double> transition_;
  std::vector<double> reward_mean_;
};

struct GainBias {
  double gain = 0.0;
  std::vector<double> bias;  ///< normalized so that min bias == 0
};

struct SolveResult {
  GainBias value;
  Policy policy;
  std::size_t iterations = 0;
  bool damped = false;  ///< the aperiodicity transform was needed
};

/// Relative value iteration for the optimal gain of a communicating MDP.
/// Stops when the span of successive iterate differences drops below
/// `epsilon`. If the plain iteration does not settle (periodic chains), it
/// restarts on the aperiodic transform 0.99 P + 0.01 I, which has the same
/// gains, and rescales the bias back. Throws SolverError on the cap.
SolveResult relative_value_iteration(const MdpModel& model, double epsilon,
                                     std::size_t max_iterations = 1'000'000);

/// Gain of a fixed deterministic policy (relative value iteration restricted
/// to that policy).
double policy_gain(const MdpModel& model, const Policy& policy, double epsilon = 1e-10);

/// Gain of the uniformly random policy.
double uniform_policy_gain(const MdpModel& model, double epsilon = 1e-10);

/// Minimal expected number of steps to reach `target` from every state,
/// v(s) = 1 + min_a sum_{s' != target} p(s'|s,a) v(s'), v(target) = 0.
/// Gauss-Seidel value iteration, tolerance 1e-10, at most 1e6 sweeps.
std::vector<double> min_hitting_times(const MdpModel& model, State target);

/// Problem-dependent quantities. Matrices are row-major over (s, a).
struct MdpMetrics {
  double diameter = 0.0;
  std::vector<double> local_diameter;
  std::vector<double> gini;
  std::vector<double> effective_support;
  std::vector<std::size_t> support_size;

  friend bool operator==(const MdpMetrics&, const MdpMetrics&) = default;
};

/// Dispersion of one transition row.
struct RowDispersion {
  double gini = 0.0;               ///< sum p (1 - p)
  double effective_support = 0.0;  ///< (sum sqrt(p (1 - p)))^2
  std::size_t support_size = 0;
};

RowDispersion row_dispersion(std::span<const double> row);

enum class Exec { kSerial, kParallel };

/// Hitting times to every target; entry [target][source].
std::vector<std::vector<double>> all_hitting_times(const MdpModel& model,
                                                   Exec exec = Exec::kParallel);

MdpMetrics metrics(const MdpModel& model, Exec exec = Exec::kParallel);

/// Leading regret-bound terms normalized by sqrt(T log(T/delta)), without
/// universal constants.
struct RegretBoundReport {
  std::size_t n_states = 0;
  std::size_t n_actions = 0;
  double horizon = 0.0;
  double delta = 0.0;
  MdpMetrics metrics;
  double ucrl2 = 0.0;      ///< D S sqrt(A)
  double scal_plus = 0.0;  ///< D sqrt(sum K)
  double ucrl2b = 0.0;     ///< sqrt(D sum K log T)
  double ucrl3 = 0.0;      ///< sqrt(sum max(D_s^2 L, 1)) + D
  double ucrl3_constant = 0.0;  ///< 5 sum D_s^2 L + 10 sqrt(SA) + 2 D
};

RegretBoundReport regret_bound_report(const MdpModel& model, double horizon, double delta);

/// Span max - min of a vector (0 for an empty one).
double span(std::span<const double> v);

}  // namespace ucrl
