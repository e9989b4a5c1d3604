#pragma once

// Optimistic planning over confidence sets.
//
// Two families of confidence sets are supported. The L1-ball form keeps an
// empirical row and a scalar radius per pair (the classic UCRL2 set). The
// interval form keeps one [lo, hi] interval per next state. Extended value
// iteration (evi) plans over either form using the full state space; the
// support-adaptive variant (evi_noss) restricts each pair's optimization to
// a support grown by the near-optimistic support selection loop (noss) and
// refreshes those supports lazily.

#include <cstdint>
#include <span>
#include <vector>

#include "ucrl/conc.hpp"
#include "ucrl/mdp.hpp"
#include "ucrl/random.hpp"

namespace ucrl::plan {

using conc::ConfInterval;

enum class BoundsForm { kIntervals, kL1Ball };

/// Confidence sets for every (s, a), materialized once per episode.
/// Flat storage: (s, a) matrices at s * A + a, (s, a, s') tensors at
/// (s * A + a) * S + s'.
struct BoundsTable {
  std::size_t n_states = 0;
  std::size_t n_actions = 0;
  BoundsForm form = BoundsForm::kIntervals;
  std::vector<double> reward_lo, reward_hi;
  std::vector<ConfInterval> trans;     ///< interval form only
  std::vector<double> p_hat;           ///< empirical rows
  std::vector<double> l1_radius;       ///< L1 form only
  std::vector<std::vector<State>> emp_support;
  std::vector<std::uint64_t> counts;   ///< N(s, a) with the N >= 1 convention

  BoundsTable() = default;
  BoundsTable(std::size_t S, std::size_t A, BoundsForm form);

  [[nodiscard]] std::size_t pair(State s, Action a) const { return s * n_actions + a; }
  [[nodiscard]] std::span<const ConfInterval> row_intervals(std::size_t pair) const {
    return {trans.data() + pair * n_states, n_states};
  }
  [[nodiscard]] std::span<const double> row_p_hat(std::size_t pair) const {
    return {p_hat.data() + pair * n_states, n_states};
  }
  [[nodiscard]] std::uint64_t max_count() const;

  /// Point-mass bounds around a known model: every interval collapses to
  /// the true probability, rewards to the true mean, L1 radii to 0.
  static BoundsTable exact(const MdpModel& model, BoundsForm form);

  /// Throws std::invalid_argument when shapes or interval invariants fail.
  void validate() const;
};

struct PlanResult {
  Policy policy;
  std::vector<double> value;  ///< final iterate, shifted so min == 0
  double optimistic_gain = 0.0;
  std::size_t iterations = 0;
  double kappa_bar = 0.0;
};

struct PlanOptions {
  double epsilon = 1e-6;
  std::size_t max_iterations = 1'000'000;
  double gamma = 10.0;               ///< NOSS slack multiplier
  std::size_t support_refresh = 5;   ///< recompute NOSS supports every L iterations
  /// From this iteration on, refreshes only add states to the supports.
  std::size_t grow_after = 100;
  Exec exec = Exec::kSerial;
};

struct InnerMaxResult {
  double value = 0.0;
  std::vector<double> measure;  ///< over all states, zero outside the support
};

/// max sum_{x in support} f(x) q(x) over lo(x) <= q(x) <= hi(x) and
/// sum q <= mass_cap. Greedy: start at lo, then raise states in decreasing f
/// order up to hi until the budget is spent. Throws when sum lo > mass_cap.
InnerMaxResult inner_max(std::span<const double> f, std::span<const ConfInterval> bounds,
                         std::span<const State> support, double mass_cap = 1.0);

/// max f . p over distributions with ||p - p_hat||_1 <= radius.
InnerMaxResult inner_max_l1(std::span<const double> f, std::span<const double> p_hat,
                            double radius);

/// Near-optimistic support selection. Starts from emp_support plus the
/// argmax of f and keeps adding the best outside state while the optimistic
/// value left outside is at least min(kappa, optimistic value inside).
std::vector<State> noss(std::span<const double> f, std::span<const State> emp_support,
                        std::span<const ConfInterval> bounds, double kappa);

/// Per state, among the actions whose value is within relative 1e-9 of the
/// best, pick uniformly among those with the fewest visits.
Policy greedy_policy_tiebreak(std::span<const double> q_values,
                              std::span<const std::uint64_t> visit_counts, std::size_t n_states,
                              std::size_t n_actions, Rng& rng);

/// Extended value iteration over the full state space (L1 ball or intervals).
PlanResult evi(const BoundsTable& bounds, const PlanOptions& opts, Rng& tie_rng);

/// Extended value iteration with NOSS-restricted supports and the slack
/// kappa = gamma * span(u) * |emp support| / n_max^(2/3).
PlanResult evi_noss(const BoundsTable& bounds, std::uint64_t n_max, const PlanOptions& opts,
                    Rng& tie_rng);

}  // namespace ucrl::plan
