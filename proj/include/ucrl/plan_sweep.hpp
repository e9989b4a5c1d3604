#pragma once

// Bellman sweep kernels shared by the planners. Every (s, a) backup is
// independent, so each kernel exists as a serial reference and an OpenMP
// version; both write identical bits.

#include <algorithm>
#include <span>

#include "ucrl/plan.hpp"

namespace ucrl::plan::kernel {

enum class Backup {
  kL1Ball,      ///< inner_max_l1 on the empirical row
  kIntervals,   ///< greedy over all states
  kRestricted,  ///< greedy over the states flagged in `support`
};

struct SweepInput {
  const BoundsTable* bounds = nullptr;
  std::span<const double> u;        ///< current iterate, min-shifted to 0
  std::span<const State> order;     ///< states sorted by decreasing u
  Backup backup = Backup::kIntervals;
  std::span<const char> support;    ///< (s, a, s') membership for kRestricted
};

/// q[s * A + a] = reward_hi(s, a) + optimistic expectation of u.
void sweep_serial(const SweepInput& in, std::span<double> q);
void sweep_parallel(const SweepInput& in, std::span<double> q);

/// Recompute NOSS supports for every pair into `support` (S * A * S flags).
/// With grow_only the new set is OR-ed into the old one instead.
void refresh_supports_serial(const BoundsTable& bounds, std::span<const double> u,
                             std::span<const State> order, double kappa_scale, bool grow_only,
                             std::span<char> support);
void refresh_supports_parallel(const BoundsTable& bounds, std::span<const double> u,
                               std::span<const State> order, double kappa_scale,
                               bool grow_only, std::span<char> support);

/// Greedy optimistic value over the states with member(x) true, walking
/// `order` (decreasing f). No allocation.
template <class Member>
double greedy_value(std::span<const double> f, std::span<const State> order,
                    std::span<const ConfInterval> row, double mass_cap, Member member) {
  double lo_mass = 0.0, value = 0.0;
  for (State x : order) {
    if (!member(x)) continue;
    lo_mass += row[x].lo;
    value += f[x] * row[x].lo;
  }
  double budget = mass_cap - lo_mass;
  for (State x : order) {
    if (budget <= 0.0) break;
    if (!member(x)) continue;
    const double raise = std::min(row[x].hi - row[x].lo, budget);
    value += f[x] * raise;
    budget -= raise;
  }
  return value;
}

/// States sorted by decreasing value, ties by increasing index.
void sort_desc(std::span<const double> u, std::span<State> order);

/// NOSS for a single pair, writing membership flags into `member` (size S).
void noss_into(std::span<const double> f, std::span<const State> order,
               std::span<const ConfInterval> row, std::span<const State> emp_support,
               double kappa, std::span<char> member);

}  // namespace ucrl::plan::kernel
