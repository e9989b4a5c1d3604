#include "ucrl/plan.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "ucrl/plan_sweep.hpp"

namespace ucrl::plan {

BoundsTable::BoundsTable(std::size_t S, std::size_t A, BoundsForm f)
    : n_states(S),
      n_actions(A),
      form(f),
      reward_lo(S * A, 0.0),
      reward_hi(S * A, 1.0),
      p_hat(S * A * S, 0.0),
      emp_support(S * A),
      counts(S * A, 1) {
  if (form == BoundsForm::kIntervals)
    trans.assign(S * A * S, ConfInterval{0.0, 1.0});
  else
    l1_radius.assign(S * A, 2.0);
}

std::uint64_t BoundsTable::max_count() const {
  return counts.empty() ? 1 : std::max<std::uint64_t>(1, *std::max_element(counts.begin(), counts.end()));
}

BoundsTable BoundsTable::exact(const MdpModel& model, BoundsForm form) {
  const std::size_t S = model.n_states(), A = model.n_actions();
  BoundsTable b(S, A, form);
  for (State s = 0; s < S; ++s) {
    for (Action a = 0; a < A; ++a) {
      const std::size_t pair = b.pair(s, a);
      b.reward_lo[pair] = b.reward_hi[pair] = model.reward(s, a);
      if (form == BoundsForm::kL1Ball) b.l1_radius[pair] = 0.0;
      for (State x = 0; x < S; ++x) {
        const double q = model.p(s, a, x);
        b.p_hat[pair * S + x] = q;
        if (form == BoundsForm::kIntervals) b.trans[pair * S + x] = {q, q};
        if (q > 0.0) b.emp_support[pair].push_back(x);
      }
    }
  }
  return b;
}

void BoundsTable::validate() const {
  const std::size_t SA = n_states * n_actions;
  if (SA == 0) throw std::invalid_argument("BoundsTable: empty");
  if (reward_lo.size() != SA || reward_hi.size() != SA || p_hat.size() != SA * n_states ||
      emp_support.size() != SA || counts.size() != SA)
    throw std::invalid_argument("BoundsTable: shape mismatch");
  if (form == BoundsForm::kIntervals && trans.size() != SA * n_states)
    throw std::invalid_argument("BoundsTable: interval tensor shape mismatch");
  if (form == BoundsForm::kL1Ball && l1_radius.size() != SA)
    throw std::invalid_argument("BoundsTable: radius shape mismatch");
  for (std::size_t i = 0; i < SA; ++i) {
    if (!(0.0 <= reward_lo[i] && reward_lo[i] <= reward_hi[i] && reward_hi[i] <= 1.0))
      throw std::invalid_argument("BoundsTable: invalid reward interval");
  }
  for (const auto& c : trans) {
    if (!(0.0 <= c.lo && c.lo <= c.hi && c.hi <= 1.0))
      throw std::invalid_argument("BoundsTable: invalid transition interval");
  }
}

InnerMaxResult inner_max(std::span<const double> f, std::span<const ConfInterval> bounds,
                         std::span<const State> support, double mass_cap) {
  const std::size_t S = f.size();
  if (bounds.size() != S) throw std::invalid_argument("inner_max: bounds size != f size");
  InnerMaxResult out;
  out.measure.assign(S, 0.0);
  double lo_mass = 0.0;
  for (State x : support) {
    if (x >= S) throw std::out_of_range("inner_max: support state out of range");
    if (f[x] < 0.0) throw std::invalid_argument("inner_max: f must be nonnegative on the support");
    out.measure[x] = bounds[x].lo;
    lo_mass += bounds[x].lo;
  }
  if (lo_mass > mass_cap + 1e-12) throw std::invalid_argument("inner_max: sum of lower bounds exceeds mass cap");

  std::vector<State> order(support.begin(), support.end());
  std::stable_sort(order.begin(), order.end(), [&](State a, State b) { return f[a] > f[b]; });
  double budget = mass_cap - lo_mass;
  for (State x : order) {
    if (budget <= 0.0) break;
    const double raise = std::min(bounds[x].hi - bounds[x].lo, budget);
    out.measure[x] += raise;
    budget -= raise;
  }
  for (State x : support) out.value += f[x] * out.measure[x];
  return out;
}

InnerMaxResult inner_max_l1(std::span<const double> f, std::span<const double> p_hat,
                            double radius) {
  const std::size_t S = f.size();
  if (p_hat.size() != S) throw std::invalid_argument("inner_max_l1: p_hat size != f size");
  if (!(radius >= 0.0)) throw std::invalid_argument("inner_max_l1: negative radius");
  std::vector<State> order(S);
  kernel::sort_desc(f, order);
  InnerMaxResult out;
  out.measure.assign(p_hat.begin(), p_hat.end());
  const State best = order.front();
  const double raise = std::min(0.5 * radius, 1.0 - p_hat[best]);
  out.measure[best] += raise;
  double excess = std::accumulate(out.measure.begin(), out.measure.end(), 0.0) - 1.0;
  for (auto it = order.rbegin(); it != order.rend() && excess > 0.0; ++it) {
    if (*it == best) continue;
    const double take = std::min(out.measure[*it], excess);
    out.measure[*it] -= take;
    excess -= take;
  }
  for (State x = 0; x < S; ++x) out.value += f[x] * out.measure[x];
  return out;
}

std::vector<State> noss(std::span<const double> f, std::span<const State> emp_support,
                        std::span<const ConfInterval> bounds, double kappa) {
  const std::size_t S = f.size();
  if (bounds.size() != S) throw std::invalid_argument("noss: bounds size != f size");
  if (S == 0) return {};
  for (double v : f)
    if (v < 0.0) throw std::invalid_argument("noss: f must be nonnegative");
  for (State x : emp_support)
    if (x >= S) throw std::out_of_range("noss: support state out of range");
  std::vector<State> order(S);
  kernel::sort_desc(f, order);
  std::vector<char> member(S);
  kernel::noss_into(f, order, bounds, emp_support, kappa, member);
  std::vector<State> out;
  for (State x = 0; x < S; ++x)
    if (member[x]) out.push_back(x);
  return out;
}

Policy greedy_policy_tiebreak(std::span<const double> q_values,
                              std::span<const std::uint64_t> visit_counts, std::size_t n_states,
                              std::size_t n_actions, Rng& rng) {
  if (q_values.size() != n_states * n_actions || visit_counts.size() != n_states * n_actions)
    throw std::invalid_argument("greedy_policy_tiebreak: shape mismatch");
  Policy policy(n_states, 0);
  std::vector<Action> tied;
  tied.reserve(n_actions);
  for (State s = 0; s < n_states; ++s) {
    const auto q = q_values.subspan(s * n_actions, n_actions);
    const double best = *std::max_element(q.begin(), q.end());
    const double tol = 1e-9 * std::max(1.0, std::abs(best));
    std::uint64_t fewest = std::numeric_limits<std::uint64_t>::max();
    tied.clear();
    for (Action a = 0; a < n_actions; ++a) {
      if (q[a] < best - tol) continue;
      const std::uint64_t n = visit_counts[s * n_actions + a];
      if (n < fewest) {
        fewest = n;
        tied.clear();
      }
      if (n == fewest) tied.push_back(a);
    }
    policy[s] = tied.size() == 1 ? tied.front() : tied[uniform_index(rng, tied.size())];
  }
  return policy;
}

namespace {

struct Workspace {
  std::vector<double> u, next, diff, q;
  std::vector<State> order;

  explicit Workspace(std::size_t S, std::size_t A)
      : u(S, 0.0), next(S), diff(S), q(S * A), order(S) {}
};

// Shared value-iteration driver. `prepare` runs before each sweep with the
// iteration index and may refresh support flags.
template <class Prepare>
PlanResult run(const BoundsTable& b, kernel::Backup backup, std::span<const char> support,
               const PlanOptions& opts, Rng& tie_rng, Prepare prepare) {
  if (!(opts.epsilon > 0.0)) throw std::invalid_argument("planner: epsilon must be > 0");
  const std::size_t S = b.n_states, A = b.n_actions;
  Workspace w(S, A);
  kernel::SweepInput in{&b, w.u, w.order, backup, support};
  for (std::size_t n = 0; n < opts.max_iterations; ++n) {
    kernel::sort_desc(w.u, w.order);
    prepare(n, w);
    if (opts.exec == Exec::kParallel)
      kernel::sweep_parallel(in, w.q);
    else
      kernel::sweep_serial(in, w.q);
    for (State s = 0; s < S; ++s) {
      const auto row = std::span<const double>(w.q).subspan(s * A, A);
      w.next[s] = *std::max_element(row.begin(), row.end());
      w.diff[s] = w.next[s] - w.u[s];
    }
    if (span(w.diff) <= opts.epsilon) {
      PlanResult out;
      const auto [lo, hi] = std::minmax_element(w.diff.begin(), w.diff.end());
      out.optimistic_gain = 0.5 * (*lo + *hi);
      out.policy = greedy_policy_tiebreak(w.q, b.counts, S, A, tie_rng);
      const double base = *std::min_element(w.next.begin(), w.next.end());
      out.value.resize(S);
      for (State s = 0; s < S; ++s) out.value[s] = w.next[s] - base;
      out.iterations = n + 1;
      out.kappa_bar = span(w.u);  // scaled by the caller
      return out;
    }
    const double base = *std::min_element(w.next.begin(), w.next.end());
    for (State s = 0; s < S; ++s) w.u[s] = w.next[s] - base;
  }
  throw SolverError("planner: iteration cap exceeded");
}

}  // namespace

PlanResult evi(const BoundsTable& bounds, const PlanOptions& opts, Rng& tie_rng) {
  bounds.validate();
  const auto backup =
      bounds.form == BoundsForm::kL1Ball ? kernel::Backup::kL1Ball : kernel::Backup::kIntervals;
  PlanResult out = run(bounds, backup, {}, opts, tie_rng, [](std::size_t, Workspace&) {});
  out.kappa_bar = 0.0;
  return out;
}

PlanResult evi_noss(const BoundsTable& bounds, std::uint64_t n_max, const PlanOptions& opts,
                    Rng& tie_rng) {
  bounds.validate();
  if (bounds.form != BoundsForm::kIntervals)
    throw std::invalid_argument("evi_noss: requires per-component interval bounds");
  if (opts.support_refresh == 0) throw std::invalid_argument("evi_noss: support_refresh must be >= 1");
  const std::size_t S = bounds.n_states;
  const double denom = std::pow(static_cast<double>(std::max<std::uint64_t>(1, n_max)), 2.0 / 3.0);
  std::vector<char> support(bounds.n_states * bounds.n_actions * S, 1);

  auto prepare = [&](std::size_t n, Workspace& w) {
    if (n % opts.support_refresh != 0) return;
    const double kappa_scale = opts.gamma * span(w.u) / denom;
    const bool grow_only = n >= opts.grow_after;
    if (opts.exec == Exec::kParallel)
      kernel::refresh_supports_parallel(bounds, w.u, w.order, kappa_scale, grow_only, support);
    else
      kernel::refresh_supports_serial(bounds, w.u, w.order, kappa_scale, grow_only, support);
  };
  PlanResult out = run(bounds, kernel::Backup::kRestricted, support, opts, tie_rng, prepare);

  std::size_t max_support = 0;
  for (const auto& sup : bounds.emp_support) max_support = std::max(max_support, sup.size());
  out.kappa_bar = opts.gamma * out.kappa_bar * static_cast<double>(max_support) / denom;
  return out;
}

}  // namespace ucrl::plan
