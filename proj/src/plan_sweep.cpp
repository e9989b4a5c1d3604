#include "ucrl/plan_sweep.hpp"

#include <algorithm>
#include <numeric>
#include <vector>

namespace ucrl::plan::kernel {

void sort_desc(std::span<const double> u, std::span<State> order) {
  std::iota(order.begin(), order.end(), State{0});
  std::stable_sort(order.begin(), order.end(), [&](State a, State b) { return u[a] > u[b]; });
}

namespace {

double l1_backup(std::span<const double> f, std::span<const State> order,
                 std::span<const double> p_hat, double radius) {
  const State best = order.front();
  double value = 0.0, total = 0.0;
  for (State x = 0; x < p_hat.size(); ++x) {
    value += f[x] * p_hat[x];
    total += p_hat[x];
  }
  const double raise = std::min(0.5 * radius, 1.0 - p_hat[best]);
  value += f[best] * raise;
  double excess = total + raise - 1.0;
  for (auto it = order.rbegin(); it != order.rend() && excess > 0.0; ++it) {
    if (*it == best) continue;
    const double take = std::min(p_hat[*it], excess);
    value -= f[*it] * take;
    excess -= take;
  }
  return value;
}

double backup(const SweepInput& in, std::size_t pair) {
  const BoundsTable& b = *in.bounds;
  const double reward = b.reward_hi[pair];
  switch (in.backup) {
    case Backup::kL1Ball:
      return reward + l1_backup(in.u, in.order, b.row_p_hat(pair), b.l1_radius[pair]);
    case Backup::kIntervals:
      return reward + greedy_value(in.u, in.order, b.row_intervals(pair), 1.0,
                                   [](State) { return true; });
    case Backup::kRestricted: {
      const char* member = in.support.data() + pair * b.n_states;
      return reward + greedy_value(in.u, in.order, b.row_intervals(pair), 1.0,
                                   [member](State x) { return member[x] != 0; });
    }
  }
  return reward;
}

void noss_pair(std::span<const double> f, std::span<const State> order,
               std::span<const ConfInterval> row, std::span<const State> emp_support,
               double kappa, char* member) {
  const std::size_t S = order.size();
  std::fill(member, member + S, 0);
  for (State x : emp_support) member[x] = 1;
  member[order.front()] = 1;
  std::size_t inside = static_cast<std::size_t>(std::count(member, member + S, 1));
  auto in_set = [member](State x) { return member[x] != 0; };
  auto out_set = [member](State x) { return member[x] == 0; };
  while (inside < S) {
    const double outside_value = greedy_value(f, order, row, 1.0, out_set);
    const double inside_value = greedy_value(f, order, row, 1.0, in_set);
    if (outside_value < std::min(kappa, inside_value)) break;
    for (State x : order) {
      if (!member[x]) {
        member[x] = 1;
        ++inside;
        break;
      }
    }
  }
}

void refresh_pair(const BoundsTable& b, std::span<const double> u, std::span<const State> order,
                  double kappa_scale, bool grow_only, std::span<char> support, std::size_t pair) {
  const double kappa = kappa_scale * static_cast<double>(b.emp_support[pair].size());
  char* flags = support.data() + pair * b.n_states;
  if (!grow_only) {
    noss_pair(u, order, b.row_intervals(pair), b.emp_support[pair], kappa, flags);
    return;
  }
  thread_local std::vector<char> fresh;
  fresh.resize(b.n_states);
  noss_pair(u, order, b.row_intervals(pair), b.emp_support[pair], kappa, fresh.data());
  for (State x = 0; x < b.n_states; ++x) flags[x] = static_cast<char>(flags[x] | fresh[x]);
}

}  // namespace

void sweep_serial(const SweepInput& in, std::span<double> q) {
  const std::size_t pairs = in.bounds->n_states * in.bounds->n_actions;
  for (std::size_t pair = 0; pair < pairs; ++pair) q[pair] = backup(in, pair);
}

void sweep_parallel(const SweepInput& in, std::span<double> q) {
  const auto pairs = static_cast<std::ptrdiff_t>(in.bounds->n_states * in.bounds->n_actions);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t pair = 0; pair < pairs; ++pair)
    q[static_cast<std::size_t>(pair)] = backup(in, static_cast<std::size_t>(pair));
}

void refresh_supports_serial(const BoundsTable& bounds, std::span<const double> u,
                             std::span<const State> order, double kappa_scale, bool grow_only,
                             std::span<char> support) {
  const std::size_t pairs = bounds.n_states * bounds.n_actions;
  for (std::size_t pair = 0; pair < pairs; ++pair)
    refresh_pair(bounds, u, order, kappa_scale, grow_only, support, pair);
}

void refresh_supports_parallel(const BoundsTable& bounds, std::span<const double> u,
                               std::span<const State> order, double kappa_scale,
                               bool grow_only, std::span<char> support) {
  const auto pairs = static_cast<std::ptrdiff_t>(bounds.n_states * bounds.n_actions);
#pragma omp parallel for schedule(dynamic, 4)
  for (std::ptrdiff_t pair = 0; pair < pairs; ++pair)
    refresh_pair(bounds, u, order, kappa_scale, grow_only, support, static_cast<std::size_t>(pair));
}

void noss_into(std::span<const double> f, std::span<const State> order,
               std::span<const ConfInterval> row, std::span<const State> emp_support,
               double kappa, std::span<char> member) {
  noss_pair(f, order, row, emp_support, kappa, member.data());
}

}  // namespace ucrl::plan::kernel
