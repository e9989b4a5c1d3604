#include "ucrl/mdp.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <numeric>

namespace ucrl {

MdpModel::MdpModel(std::size_t n_states, std::size_t n_actions)
    : n_states_(n_states),
      n_actions_(n_actions),
      transition_(n_states * n_actions * n_states, 0.0),
      reward_mean_(n_states * n_actions, 0.0) {}

MdpModel::MdpModel(std::size_t n_states, std::size_t n_actions, std::vector<double> transition,
                   std::vector<double> reward_mean)
    : n_states_(n_states),
      n_actions_(n_actions),
      transition_(std::move(transition)),
      reward_mean_(std::move(reward_mean)) {
  if (transition_.size() != n_states_ * n_actions_ * n_states_ ||
      reward_mean_.size() != n_states_ * n_actions_)
    throw ModelError("MdpModel: tensor shapes do not match (S, A)");
}

void MdpModel::validate() const {
  if (n_states_ == 0 || n_actions_ == 0) throw ModelError("MdpModel: empty state or action space");
  for (State s = 0; s < n_states_; ++s) {
    for (Action a = 0; a < n_actions_; ++a) {
      double total = 0.0;
      for (double q : row(s, a)) {
        if (!(q >= 0.0 && q <= 1.0))
          throw ModelError("MdpModel: transition probability outside [0, 1] at state " +
                           std::to_string(s) + ", action " + std::to_string(a));
        total += q;
      }
      if (std::abs(total - 1.0) > 1e-12)
        throw ModelError("MdpModel: row (" + std::to_string(s) + ", " + std::to_string(a) +
                         ") sums to " + std::to_string(total));
      const double r = reward(s, a);
      if (!(r >= 0.0 && r <= 1.0)) throw ModelError("MdpModel: mean reward outside [0, 1]");
    }
  }
}

double span(std::span<const double> v) {
  if (v.empty()) return 0.0;
  const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
  return *hi - *lo;
}

namespace {

// Nonzero entries of every row, for the sparse models we solve over and over.
struct SparseRows {
  std::vector<std::size_t> offset;  // size S*A + 1
  std::vector<State> next;
  std::vector<double> prob;

  explicit SparseRows(const MdpModel& m) {
    offset.reserve(m.n_pairs() + 1);
    offset.push_back(0);
    for (State s = 0; s < m.n_states(); ++s) {
      for (Action a = 0; a < m.n_actions(); ++a) {
        const auto r = m.row(s, a);
        for (State x = 0; x < r.size(); ++x) {
          if (r[x] > 0.0) {
            next.push_back(x);
            prob.push_back(r[x]);
          }
        }
        offset.push_back(next.size());
      }
    }
  }

  [[nodiscard]] double expect(std::size_t pair, std::span<const double> v) const {
    double acc = 0.0;
    for (std::size_t k = offset[pair]; k < offset[pair + 1]; ++k) acc += prob[k] * v[next[k]];
    return acc;
  }
};

// Relative value iteration on the transform tau P + (1 - tau) I. `allowed`
// restricts each state to a single action when non-empty.
bool rvi_attempt(const MdpModel& m, const SparseRows& rows, const Policy& allowed, double tau,
                 double epsilon, std::size_t max_iterations, bool watch_oscillation,
                 SolveResult& out) {
  const std::size_t S = m.n_states(), A = m.n_actions();
  std::vector<double> u(S, 0.0), next(S), diff(S);
  Policy policy(S, 0);
  double reference_span = std::numeric_limits<double>::infinity();
  constexpr std::size_t kWindow = 1000;

  for (std::size_t it = 1; it <= max_iterations; ++it) {
    for (State s = 0; s < S; ++s) {
      double best = -std::numeric_limits<double>::infinity();
      Action best_a = 0;
      const Action a_begin = allowed.empty() ? 0 : allowed[s];
      const Action a_end = allowed.empty() ? A : allowed[s] + 1;
      for (Action a = a_begin; a < a_end; ++a) {
        const double q = m.reward(s, a) + tau * rows.expect(s * A + a, u) + (1.0 - tau) * u[s];
        if (q > best) {
          best = q;
          best_a = a;
        }
      }
      next[s] = best;
      policy[s] = best_a;
    }
    for (State s = 0; s < S; ++s) diff[s] = next[s] - u[s];
    const double sp = span(diff);
    if (sp < epsilon) {
      const auto [lo, hi] = std::minmax_element(diff.begin(), diff.end());
      out.value.gain = 0.5 * (*lo + *hi);
      const double base = *std::min_element(u.begin(), u.end());
      out.value.bias.resize(S);
      for (State s = 0; s < S; ++s) out.value.bias[s] = tau * (u[s] - base);
      out.policy = std::move(policy);
      out.iterations = it;
      return true;
    }
    if (watch_oscillation && it % kWindow == 0) {
      if (sp > 0.999 * reference_span) return false;
      reference_span = sp;
    }
    const double base = *std::min_element(next.begin(), next.end());
    for (State s = 0; s < S; ++s) u[s] = next[s] - base;
  }
  throw SolverError("relative_value_iteration: iteration cap exceeded");
}

SolveResult rvi(const MdpModel& m, const Policy& allowed, double epsilon,
                std::size_t max_iterations) {
  if (!(epsilon > 0.0)) throw std::invalid_argument("relative_value_iteration: epsilon must be > 0");
  const SparseRows rows(m);
  SolveResult out;
  if (rvi_attempt(m, rows, allowed, 1.0, epsilon, max_iterations, true, out)) return out;
  out.damped = true;
  rvi_attempt(m, rows, allowed, 0.99, epsilon, max_iterations, false, out);
  return out;
}

}  // namespace

SolveResult relative_value_iteration(const MdpModel& model, double epsilon,
                                     std::size_t max_iterations) {
  return rvi(model, {}, epsilon, max_iterations);
}

double policy_gain(const MdpModel& model, const Policy& policy, double epsilon) {
  if (policy.size() != model.n_states()) throw std::invalid_argument("policy_gain: policy size");
  for (Action a : policy)
    if (a >= model.n_actions()) throw std::invalid_argument("policy_gain: action out of range");
  return rvi(model, policy, epsilon, 1'000'000).value.gain;
}

double uniform_policy_gain(const MdpModel& model, double epsilon) {
  const std::size_t S = model.n_states(), A = model.n_actions();
  MdpModel avg(S, 1);
  for (State s = 0; s < S; ++s) {
    for (Action a = 0; a < A; ++a) {
      avg.reward(s, 0) += model.reward(s, a) / static_cast<double>(A);
      for (State x = 0; x < S; ++x) avg.p(s, 0, x) += model.p(s, a, x) / static_cast<double>(A);
    }
  }
  return relative_value_iteration(avg, epsilon).value.gain;
}

namespace {

std::vector<double> hitting_times(const MdpModel& m, const SparseRows& rows, State target) {
  const std::size_t S = m.n_states(), A = m.n_actions();
  if (target >= S) throw std::out_of_range("min_hitting_times: target out of range");

  // Backward reachability: every state must have a path into the target.
  std::vector<char> reaches(S, 0);
  reaches[target] = 1;
  for (bool grew = true; grew;) {
    grew = false;
    for (State s = 0; s < S; ++s) {
      if (reaches[s]) continue;
      for (std::size_t k = rows.offset[s * A]; k < rows.offset[(s + 1) * A] && !reaches[s]; ++k) {
        if (reaches[rows.next[k]]) reaches[s] = grew = true;
      }
    }
  }
  if (std::find(reaches.begin(), reaches.end(), 0) != reaches.end())
    throw SolverError("min_hitting_times: target unreachable from some state");

  constexpr double kTolerance = 1e-10;
  constexpr std::size_t kMaxSweeps = 1'000'000;
  constexpr double kDivergence = 1e15;
  std::vector<double> v(S, 0.0);
  for (std::size_t sweep = 0; sweep < kMaxSweeps; ++sweep) {
    double change = 0.0;
    for (State s = 0; s < S; ++s) {
      if (s == target) continue;
      double best = std::numeric_limits<double>::infinity();
      for (Action a = 0; a < A; ++a) best = std::min(best, rows.expect(s * A + a, v));
      const double updated = 1.0 + best;  // v[target] stays 0
      change = std::max(change, std::abs(updated - v[s]));
      v[s] = updated;
    }
    if (change < kTolerance) return v;
    if (v[0] > kDivergence || change > kDivergence)
      throw SolverError("min_hitting_times: diverging, target unreachable");
  }
  throw SolverError("min_hitting_times: iteration cap exceeded");
}

}  // namespace

std::vector<double> min_hitting_times(const MdpModel& model, State target) {
  return hitting_times(model, SparseRows(model), target);
}

std::vector<std::vector<double>> all_hitting_times(const MdpModel& model, Exec exec) {
  const std::size_t S = model.n_states();
  const SparseRows rows(model);
  std::vector<std::vector<double>> out(S);
  if (exec == Exec::kSerial) {
    for (State t = 0; t < S; ++t) out[t] = hitting_times(model, rows, t);
    return out;
  }
  std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t t = 0; t < static_cast<std::ptrdiff_t>(S); ++t) {
    try {
      out[t] = hitting_times(model, rows, static_cast<State>(t));
    } catch (...) {
#pragma omp critical(ucrl_hitting_failure)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  return out;
}

RowDispersion row_dispersion(std::span<const double> row) {
  RowDispersion d;
  double root_sum = 0.0;
  for (double q : row) {
    if (q > 0.0) ++d.support_size;
    d.gini += q * (1.0 - q);
    root_sum += std::sqrt(q * (1.0 - q));
  }
  d.effective_support = root_sum * root_sum;
  return d;
}

MdpMetrics metrics(const MdpModel& model, Exec exec) {
  const std::size_t S = model.n_states(), A = model.n_actions();
  const auto hit = all_hitting_times(model, exec);
  MdpMetrics out;
  for (State t = 0; t < S; ++t)
    for (State s = 0; s < S; ++s)
      if (s != t) out.diameter = std::max(out.diameter, hit[t][s]);

  out.local_diameter.assign(S, 0.0);
  out.gini.assign(S * A, 0.0);
  out.effective_support.assign(S * A, 0.0);
  out.support_size.assign(S * A, 0);
  std::vector<char> successor(S);
  for (State s = 0; s < S; ++s) {
    std::fill(successor.begin(), successor.end(), 0);
    for (Action a = 0; a < A; ++a) {
      const auto r = model.row(s, a);
      for (State x = 0; x < S; ++x)
        if (r[x] > 0.0) successor[x] = 1;
      const auto d = row_dispersion(r);
      out.gini[s * A + a] = d.gini;
      out.effective_support[s * A + a] = d.effective_support;
      out.support_size[s * A + a] = d.support_size;
    }
    double local = 0.0;
    for (State x = 0; x < S; ++x) {
      if (!successor[x]) continue;
      for (State y = 0; y < S; ++y)
        if (successor[y] && x != y) local = std::max(local, hit[y][x]);
    }
    out.local_diameter[s] = local;
  }
  return out;
}

RegretBoundReport regret_bound_report(const MdpModel& model, double horizon, double delta) {
  if (!(horizon > 1.0)) throw std::invalid_argument("regret_bound_report: horizon must be > 1");
  RegretBoundReport rep;
  rep.n_states = model.n_states();
  rep.n_actions = model.n_actions();
  rep.horizon = horizon;
  rep.delta = delta;
  rep.metrics = metrics(model);
  const auto& m = rep.metrics;
  const double S = static_cast<double>(rep.n_states), A = static_cast<double>(rep.n_actions);
  const double D = m.diameter;
  const double sum_k = static_cast<double>(
      std::accumulate(m.support_size.begin(), m.support_size.end(), std::size_t{0}));

  double floored = 0.0, weighted = 0.0;
  for (State s = 0; s < rep.n_states; ++s) {
    for (Action a = 0; a < rep.n_actions; ++a) {
      const double term = m.local_diameter[s] * m.local_diameter[s] *
                          m.effective_support[s * rep.n_actions + a];
      floored += std::max(term, 1.0);
      weighted += term;
    }
  }
  rep.ucrl2 = D * S * std::sqrt(A);
  rep.scal_plus = D * std::sqrt(sum_k);
  rep.ucrl2b = std::sqrt(D * sum_k * std::log(horizon));
  rep.ucrl3 = std::sqrt(floored) + D;
  rep.ucrl3_constant = 5.0 * weighted + 10.0 * std::sqrt(S * A) + 2.0 * D;
  return rep;
}

}  // namespace ucrl
