#pragma once

// Independent reference solvers for the tests: a dense two-phase simplex,
// exhaustive vertex enumeration for box-plus-budget programs, brute-force
// policy enumeration for the average-reward optimum, and SSP policy iteration
// with exact linear solves for hitting times.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <vector>

#include "ucrl/mdp.hpp"
#include "ucrl/random.hpp"

namespace oracle {

enum class Rel { kLe, kGe, kEq };

struct Constraint {
  std::vector<double> a;
  Rel rel;
  double b;
};

/// max c.x subject to the constraints and x >= 0. Returns nullopt when
/// infeasible. Dense tableau, Bland's rule, two phases.
inline std::optional<double> lp_max(const std::vector<double>& c, std::vector<Constraint> cons) {
  const std::size_t n = c.size();
  const std::size_t m = cons.size();
  for (auto& k : cons) {
    if (k.b < 0.0) {
      for (double& v : k.a) v = -v;
      k.b = -k.b;
      if (k.rel == Rel::kLe) k.rel = Rel::kGe;
      else if (k.rel == Rel::kGe) k.rel = Rel::kLe;
    }
  }
  std::size_t n_slack = 0, n_art = 0;
  for (const auto& k : cons) {
    if (k.rel != Rel::kEq) ++n_slack;
    if (k.rel != Rel::kLe) ++n_art;
  }
  const std::size_t cols = n + n_slack + n_art;
  std::vector<std::vector<double>> t(m, std::vector<double>(cols + 1, 0.0));
  std::vector<std::size_t> basis(m);
  std::size_t si = n, ai = n + n_slack;
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) t[i][j] = cons[i].a[j];
    t[i][cols] = cons[i].b;
    if (cons[i].rel == Rel::kLe) {
      t[i][si] = 1.0;
      basis[i] = si++;
    } else if (cons[i].rel == Rel::kGe) {
      t[i][si++] = -1.0;
      t[i][ai] = 1.0;
      basis[i] = ai++;
    } else {
      t[i][ai] = 1.0;
      basis[i] = ai++;
    }
  }
  constexpr double tol = 1e-12;
  auto run = [&](const std::vector<double>& obj, std::size_t usable) {
    for (int guard = 0; guard < 100000; ++guard) {
      std::vector<double> red(usable);
      for (std::size_t j = 0; j < usable; ++j) {
        red[j] = obj[j];
        for (std::size_t i = 0; i < m; ++i) red[j] -= obj[basis[i]] * t[i][j];
      }
      std::size_t enter = usable;
      for (std::size_t j = 0; j < usable; ++j)
        if (red[j] > tol) {
          enter = j;
          break;
        }
      if (enter == usable) return true;
      std::size_t leave = m;
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < m; ++i) {
        if (t[i][enter] > tol) {
          const double ratio = t[i][cols] / t[i][enter];
          if (ratio < best - tol || (std::abs(ratio - best) <= tol && basis[i] < basis[leave])) {
            best = ratio;
            leave = i;
          }
        }
      }
      if (leave == m) return false;  // unbounded
      const double piv = t[leave][enter];
      for (double& v : t[leave]) v /= piv;
      for (std::size_t i = 0; i < m; ++i) {
        if (i == leave || t[i][enter] == 0.0) continue;
        const double f = t[i][enter];
        for (std::size_t j = 0; j <= cols; ++j) t[i][j] -= f * t[leave][j];
      }
      basis[leave] = enter;
    }
    return false;
  };
  std::vector<double> phase1(cols, 0.0);
  for (std::size_t j = n + n_slack; j < cols; ++j) phase1[j] = -1.0;
  run(phase1, cols);
  double infeas = 0.0;
  for (std::size_t i = 0; i < m; ++i)
    if (basis[i] >= n + n_slack) infeas += t[i][cols];
  if (infeas > 1e-9) return std::nullopt;
  std::vector<double> phase2(cols, 0.0);
  std::copy(c.begin(), c.end(), phase2.begin());
  if (!run(phase2, n + n_slack)) return std::nullopt;
  double value = 0.0;
  for (std::size_t i = 0; i < m; ++i)
    if (basis[i] < n) value += c[basis[i]] * t[i][cols];
  return value;
}

/// max f.q over lo <= q <= hi, sum q <= cap by enumerating the vertices:
/// every coordinate at a bound, or one coordinate set by the budget.
inline double box_budget_max(const std::vector<double>& f, const std::vector<double>& lo,
                             const std::vector<double>& hi, double cap) {
  const std::size_t k = f.size();
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t mask = 0; mask < (std::size_t{1} << k); ++mask) {
    std::vector<double> q(k);
    for (std::size_t i = 0; i < k; ++i) q[i] = (mask >> i & 1) ? hi[i] : lo[i];
    double sum = 0.0;
    for (double v : q) sum += v;
    auto value = [&] {
      double s = 0.0;
      for (std::size_t i = 0; i < k; ++i) s += f[i] * q[i];
      return s;
    };
    if (sum <= cap + 1e-12) best = std::max(best, value());
    for (std::size_t j = 0; j < k; ++j) {
      const double rest = sum - q[j];
      const double qj = cap - rest;
      if (qj < lo[j] - 1e-12 || qj > hi[j] + 1e-12) continue;
      const double keep = q[j];
      q[j] = qj;
      best = std::max(best, value());
      q[j] = keep;
    }
  }
  return best;
}

/// max f.p over distributions with ||p - p_hat||_1 <= r, as an LP in (p, d).
inline double l1_ball_max(const std::vector<double>& f, const std::vector<double>& p_hat, double r) {
  const std::size_t S = f.size();
  std::vector<double> c(2 * S, 0.0);
  std::copy(f.begin(), f.end(), c.begin());
  std::vector<Constraint> cons;
  for (std::size_t i = 0; i < S; ++i) {
    std::vector<double> a(2 * S, 0.0);
    a[i] = 1.0;
    a[S + i] = -1.0;
    cons.push_back({a, Rel::kLe, p_hat[i]});
    a[S + i] = 1.0;
    cons.push_back({a, Rel::kGe, p_hat[i]});
  }
  std::vector<double> mass(2 * S, 0.0), dev(2 * S, 0.0);
  for (std::size_t i = 0; i < S; ++i) {
    mass[i] = 1.0;
    dev[S + i] = 1.0;
  }
  cons.push_back({mass, Rel::kEq, 1.0});
  cons.push_back({dev, Rel::kLe, r});
  return *lp_max(c, cons);
}

/// Gain of a unichain policy from the stationary linear system
/// (I - P) h + g 1 = r with h(0) = 0.
inline double policy_gain_exact(const ucrl::MdpModel& m, const ucrl::Policy& pi) {
  const auto S = static_cast<Eigen::Index>(m.n_states());
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(S, S);
  Eigen::VectorXd rhs(S);
  for (Eigen::Index s = 0; s < S; ++s) {
    const auto row = m.row(static_cast<std::size_t>(s), pi[static_cast<std::size_t>(s)]);
    for (Eigen::Index x = 1; x < S; ++x) M(s, x) = (s == x ? 1.0 : 0.0) - row[static_cast<std::size_t>(x)];
    M(s, 0) = 1.0;  // column 0 carries g since h(0) = 0
    rhs(s) = m.reward(static_cast<std::size_t>(s), pi[static_cast<std::size_t>(s)]);
  }
  return M.fullPivLu().solve(rhs)(0);
}

/// Best gain over all A^S deterministic policies (unichain models only).
inline double brute_force_gain(const ucrl::MdpModel& m) {
  const std::size_t S = m.n_states(), A = m.n_actions();
  ucrl::Policy pi(S, 0);
  double best = -std::numeric_limits<double>::infinity();
  while (true) {
    best = std::max(best, policy_gain_exact(m, pi));
    std::size_t i = 0;
    while (i < S && ++pi[i] == A) pi[i++] = 0;
    if (i == S) break;
  }
  return best;
}

/// Exact expected hitting times of `target` under a proper policy.
inline Eigen::VectorXd hitting_times_exact(const ucrl::MdpModel& m, const ucrl::Policy& pi,
                                           std::size_t target) {
  const auto S = static_cast<Eigen::Index>(m.n_states());
  Eigen::MatrixXd M = Eigen::MatrixXd::Identity(S, S);
  Eigen::VectorXd rhs = Eigen::VectorXd::Ones(S);
  for (Eigen::Index s = 0; s < S; ++s) {
    if (static_cast<std::size_t>(s) == target) {
      rhs(s) = 0.0;
      continue;
    }
    const auto row = m.row(static_cast<std::size_t>(s), pi[static_cast<std::size_t>(s)]);
    for (Eigen::Index x = 0; x < S; ++x)
      if (static_cast<std::size_t>(x) != target) M(s, x) -= row[static_cast<std::size_t>(x)];
  }
  return M.fullPivLu().solve(rhs);
}

/// SSP policy iteration started from a proper policy (models with full-support
/// rows make every policy proper).
inline std::vector<double> hitting_times_pi(const ucrl::MdpModel& m, std::size_t target) {
  const std::size_t S = m.n_states(), A = m.n_actions();
  ucrl::Policy pi(S, 0);
  Eigen::VectorXd v = hitting_times_exact(m, pi, target);
  for (int it = 0; it < 1000; ++it) {
    bool changed = false;
    for (std::size_t s = 0; s < S; ++s) {
      if (s == target) continue;
      auto q = [&](std::size_t a) {
        double val = 1.0;
        for (std::size_t x = 0; x < S; ++x)
          if (x != target) val += m.p(s, a, x) * v(static_cast<Eigen::Index>(x));
        return val;
      };
      std::size_t best = pi[s];
      for (std::size_t a = 0; a < A; ++a)
        if (q(a) < q(best) - 1e-12) best = a;
      if (best != pi[s]) {
        pi[s] = best;
        changed = true;
      }
    }
    if (!changed) break;
    v = hitting_times_exact(m, pi, target);
  }
  return {v.data(), v.data() + v.size()};
}

/// Random model with every row of full support, so every policy is unichain,
/// aperiodic and proper for any hitting target.
inline ucrl::MdpModel random_dense_model(std::size_t S, std::size_t A, ucrl::Rng& rng) {
  ucrl::MdpModel m(S, A);
  for (std::size_t s = 0; s < S; ++s)
    for (std::size_t a = 0; a < A; ++a) {
      auto row = m.row(s, a);
      double total = 0.0;
      for (double& v : row) total += (v = 0.01 + ucrl::gamma_draw(rng, 0.5));
      for (double& v : row) v /= total;
      m.reward(s, a) = ucrl::uniform01(rng);
    }
  return m;
}

}  // namespace oracle
