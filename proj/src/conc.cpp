#include "ucrl/conc.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace ucrl::conc {

namespace {

void check_count(std::uint64_t n, const char* what) {
  if (n == 0) throw std::invalid_argument(std::string(what) + ": sample count must be >= 1");
}

void check_open_delta(double delta, const char* what) {
  if (!(delta > 0.0 && delta < 1.0))
    throw std::invalid_argument(std::string(what) + ": delta must lie in (0, 1)");
}

constexpr int kBisectionSteps = 60;

// Both clauses, with the n-dependent factors precomputed.
struct Clauses {
  double p_hat;
  double bern_scale;   // 2 ell / n
  double bern_offset;  // ell / (3 n)
  double beta;
  bool sub_gaussian;

  [[nodiscard]] bool operator()(double q) const {
    const double gap = p_hat - q;
    if (std::abs(gap) > std::sqrt(bern_scale * q * (1.0 - q)) + bern_offset) return false;
    if (!sub_gaussian) return true;
    const double z = gap / beta;
    if (z > 0.0) return z <= std::sqrt(g_env(q));
    return -z <= std::sqrt(g_under(q));
  }
};

Clauses make_clauses(double p_hat, std::uint64_t n, double delta_eff, const IntervalOptions& opts) {
  const double l = ell(n, delta_eff, opts.peeling);
  const double nd = static_cast<double>(n);
  return Clauses{p_hat, 2.0 * l / nd, l / (3.0 * nd), beta_laplace(n, delta_eff),
                 opts.sub_gaussian_clause};
}

}  // namespace

double ell(std::uint64_t n, double delta, const PeelingConfig& cfg) {
  check_count(n, "ell");
  check_open_delta(delta, "ell");
  if (!(cfg.eta > 1.0)) throw std::invalid_argument("ell: eta must be > 1");
  const double nd = static_cast<double>(n);
  const double log_eta = std::log(cfg.eta);
  const double log_n = std::max(1.0, std::log(nd));
  return cfg.eta * std::log(log_n * std::log(cfg.eta * nd) / (log_eta * log_eta * delta));
}

double beta_laplace(std::uint64_t n, double delta) {
  check_count(n, "beta_laplace");
  if (!(delta > 0.0 && delta <= 1.0))
    throw std::invalid_argument("beta_laplace: delta must lie in (0, 1]");
  const double nd = static_cast<double>(n);
  return std::sqrt(2.0 * (1.0 + 1.0 / nd) * std::log(std::sqrt(nd + 1.0) / delta) / nd);
}

double g_env(double p) {
  if (p < 1e-12 || p > 1.0 - 1e-12) return 0.0;
  if (std::abs(p - 0.5) < 1e-9) return 0.25;
  return (0.5 - p) / std::log(1.0 / p - 1.0);
}

double g_under(double p) { return p < 0.5 ? g_env(p) : p * (1.0 - p); }

double reward_radius(std::uint64_t n, double var_hat, double delta_eff, const PeelingConfig& cfg) {
  if (var_hat < 0.0) throw std::invalid_argument("reward_radius: negative variance");
  const double nd = static_cast<double>(n);
  const double l = ell(n, delta_eff, cfg);
  const double laplace = 0.5 * beta_laplace(n, delta_eff);
  const double bernstein = std::sqrt(2.0 * var_hat * l / nd) + 7.0 * l / (3.0 * nd);
  return std::max(laplace, bernstein);
}

bool bernoulli_feasible(double q, double p_hat, std::uint64_t n, double delta_eff,
                        const IntervalOptions& opts) {
  return make_clauses(p_hat, n, delta_eff, opts)(q);
}

ConfInterval bernoulli_interval(double p_hat, std::uint64_t n, double delta_eff,
                                const IntervalOptions& opts) {
  if (!(p_hat >= 0.0 && p_hat <= 1.0))
    throw std::invalid_argument("bernoulli_interval: p_hat must lie in [0, 1]");
  const Clauses feasible = make_clauses(p_hat, n, delta_eff, opts);

  // p_hat is always feasible and each clause carves out an interval in q, so
  // the hull endpoints are found by bisecting from p_hat outwards.
  ConfInterval out{p_hat, p_hat};
  if (feasible(0.0)) {
    out.lo = 0.0;
  } else {
    double in = p_hat, outside = 0.0;
    for (int i = 0; i < kBisectionSteps; ++i) {
      const double mid = 0.5 * (in + outside);
      (feasible(mid) ? in : outside) = mid;
    }
    out.lo = in;
  }
  if (feasible(1.0)) {
    out.hi = 1.0;
  } else {
    double in = p_hat, outside = 1.0;
    for (int i = 0; i < kBisectionSteps; ++i) {
      const double mid = 0.5 * (in + outside);
      (feasible(mid) ? in : outside) = mid;
    }
    out.hi = in;
  }

  if (p_hat == 1.0 && n > 1) {
    const double floor = std::ldexp(1.0, -static_cast<int>(std::min<std::uint64_t>(n, 2000)));
    switch (opts.atypical) {
      case AtypicalMode::kReplace: out.lo = floor; break;
      case AtypicalMode::kTighten: out.lo = std::max(out.lo, floor); break;
      case AtypicalMode::kOff: break;
    }
  }
  return out;
}

double per_pair_delta(double delta, std::size_t n_states, std::size_t n_actions) {
  check_open_delta(delta, "per_pair_delta");
  if (n_states == 0 || n_actions == 0)
    throw std::invalid_argument("per_pair_delta: empty state or action space");
  const double s = static_cast<double>(n_states);
  const double delta0 = delta / (3.0 + 3.0 * s);
  return delta0 / (s * static_cast<double>(n_actions));
}

}  // namespace ucrl::conc
