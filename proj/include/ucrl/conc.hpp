#pragma once

// Time-uniform concentration bounds used to build the confidence sets of
// the optimistic agents: the peeling log factor, the Laplace (method of
// mixtures) sub-Gaussian radius, the Bernoulli sub-Gaussian envelopes, the
// empirical-Bernstein reward radius, and the per-component transition
// interval obtained by inverting both concentration clauses.
//
// Everything here is a pure function and may be called from any thread.

#include <cstdint>
#include <stdexcept>

namespace ucrl::conc {

/// Base of the geometric peeling grid. Any value > 1 is valid.
struct PeelingConfig {
  double eta = 1.12;
};

/// Closed interval [lo, hi] inside [0, 1].
struct ConfInterval {
  double lo = 0.0;
  double hi = 1.0;

  [[nodiscard]] bool contains(double q) const { return lo <= q && q <= hi; }
  [[nodiscard]] double width() const { return hi - lo; }
};

/// What to do with the lower bound when every observation landed on the same
/// successor (p_hat == 1, n > 1).
enum class AtypicalMode {
  kReplace,  ///< lo = (1/2)^n, as prescribed for atypical sequences
  kTighten,  ///< lo = max(bisection lo, (1/2)^n)
  kOff,      ///< keep the bisection lower bound
};

struct IntervalOptions {
  PeelingConfig peeling{};
  AtypicalMode atypical = AtypicalMode::kReplace;
  bool sub_gaussian_clause = true;  ///< false drops the g / g_under clause
};

/// Peeling log factor
///   ell_n(delta) = eta * log( max(1, log n) * log(eta n) / (log^2(eta) delta) ).
/// The log(n) factor is clamped below by 1 so the bound stays finite for n < 3.
double ell(std::uint64_t n, double delta, const PeelingConfig& cfg = {});

/// Laplace sub-Gaussian radius
///   beta_n(delta) = sqrt( 2 (1 + 1/n) log(sqrt(n + 1) / delta) / n ).
/// Accepts delta in (0, 1].
double beta_laplace(std::uint64_t n, double delta);

/// Bernoulli sub-Gaussian envelope g(p) = (1/2 - p) / log(1/p - 1),
/// continuously extended at p in {0, 1/2, 1}.
double g_env(double p);

/// g_under(p) = g(p) for p < 1/2 and p (1 - p) otherwise.
double g_under(double p);

/// Empirical-Bernstein reward radius
///   max( beta_n(delta)/2, sqrt(2 var ell_n(delta) / n) + 7 ell_n(delta) / (3n) ).
double reward_radius(std::uint64_t n, double var_hat, double delta_eff,
                     const PeelingConfig& cfg = {});

/// True when q satisfies both the peeled Bernstein clause and (optionally)
/// the asymmetric Bernoulli sub-Gaussian clause for the empirical frequency
/// p_hat over n samples. This is the indicator the interval inversion bisects.
bool bernoulli_feasible(double q, double p_hat, std::uint64_t n, double delta_eff,
                        const IntervalOptions& opts = {});

/// Interval hull of { q in [0,1] : bernoulli_feasible(q, ...) }, computed by
/// bisection. Always contains p_hat, except that the atypical-sequence
/// override may lower `lo` further (it never raises it above p_hat).
ConfInterval bernoulli_interval(double p_hat, std::uint64_t n, double delta_eff,
                                const IntervalOptions& opts = {});

/// Per-pair effective confidence delta0 / (S A) with delta0 = delta / (3 + 3 S).
double per_pair_delta(double delta, std::size_t n_states, std::size_t n_actions);

}  // namespace ucrl::conc
