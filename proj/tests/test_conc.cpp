#include <cmath>
#include <vector>

#include "doctest.h"
#include "ucrl/conc.hpp"
#include "ucrl/random.hpp"

using namespace ucrl::conc;

namespace {

// Clauses written out from the formulas, independent of the library.
struct ClauseOracle {
  double p_hat;
  double n;
  double delta;
  bool sub_gaussian = true;

  [[nodiscard]] double ell() const {
    const double eta = 1.12;
    return eta * std::log(std::max(1.0, std::log(n)) * std::log(eta * n) /
                          (std::log(eta) * std::log(eta) * delta));
  }
  [[nodiscard]] double beta() const {
    return std::sqrt(2.0 * (1.0 + 1.0 / n) * std::log(std::sqrt(n + 1.0) / delta) / n);
  }
  static double g(double p) {
    if (p <= 0.0 || p >= 1.0) return 0.0;
    if (p == 0.5) return 0.25;
    return (0.5 - p) / std::log(1.0 / p - 1.0);
  }
  [[nodiscard]] bool feasible(double q) const {
    const double l = ell();
    if (std::abs(p_hat - q) > std::sqrt(2.0 * q * (1.0 - q) * l / n) + l / (3.0 * n)) return false;
    if (!sub_gaussian) return true;
    const double z = (p_hat - q) / beta();
    if (z > 0.0) return z <= std::sqrt(g(q));
    const double gu = q < 0.5 ? g(q) : q * (1.0 - q);
    return -z <= std::sqrt(gu);
  }
};

// Grid hull of the feasible set at step 1e-6.
ConfInterval grid_hull(const ClauseOracle& o) {
  double lo = 2.0, hi = -1.0;
  for (int i = 0; i <= 1'000'000; ++i) {
    const double q = i * 1e-6;
    if (o.feasible(q)) {
      lo = std::min(lo, q);
      hi = std::max(hi, q);
    }
  }
  return {lo, hi};
}

}  // namespace

TEST_CASE("ell matches high-precision evaluations") {
  CHECK(ell(2, 0.05) == doctest::Approx(7.991846120065952).epsilon(1e-13));
  CHECK(ell(1, 0.5) == doctest::Approx(3.215083360650594).epsilon(1e-13));
  CHECK(ell(100, 0.01) == doctest::Approx(13.48341842492173).epsilon(1e-13));
}

TEST_CASE("ell monotonicity") {
  for (std::uint64_t n = 3; n < 2000; ++n) CHECK(ell(n + 1, 0.05) >= ell(n, 0.05));
  for (double d = 0.01; d < 0.9; d += 0.01) CHECK(ell(50, d + 0.01) < ell(50, d));
}

TEST_CASE("ell rejects bad input") {
  CHECK_THROWS_AS(ell(0, 0.1), std::invalid_argument);
  CHECK_THROWS_AS(ell(5, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(ell(5, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(ell(5, 0.1, PeelingConfig{1.0}), std::invalid_argument);
}

TEST_CASE("beta_laplace values and decay") {
  CHECK(beta_laplace(1, 1.0) == doctest::Approx(1.177410022515475).epsilon(1e-13));
  CHECK(beta_laplace(100, 0.05) == doctest::Approx(0.3273018624234933).epsilon(1e-13));
  CHECK(beta_laplace(1'000'000, 0.05) < 0.01);
  CHECK(beta_laplace(3, 0.05) > 0.0);
  CHECK_THROWS_AS(beta_laplace(0, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(beta_laplace(3, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(beta_laplace(3, 1.5), std::invalid_argument);
}

TEST_CASE("Bernoulli envelopes") {
  CHECK(g_env(0.5) == 0.25);
  CHECK(g_env(0.0) == 0.0);
  CHECK(g_env(1.0) == 0.0);
  CHECK(g_under(0.7) == doctest::Approx(0.21));
  CHECK(g_under(0.2) == g_env(0.2));
  CHECK(g_env(0.5 + 1e-6) == doctest::Approx(0.25).epsilon(1e-5));
  CHECK(g_env(0.3) == doctest::Approx(0.2 / std::log(7.0 / 3.0)));
}

TEST_CASE("reward radius") {
  CHECK(reward_radius(100, 0.0, 0.01) == doctest::Approx(0.31461309658150696).epsilon(1e-13));
  for (std::uint64_t n = 3; n < 500; ++n) CHECK(reward_radius(n + 1, 0.1, 0.01) <= reward_radius(n, 0.1, 0.01));
  CHECK(reward_radius(100, 0.25, 0.01) >= reward_radius(100, 0.0, 0.01));
  CHECK_THROWS_AS(reward_radius(10, -0.1, 0.01), std::invalid_argument);
}

TEST_CASE("bernoulli interval boundary cases") {
  for (std::uint64_t n : {1, 2, 10, 1000}) CHECK(bernoulli_interval(0.0, n, 0.01).lo == 0.0);
  CHECK(bernoulli_interval(1.0, 10, 0.01).lo == 9.765625e-4);
  CHECK(bernoulli_interval(1.0, 10, 0.01).hi == 1.0);
  CHECK_THROWS_AS(bernoulli_interval(1.2, 10, 0.01), std::invalid_argument);
  CHECK_THROWS_AS(bernoulli_interval(-0.1, 10, 0.01), std::invalid_argument);

  IntervalOptions tighten;
  tighten.atypical = AtypicalMode::kTighten;
  IntervalOptions off;
  off.atypical = AtypicalMode::kOff;
  const auto t = bernoulli_interval(1.0, 50, 0.01, tighten);
  const auto o = bernoulli_interval(1.0, 50, 0.01, off);
  CHECK(t.lo == std::max(o.lo, std::ldexp(1.0, -50)));
}

TEST_CASE("bernoulli interval matches the grid oracle") {
  struct Case {
    double p_hat;
    std::uint64_t n;
    double delta;
  };
  for (const Case c : {Case{0.5, 200, 0.01}, Case{0.1, 30, 0.01}, Case{0.85, 1000, 0.001},
                       Case{0.0, 40, 0.05}, Case{0.02, 500, 1e-4}}) {
    CAPTURE(c.p_hat);
    CAPTURE(c.n);
    IntervalOptions opts;
    opts.atypical = AtypicalMode::kOff;
    const auto got = bernoulli_interval(c.p_hat, c.n, c.delta, opts);
    const auto want = grid_hull(ClauseOracle{c.p_hat, static_cast<double>(c.n), c.delta});
    CHECK(std::abs(got.lo - want.lo) <= 2e-6);
    CHECK(std::abs(got.hi - want.hi) <= 2e-6);
    CHECK(got.lo <= c.p_hat);
    CHECK(got.hi >= c.p_hat);
  }
}

TEST_CASE("feasible set agrees with the interval away from its endpoints") {
  for (double p_hat : {0.5, 0.25, 0.9}) {
    const std::uint64_t n = 120;
    const auto iv = bernoulli_interval(p_hat, n, 0.01);
    for (int i = 0; i <= 1'000'000; i += 7) {
      const double q = i * 1e-6;
      if (q > iv.lo + 2e-6 && q < iv.hi - 2e-6) CHECK(bernoulli_feasible(q, p_hat, n, 0.01));
      if (q < iv.lo - 2e-6 || q > iv.hi + 2e-6) CHECK_FALSE(bernoulli_feasible(q, p_hat, n, 0.01));
    }
  }
}

TEST_CASE("dropping the sub-Gaussian clause only widens") {
  IntervalOptions bern;
  bern.sub_gaussian_clause = false;
  for (std::uint64_t n : {3, 10, 57, 200, 1000}) {
    for (std::uint64_t k = 0; k <= n; k += std::max<std::uint64_t>(1, n / 17)) {
      const double p = static_cast<double>(k) / static_cast<double>(n);
      const auto a = bernoulli_interval(p, n, 0.01);
      const auto b = bernoulli_interval(p, n, 0.01, bern);
      CHECK(b.lo <= a.lo);
      CHECK(b.hi >= a.hi);
    }
  }
  const auto a = bernoulli_interval(0.5, 200, 0.01);
  const auto b = bernoulli_interval(0.5, 200, 0.01, bern);
  CHECK((b.lo < a.lo || b.hi > a.hi));
}

TEST_CASE("endpoints are monotone in p_hat and shrink in n") {
  for (std::uint64_t n : {5, 40, 300, 2500}) {
    ConfInterval prev{0.0, 0.0};
    for (std::uint64_t k = 0; k < n; ++k) {
      const auto iv = bernoulli_interval(static_cast<double>(k) / static_cast<double>(n), n, 0.01);
      // up to the bisection resolution
      CHECK(iv.lo >= prev.lo - 1e-12);
      CHECK(iv.hi >= prev.hi - 1e-12);
      prev = iv;
    }
  }
  for (double p : {0.0, 0.25, 0.5, 0.75}) {
    double width = 2.0;
    for (std::uint64_t n = 4; n <= 4096; n *= 2) {
      const double w = bernoulli_interval(p, n, 0.01).width();
      CHECK(w <= width);
      width = w;
    }
  }
}

TEST_CASE("per-pair delta") {
  CHECK(per_pair_delta(0.05, 6, 2) == doctest::Approx(0.05 / 21.0 / 12.0));
  CHECK_THROWS_AS(per_pair_delta(0.05, 0, 2), std::invalid_argument);
}

namespace {

// Accepted k range per n for a fixed true p, using the monotonicity of both
// endpoints in p_hat; k = n is evaluated directly because of the override.
struct Acceptance {
  std::vector<std::uint64_t> kmin, kmax;
};

Acceptance accepted_counts(double p, std::uint64_t horizon, double delta) {
  Acceptance acc{std::vector<std::uint64_t>(horizon + 1), std::vector<std::uint64_t>(horizon + 1)};
  for (std::uint64_t n = 1; n <= horizon; ++n) {
    auto iv = [&](std::uint64_t k) {
      return bernoulli_interval(static_cast<double>(k) / static_cast<double>(n), n, delta);
    };
    std::uint64_t a = 0, b = n;  // first k with hi(k) >= p
    while (a < b) {
      const std::uint64_t mid = (a + b) / 2;
      if (iv(mid).hi >= p) b = mid; else a = mid + 1;
    }
    acc.kmin[n] = a;
    a = 0, b = n;  // last k with lo(k) <= p, over k < n
    while (a < b) {
      const std::uint64_t mid = (a + b + 1) / 2;
      if (mid < n && iv(mid).lo <= p) a = mid; else b = mid - 1;
    }
    acc.kmax[n] = iv(a).lo <= p ? a : 0;
  }
  return acc;
}

}  // namespace

TEST_CASE("anytime coverage of transition and reward intervals") {
  const std::uint64_t horizon = 10'000;
  const int streams = 2000;
  const double delta = 0.05;
  for (double p : {0.05, 0.3, 0.7}) {
    CAPTURE(p);
    const auto acc = accepted_counts(p, horizon, delta);
    std::vector<bool> full(horizon + 1);
    for (std::uint64_t n = 1; n <= horizon; ++n) full[n] = bernoulli_interval(1.0, n, delta).contains(p);
    ucrl::Rng rng(1234 + static_cast<std::uint64_t>(p * 100));
    int trans_fail = 0, reward_fail = 0;
    for (int m = 0; m < streams; ++m) {
      std::uint64_t k = 0;
      bool t_bad = false, r_bad = false;
      for (std::uint64_t n = 1; n <= horizon && !(t_bad && r_bad); ++n) {
        k += ucrl::uniform01(rng) < p ? 1 : 0;
        if (!t_bad) {
          const bool in = k == n ? full[n] : (k >= acc.kmin[n] && k <= acc.kmax[n]);
          t_bad = !in;
        }
        if (!r_bad) {
          const double mean = static_cast<double>(k) / static_cast<double>(n);
          r_bad = std::abs(mean - p) > reward_radius(n, mean * (1.0 - mean), delta);
        }
      }
      trans_fail += t_bad;
      reward_fail += r_bad;
    }
    const double se = std::sqrt(delta * (1 - delta) / streams);
    CHECK(trans_fail / double(streams) <= delta + 3 * se);
    CHECK(reward_fail / double(streams) <= delta + 3 * se);
  }
}
