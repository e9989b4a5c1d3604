#include "ucrl/agents.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "ucrl/conc.hpp"

namespace ucrl::agents {

AgentStats::AgentStats(std::size_t S, std::size_t A)
    : n_states(S),
      n_actions(A),
      counts(S * A, 0),
      in_episode(S * A, 0),
      transitions(S * A * S, 0),
      reward_sum(S * A, 0.0),
      reward_sumsq(S * A, 0.0) {
  if (S == 0 || A == 0) throw std::invalid_argument("AgentStats: empty state or action space");
}

void AgentStats::record(State s, Action a, double r, State next) {
  if (s >= n_states || next >= n_states || a >= n_actions)
    throw std::invalid_argument("AgentStats::record: index out of range");
  if (!(r >= 0.0 && r <= 1.0)) throw std::invalid_argument("AgentStats::record: reward outside [0, 1]");
  const std::size_t p = pair(s, a);
  ++in_episode[p];
  ++transitions[p * n_states + next];
  reward_sum[p] += r;
  reward_sumsq[p] += r * r;
  ++steps;
}

void AgentStats::close_episode() {
  for (std::size_t p = 0; p < counts.size(); ++p) {
    counts[p] += in_episode[p];
    in_episode[p] = 0;
  }
}

namespace {

// Empirical rows, supports and the N >= 1 counts shared by every builder.
plan::BoundsTable empirical_table(const AgentStats& st, plan::BoundsForm form) {
  const std::size_t S = st.n_states, A = st.n_actions;
  plan::BoundsTable b(S, A, form);
  for (std::size_t p = 0; p < S * A; ++p) {
    const std::uint64_t raw = st.raw_count(p);
    b.counts[p] = std::max<std::uint64_t>(1, raw);
    if (raw == 0) continue;
    for (State x = 0; x < S; ++x) {
      const std::uint64_t k = st.transitions[p * S + x];
      if (k == 0) continue;
      b.p_hat[p * S + x] = static_cast<double>(k) / static_cast<double>(raw);
      b.emp_support[p].push_back(x);
    }
  }
  return b;
}

void clip_reward(plan::BoundsTable& b, std::size_t p, double mean, double radius) {
  b.reward_lo[p] = std::clamp(mean - radius, 0.0, 1.0);
  b.reward_hi[p] = std::clamp(mean + radius, 0.0, 1.0);
}

}  // namespace

plan::BoundsTable build_bounds_ucrl3(const AgentStats& st, double delta, bool sub_gaussian_clause) {
  const std::size_t S = st.n_states, A = st.n_actions;
  const double delta_eff = conc::per_pair_delta(delta, S, A);
  conc::IntervalOptions opts;
  opts.sub_gaussian_clause = sub_gaussian_clause;
  plan::BoundsTable b = empirical_table(st, plan::BoundsForm::kIntervals);
  for (std::size_t p = 0; p < S * A; ++p) {
    const std::uint64_t n = st.raw_count(p);
    if (n == 0) continue;  // [0, 1] everywhere
    const double nd = static_cast<double>(n);
    const double mean = st.reward_sum[p] / nd;
    const double var = std::max(0.0, st.reward_sumsq[p] / nd - mean * mean);
    clip_reward(b, p, mean, conc::reward_radius(n, var, delta_eff));
    for (State x = 0; x < S; ++x)
      b.trans[p * S + x] = conc::bernoulli_interval(b.p_hat[p * S + x], n, delta_eff, opts);
  }
  return b;
}

plan::BoundsTable build_bounds_ucrl2b(const AgentStats& st, double delta) {
  return build_bounds_ucrl3(st, delta, false);
}

plan::BoundsTable build_bounds_ucrl2(const AgentStats& st, std::uint64_t t, double delta) {
  if (t == 0) throw std::invalid_argument("build_bounds_ucrl2: t must be >= 1");
  if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("build_bounds_ucrl2: delta must lie in (0, 1)");
  const std::size_t S = st.n_states, A = st.n_actions;
  const double Sd = static_cast<double>(S), Ad = static_cast<double>(A), td = static_cast<double>(t);
  const double log_r = std::log(2.0 * Sd * Ad * td / delta);
  const double log_p = std::log(2.0 * Ad * td / delta);
  plan::BoundsTable b = empirical_table(st, plan::BoundsForm::kL1Ball);
  for (std::size_t p = 0; p < S * A; ++p) {
    const std::uint64_t n = st.raw_count(p);
    if (n == 0) continue;  // radius 2 covers the whole simplex
    const double nd = static_cast<double>(n);
    clip_reward(b, p, st.reward_sum[p] / nd, std::sqrt(3.5 * log_r / nd));
    b.l1_radius[p] = std::sqrt(14.0 * Sd * log_p / nd);
  }
  return b;
}

MdpModel psrl_sample(const AgentStats& st, double alpha, Rng& rng) {
  if (!(alpha > 0.0)) throw std::invalid_argument("psrl_sample: alpha must be > 0");
  const std::size_t S = st.n_states, A = st.n_actions;
  MdpModel m(S, A);
  for (State s = 0; s < S; ++s) {
    for (Action a = 0; a < A; ++a) {
      const std::size_t p = st.pair(s, a);
      auto row = m.row(s, a);
      double total = 0.0;
      for (State x = 0; x < S; ++x)
        total += (row[x] = gamma_draw(rng, alpha + static_cast<double>(st.transitions[p * S + x])));
      for (double& v : row) v /= total;
      const double n = static_cast<double>(st.raw_count(p));
      const double succ = std::min(st.reward_sum[p], n);
      m.reward(s, a) = beta_draw(rng, alpha + succ, alpha + n - succ);
    }
  }
  return m;
}

EpisodicAgent::EpisodicAgent(std::size_t S, std::size_t A, std::uint64_t seed)
    : rng_(seed), stats_(S, A) {}

void EpisodicAgent::start_episode() {
  stats_.close_episode();
  const std::uint64_t t_k = stats_.steps + 1;
  starts_.push_back(t_k);
  policy_ = plan_episode(t_k);
}

void EpisodicAgent::observe(State s, Action a, double r, State next) {
  stats_.record(s, a, r, next);
  const std::size_t p = stats_.pair(s, a);
  if (stats_.in_episode[p] >= stats_.visits(p)) start_episode();
}

namespace {

plan::PlanOptions episode_options(std::uint64_t t_k) {
  plan::PlanOptions o;
  o.epsilon = 1.0 / std::sqrt(static_cast<double>(t_k));
  return o;
}

void check_delta(double delta, const char* who) {
  if (!(delta > 0.0 && delta < 1.0))
    throw std::invalid_argument(std::string(who) + ": delta must lie in (0, 1)");
}

}  // namespace

Ucrl3Agent::Ucrl3Agent(std::size_t S, std::size_t A, const Ucrl3Options& opts, std::uint64_t seed)
    : EpisodicAgent(S, A, seed), opts_(opts) {
  check_delta(opts.delta, "ucrl3");
  if (!(opts.gamma >= 0.0)) throw std::invalid_argument("ucrl3: gamma must be >= 0");
  if (opts.support_refresh == 0) throw std::invalid_argument("ucrl3: support refresh period must be >= 1");
  start_episode();
}

Policy Ucrl3Agent::plan_episode(std::uint64_t t_k) {
  const auto bounds = build_bounds_ucrl3(stats(), opts_.delta);
  auto o = episode_options(t_k);
  o.gamma = opts_.gamma;
  o.support_refresh = opts_.support_refresh;
  last_ = plan::evi_noss(bounds, bounds.max_count(), o, rng_);
  return last_.policy;
}

Ucrl2bAgent::Ucrl2bAgent(std::size_t S, std::size_t A, double delta, std::uint64_t seed)
    : EpisodicAgent(S, A, seed), delta_(delta) {
  check_delta(delta, "ucrl2b");
  start_episode();
}

Policy Ucrl2bAgent::plan_episode(std::uint64_t t_k) {
  return plan::evi(build_bounds_ucrl2b(stats(), delta_), episode_options(t_k), rng_).policy;
}

Ucrl2Agent::Ucrl2Agent(std::size_t S, std::size_t A, double delta, std::uint64_t seed)
    : EpisodicAgent(S, A, seed), delta_(delta) {
  check_delta(delta, "ucrl2");
  start_episode();
}

Policy Ucrl2Agent::plan_episode(std::uint64_t t_k) {
  return plan::evi(build_bounds_ucrl2(stats(), t_k, delta_), episode_options(t_k), rng_).policy;
}

PsrlAgent::PsrlAgent(std::size_t S, std::size_t A, double alpha, std::uint64_t seed)
    : EpisodicAgent(S, A, seed), alpha_(alpha) {
  if (!(alpha > 0.0)) throw std::invalid_argument("psrl: alpha must be > 0");
  start_episode();
}

Policy PsrlAgent::plan_episode(std::uint64_t) {
  return relative_value_iteration(psrl_sample(stats(), alpha_, rng_), 1e-6).policy;
}

OptimalAgent::OptimalAgent(const MdpModel& truth)
    : policy_(relative_value_iteration(truth, 1e-8).policy) {}

RandomAgent::RandomAgent(std::size_t A, std::uint64_t seed) : n_actions_(A), rng_(seed) {
  if (A == 0) throw std::invalid_argument("random agent: no actions");
}

Action RandomAgent::act(State) const { return uniform_index(rng_, n_actions_); }

const std::vector<std::string>& registered_agents() {
  static const std::vector<std::string> names{"ucrl3", "ucrl2", "ucrl2b", "psrl", "optimal", "random"};
  return names;
}

std::unique_ptr<Agent> make_agent(const AgentSpec& spec, const MdpModel& truth, std::uint64_t seed) {
  const std::size_t S = truth.n_states(), A = truth.n_actions();
  if (spec.name == "ucrl3")
    return std::make_unique<Ucrl3Agent>(S, A, Ucrl3Options{spec.delta, spec.gamma, spec.lazy}, seed);
  if (spec.name == "ucrl2") return std::make_unique<Ucrl2Agent>(S, A, spec.delta, seed);
  if (spec.name == "ucrl2b") return std::make_unique<Ucrl2bAgent>(S, A, spec.delta, seed);
  if (spec.name == "psrl") return std::make_unique<PsrlAgent>(S, A, spec.alpha, seed);
  if (spec.name == "optimal") return std::make_unique<OptimalAgent>(truth);
  if (spec.name == "random") return std::make_unique<RandomAgent>(A, seed);
  throw std::invalid_argument("unknown agent '" + spec.name + "'");
}

}  // namespace ucrl::agents
