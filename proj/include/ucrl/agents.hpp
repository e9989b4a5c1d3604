#pragma once

// Online learners sharing the doubling-episode schedule: UCRL3, UCRL2, a
// Bernstein-only UCRL2B stand-in, PSRL, plus two reference agents (the
// optimal policy of the true model and uniform random play).

#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "ucrl/mdp.hpp"
#include "ucrl/plan.hpp"
#include "ucrl/random.hpp"

namespace ucrl::agents {

/// Sufficient statistics of the observed trajectory. `counts` holds the raw
/// visit counts frozen at the last episode start; `in_episode` holds the
/// visits since then. Reads through visits() apply max(1, .).
struct AgentStats {
  std::size_t n_states = 0;
  std::size_t n_actions = 0;
  std::vector<std::uint64_t> counts;        ///< N at the current episode start
  std::vector<std::uint64_t> in_episode;    ///< v_k
  std::vector<std::uint64_t> transitions;   ///< n(s, a, s'), all time
  std::vector<double> reward_sum, reward_sumsq;
  std::uint64_t steps = 0;

  AgentStats() = default;
  AgentStats(std::size_t S, std::size_t A);

  [[nodiscard]] std::size_t pair(State s, Action a) const { return s * n_actions + a; }
  /// Raw number of visits to the pair, current episode included.
  [[nodiscard]] std::uint64_t raw_count(std::size_t pair) const {
    return counts[pair] + in_episode[pair];
  }
  /// Episode-start count with the N >= 1 convention.
  [[nodiscard]] std::uint64_t visits(std::size_t pair) const {
    return counts[pair] > 0 ? counts[pair] : 1;
  }

  /// Throws std::invalid_argument for out-of-range indices or r outside [0, 1].
  void record(State s, Action a, double r, State next);
  /// Fold v_k into N and reset v_k.
  void close_episode();
};

struct Ucrl3Options {
  double delta = 0.05;
  double gamma = 10.0;
  std::size_t support_refresh = 5;
};

/// Interval bounds from every sample seen so far (counts + in_episode).
/// `sub_gaussian_clause == false` gives the UCRL2B stand-in.
plan::BoundsTable build_bounds_ucrl3(const AgentStats& stats, double delta,
                                     bool sub_gaussian_clause = true);
plan::BoundsTable build_bounds_ucrl2b(const AgentStats& stats, double delta);
/// L1-ball bounds with the radii of the classic algorithm at global time t.
plan::BoundsTable build_bounds_ucrl2(const AgentStats& stats, std::uint64_t t, double delta);

/// Samples a model from the Dirichlet / Beta posterior with prior weight alpha.
MdpModel psrl_sample(const AgentStats& stats, double alpha, Rng& rng);

class Agent {
 public:
  virtual ~Agent() = default;
  [[nodiscard]] virtual std::string_view name() const = 0;
  /// Action for the current state; never mutates statistics.
  [[nodiscard]] virtual Action act(State s) const = 0;
  virtual void observe(State s, Action a, double r, State next) = 0;
};

/// Doubling-schedule bookkeeping. A new episode starts after the step on
/// which the visited pair reaches v >= max(1, N); the derived class then
/// replans from the folded statistics.
class EpisodicAgent : public Agent {
 public:
  [[nodiscard]] Action act(State s) const override { return policy_.at(s); }
  void observe(State s, Action a, double r, State next) override;

  [[nodiscard]] const AgentStats& stats() const { return stats_; }
  [[nodiscard]] const Policy& policy() const { return policy_; }
  /// 1-based start time t_k of every episode so far.
  [[nodiscard]] const std::vector<std::uint64_t>& episode_starts() const { return starts_; }

 protected:
  EpisodicAgent(std::size_t S, std::size_t A, std::uint64_t seed);

  /// Called once per episode with t_k = stats().steps + 1.
  virtual Policy plan_episode(std::uint64_t t_k) = 0;
  /// Derived constructors call this last.
  void start_episode();

  Rng rng_;

 private:
  AgentStats stats_;
  Policy policy_;
  std::vector<std::uint64_t> starts_;
};

class Ucrl3Agent final : public EpisodicAgent {
 public:
  Ucrl3Agent(std::size_t S, std::size_t A, const Ucrl3Options& opts, std::uint64_t seed);
  [[nodiscard]] std::string_view name() const override { return "ucrl3"; }
  [[nodiscard]] const plan::PlanResult& last_plan() const { return last_; }

 private:
  Policy plan_episode(std::uint64_t t_k) override;
  Ucrl3Options opts_;
  plan::PlanResult last_;
};

class Ucrl2bAgent final : public EpisodicAgent {
 public:
  Ucrl2bAgent(std::size_t S, std::size_t A, double delta, std::uint64_t seed);
  [[nodiscard]] std::string_view name() const override { return "ucrl2b"; }

 private:
  Policy plan_episode(std::uint64_t t_k) override;
  double delta_;
};

class Ucrl2Agent final : public EpisodicAgent {
 public:
  Ucrl2Agent(std::size_t S, std::size_t A, double delta, std::uint64_t seed);
  [[nodiscard]] std::string_view name() const override { return "ucrl2"; }

 private:
  Policy plan_episode(std::uint64_t t_k) override;
  double delta_;
};

class PsrlAgent final : public EpisodicAgent {
 public:
  PsrlAgent(std::size_t S, std::size_t A, double alpha, std::uint64_t seed);
  [[nodiscard]] std::string_view name() const override { return "psrl"; }

 private:
  Policy plan_episode(std::uint64_t t_k) override;
  double alpha_;
};

/// Plays the gain-optimal policy of the true model.
class OptimalAgent final : public Agent {
 public:
  explicit OptimalAgent(const MdpModel& truth);
  [[nodiscard]] std::string_view name() const override { return "optimal"; }
  [[nodiscard]] Action act(State s) const override { return policy_.at(s); }
  void observe(State, Action, double, State) override {}

 private:
  Policy policy_;
};

/// Uniformly random actions.
class RandomAgent final : public Agent {
 public:
  RandomAgent(std::size_t A, std::uint64_t seed);
  [[nodiscard]] std::string_view name() const override { return "random"; }
  [[nodiscard]] Action act(State s) const override;
  void observe(State, Action, double, State) override {}

 private:
  std::size_t n_actions_;
  mutable Rng rng_;
};

/// Agent name plus hyperparameters, as read from a config.
struct AgentSpec {
  std::string name;
  double delta = 0.05;
  double gamma = 10.0;
  std::size_t lazy = 5;  ///< NOSS support refresh period
  double alpha = 1.0;    ///< PSRL prior weight
};

const std::vector<std::string>& registered_agents();

/// Throws std::invalid_argument for unknown names or bad hyperparameters.
/// `truth` is needed only by the optimal reference agent.
std::unique_ptr<Agent> make_agent(const AgentSpec& spec, const MdpModel& truth,
                                  std::uint64_t seed);

}  // namespace ucrl::agents
