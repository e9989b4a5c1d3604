#pragma once

// Seeded multi-run experiments: every (agent, run) pair is an independent
// work item, scheduled over an OpenMP team and aggregated after a
// deterministic sort, so outputs do not depend on the worker count.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "ucrl/agents.hpp"
#include "ucrl/config.hpp"
#include "ucrl/envs.hpp"

namespace ucrl::harness {

MdpModel env_model(const EnvSpec& spec);
State env_initial_state(const EnvSpec& spec);
envs::Environment make_env(const EnvSpec& spec, std::uint64_t seed);

/// Geometric grid ceil(T^(j/n)) for j = 1..n, deduplicated, always ending at T.
std::vector<std::uint64_t> checkpoint_grid(std::uint64_t horizon, std::size_t n);

inline constexpr std::uint64_t kAgentSeedOffset = std::uint64_t{1} << 32;

struct RunTrace {
  std::string agent;
  std::size_t run_index = 0;
  std::uint64_t env_seed = 0;
  std::uint64_t agent_seed = 0;
  std::vector<double> reward_prefix;  ///< sum of rewards up to each checkpoint
  std::vector<double> regret;         ///< t g* - reward_prefix
};

/// One run: seeds base + i for the environment and base + i + 2^32 for the agent.
RunTrace simulate(const agents::AgentSpec& agent, const EnvSpec& env, const MdpModel& truth,
                  double optimal_gain, const std::vector<std::uint64_t>& checkpoints,
                  std::uint64_t base_seed, std::size_t run_index);

struct AgentSeries {
  std::string agent;
  std::vector<double> mean, q25, q75;
};

struct AggregateResult {
  std::vector<std::uint64_t> checkpoints;
  double optimal_gain = 0.0;
  std::vector<AgentSeries> series;  ///< config order
};

/// Nearest-rank quantile: the ceil(q n)-th smallest value (1-based, at least 1).
double nearest_rank(std::vector<double> values, double q);

struct ExperimentResult {
  AggregateResult aggregate;
  std::vector<RunTrace> runs;  ///< sorted by (agent config order, run index)
};

/// Worker count: the CLI value if given, else UCRL_JOBS, else the config;
/// 0 at the end of that chain means the OpenMP default.
std::size_t resolve_jobs(std::optional<std::size_t> cli, const ExperimentConfig& cfg);

ExperimentResult run_experiment(const ExperimentConfig& cfg, std::size_t jobs);

/// Writes runs.csv, aggregate.csv and summary.json into cfg.out.
void write_outputs(const ExperimentConfig& cfg, const ExperimentResult& result);

nlohmann::json report_metrics(const EnvSpec& env, double horizon, double delta);

}  // namespace ucrl::harness
