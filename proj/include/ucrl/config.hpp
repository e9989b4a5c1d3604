#pragma once

// Experiment configuration, read from a small TOML subset:
//
//   horizon = 200000          # top-level keys
//   runs = 20
//   seed = 1
//   out = "results/riverswim"
//   jobs = 0                  # 0: let OpenMP decide
//   checkpoints = 200
//
//   [env]
//   name = "riverswim"        # riverswim | four-room | two-room | garnet
//   states = 6
//
//   [agent.ucrl3]             # one table per agent, run in file order
//   delta = 0.05
//   gamma = 10
//   lazy = 5
//
// Values are integers, decimals, double-quoted strings or true/false.
// '#' starts a comment outside strings. No arrays, inline tables or
// multi-line values.

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "ucrl/agents.hpp"
#include "ucrl/envs.hpp"

namespace ucrl {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct EnvSpec {
  std::string name = "riverswim";
  std::size_t states = 6;     ///< riverswim and garnet
  envs::GarnetSpec garnet{};  ///< n_states is overwritten by `states`

  /// Throws ConfigError for unknown names or bad parameters.
  void validate() const;
};

struct ExperimentConfig {
  EnvSpec env;
  std::vector<agents::AgentSpec> agents;
  std::uint64_t horizon = 100'000;
  std::size_t runs = 10;
  std::uint64_t seed = 0;
  std::filesystem::path out = "out";
  std::size_t jobs = 0;
  std::size_t checkpoints = 200;

  void validate() const;
};

/// Throws ConfigError with a line number on malformed input.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::filesystem::path& path);

}  // namespace ucrl
