#pragma once

// Benchmark environments and the seeded simulator that samples transitions
// from a ground-truth model.

#include <cstdint>
#include <string>
#include <vector>

#include "ucrl/mdp.hpp"
#include "ucrl/random.hpp"

namespace ucrl::envs {

struct Transition {
  State next = 0;
  double reward = 0.0;
};

/// A ground-truth model plus the generator that drives its sampling. Two
/// instances with the same seed produce the same trajectory under the same
/// action sequence. Not thread-safe; confine an instance to one run at a time.
class Environment {
 public:
  Environment(MdpModel model, State initial_state, std::uint64_t seed);

  [[nodiscard]] const MdpModel& model() const { return model_; }
  [[nodiscard]] State initial_state() const { return initial_state_; }
  [[nodiscard]] std::uint64_t seed() const { return seed_; }
  [[nodiscard]] std::size_t n_states() const { return model_.n_states(); }
  [[nodiscard]] std::size_t n_actions() const { return model_.n_actions(); }

  /// Next state by inverse CDF on one uniform draw, then a Bernoulli(mu)
  /// reward on a second draw.
  Transition step(State s, Action a);

 private:
  MdpModel model_;
  State initial_state_;
  std::uint64_t seed_;
  Rng rng_;
};

inline constexpr Action kLeft = 0;
inline constexpr Action kRight = 1;

/// L-state RiverSwim. LEFT moves one step left deterministically (self-loop
/// at the left end). RIGHT in the interior: right 0.35, stay 0.6, left 0.05;
/// at the left end: right 0.6, stay 0.4; at the right end: stay 0.6, left 0.4.
/// Mean rewards 0.05 for LEFT at the left end and 0.95 for RIGHT at the right
/// end. Starts at the left end.
MdpModel riverswim_model(std::size_t n_states);
Environment riverswim(std::size_t n_states, std::uint64_t seed = 0);

enum class GridVariant { kFourRoom, kTwoRoom };

/// Wall map ('#' wall, '.' free) and the free-cell indexing used for states.
struct GridLayout {
  std::vector<std::string> rows;
  std::size_t start_row = 0, start_col = 0;
  std::size_t goal_row = 0, goal_col = 0;
};

const GridLayout& grid_layout(GridVariant variant);

/// Grid actions.
inline constexpr Action kUp = 0, kEast = 1, kDown = 2, kWest = 3;

/// Frozen-lake style grid: the chosen direction w.p. 0.7, stay w.p. 0.1,
/// each perpendicular direction w.p. 0.1; walls reflect. The goal cell pays
/// 1 and sends the learner back to the start under every action.
MdpModel grid_room_model(GridVariant variant);
Environment grid_room(GridVariant variant, std::uint64_t seed = 0);

/// State index of a free cell (row-major over free cells).
State grid_state(GridVariant variant, std::size_t row, std::size_t col);

struct GarnetSpec {
  std::size_t n_states = 15;
  std::size_t n_actions = 3;
  double branching = 4.0;       ///< mean support size
  double reward_density = 0.2;  ///< fraction of pairs with a nonzero mean reward
  double min_mass = 0.05;       ///< smallest nonzero transition probability
  double min_reward = 0.1;      ///< smallest nonzero mean reward
  std::uint64_t seed = 0;

  void validate() const;
};

/// Random communicating MDP; a pure function of the spec (seed included).
MdpModel garnet_model(const GarnetSpec& spec);
Environment garnet(const GarnetSpec& spec, std::uint64_t sampling_seed = 0);

}  // namespace ucrl::envs
