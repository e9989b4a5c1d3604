#include "ucrl/envs.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace ucrl::envs {

Environment::Environment(MdpModel model, State initial_state, std::uint64_t seed)
    : model_(std::move(model)), initial_state_(initial_state), seed_(seed), rng_(seed) {
  model_.validate();
  if (initial_state_ >= model_.n_states())
    throw std::invalid_argument("Environment: initial state out of range");
}

Transition Environment::step(State s, Action a) {
  if (s >= model_.n_states() || a >= model_.n_actions())
    throw std::out_of_range("Environment::step: state or action out of range");
  const auto row = model_.row(s, a);
  const double u = uniform01(rng_);
  State next = 0;
  double cumulative = 0.0;
  for (State x = 0; x < row.size(); ++x) {
    if (row[x] <= 0.0) continue;
    next = x;  // last state with positive mass absorbs rounding slack
    cumulative += row[x];
    if (u < cumulative) break;
  }
  const double reward = uniform01(rng_) < model_.reward(s, a) ? 1.0 : 0.0;
  return {next, reward};
}

MdpModel riverswim_model(std::size_t n_states) {
  if (n_states < 2) throw std::invalid_argument("riverswim: need at least 2 states");
  const std::size_t S = n_states;
  MdpModel m(S, 2);
  for (State s = 0; s < S; ++s) {
    m.p(s, kLeft, s == 0 ? 0 : s - 1) = 1.0;
    if (s == 0) {
      m.p(s, kRight, 1) = 0.6;
      m.p(s, kRight, 0) = 0.4;
    } else if (s == S - 1) {
      m.p(s, kRight, s) = 0.6;
      m.p(s, kRight, s - 1) = 0.4;
    } else {
      m.p(s, kRight, s + 1) = 0.35;
      m.p(s, kRight, s) = 0.6;
      m.p(s, kRight, s - 1) = 0.05;
    }
  }
  m.reward(0, kLeft) = 0.05;
  m.reward(S - 1, kRight) = 0.95;
  return m;
}

Environment riverswim(std::size_t n_states, std::uint64_t seed) {
  return Environment(riverswim_model(n_states), 0, seed);
}

namespace {

// 7x7 with a cross-shaped inner wall, one door per arm: 20 free cells.
const GridLayout kFourRoom{{
                               "#######",
                               "#..#..#",
                               "#.....#",
                               "#.###.#",
                               "#..#..#",
                               "#.....#",
                               "#######",
                           },
                           1, 1, 5, 5};

// 9 wide, 11 tall, one vertical dividing wall with a single door: 55 free cells.
const GridLayout kTwoRoom{{
                              "#########",
                              "#...#...#",
                              "#...#...#",
                              "#...#...#",
                              "#...#...#",
                              "#.......#",
                              "#...#...#",
                              "#...#...#",
                              "#...#...#",
                              "#...#...#",
                              "#########",
                          },
                          1, 1, 9, 7};

struct CellIndex {
  std::vector<std::vector<long>> index;  // -1 for walls
  std::size_t count = 0;
};

CellIndex index_cells(const GridLayout& g) {
  CellIndex out;
  out.index.resize(g.rows.size());
  for (std::size_t r = 0; r < g.rows.size(); ++r) {
    out.index[r].assign(g.rows[r].size(), -1);
    for (std::size_t c = 0; c < g.rows[r].size(); ++c)
      if (g.rows[r][c] != '#') out.index[r][c] = static_cast<long>(out.count++);
  }
  return out;
}

}  // namespace

const GridLayout& grid_layout(GridVariant variant) {
  return variant == GridVariant::kFourRoom ? kFourRoom : kTwoRoom;
}

State grid_state(GridVariant variant, std::size_t row, std::size_t col) {
  const auto cells = index_cells(grid_layout(variant));
  if (row >= cells.index.size() || col >= cells.index[row].size() || cells.index[row][col] < 0)
    throw std::out_of_range("grid_state: not a free cell");
  return static_cast<State>(cells.index[row][col]);
}

MdpModel grid_room_model(GridVariant variant) {
  const GridLayout& g = grid_layout(variant);
  const auto cells = index_cells(g);
  const std::size_t S = cells.count;
  MdpModel m(S, 4);
  const State start = static_cast<State>(cells.index[g.start_row][g.start_col]);
  const State goal = static_cast<State>(cells.index[g.goal_row][g.goal_col]);

  // up, east, down, west
  constexpr std::array<int, 4> dr{-1, 0, 1, 0};
  constexpr std::array<int, 4> dc{0, 1, 0, -1};
  for (std::size_t r = 0; r < g.rows.size(); ++r) {
    for (std::size_t c = 0; c < g.rows[r].size(); ++c) {
      if (cells.index[r][c] < 0) continue;
      const State s = static_cast<State>(cells.index[r][c]);
      auto target = [&](int dir) -> State {
        const long nr = static_cast<long>(r) + dr[dir];
        const long nc = static_cast<long>(c) + dc[dir];
        const long idx = cells.index[nr][nc];  // outer walls keep this in range
        return idx < 0 ? s : static_cast<State>(idx);
      };
      for (Action a = 0; a < 4; ++a) {
        if (s == goal) {
          m.p(s, a, start) = 1.0;
          m.reward(s, a) = 1.0;
          continue;
        }
        const int dir = static_cast<int>(a);
        m.p(s, a, target(dir)) += 0.7;
        m.p(s, a, s) += 0.1;
        m.p(s, a, target((dir + 1) % 4)) += 0.1;
        m.p(s, a, target((dir + 3) % 4)) += 0.1;
      }
    }
  }
  return m;
}

Environment grid_room(GridVariant variant, std::uint64_t seed) {
  const GridLayout& g = grid_layout(variant);
  return Environment(grid_room_model(variant), grid_state(variant, g.start_row, g.start_col),
                     seed);
}

void GarnetSpec::validate() const {
  if (n_states == 0 || n_actions == 0) throw std::invalid_argument("garnet: empty spec");
  if (!(branching >= 1.0 && branching <= static_cast<double>(n_states)))
    throw std::invalid_argument("garnet: branching must lie in [1, n_states]");
  if (!(reward_density > 0.0 && reward_density <= 1.0))
    throw std::invalid_argument("garnet: reward_density must lie in (0, 1]");
  if (!(min_mass >= 0.0) || min_mass * branching > 1.0)
    throw std::invalid_argument("garnet: infeasible min_mass (min_mass * branching > 1)");
  if (!(min_reward >= 0.0 && min_reward <= 1.0))
    throw std::invalid_argument("garnet: min_reward must lie in [0, 1]");
}

MdpModel garnet_model(const GarnetSpec& spec) {
  spec.validate();
  const std::size_t S = spec.n_states, A = spec.n_actions;
  Rng rng(spec.seed);
  const std::size_t max_support =
      spec.min_mass > 0.0
          ? std::min<std::size_t>(S, static_cast<std::size_t>(std::floor(1.0 / spec.min_mass)))
          : S;

  // Random Hamiltonian cycle; each state gets one action guaranteed to reach
  // its cycle successor, which makes the model communicating.
  std::vector<State> cycle(S);
  std::iota(cycle.begin(), cycle.end(), State{0});
  for (std::size_t i = S; i > 1; --i) std::swap(cycle[i - 1], cycle[uniform_index(rng, i)]);
  std::vector<State> successor(S);
  for (std::size_t i = 0; i < S; ++i) successor[cycle[i]] = cycle[(i + 1) % S];
  std::vector<Action> linked(S);
  for (State s = 0; s < S; ++s) linked[s] = uniform_index(rng, A);

  MdpModel m(S, A);
  std::vector<State> pool(S);
  std::vector<double> weight;
  const double extra_p = S > 1 ? (spec.branching - 1.0) / static_cast<double>(S - 1) : 0.0;
  for (State s = 0; s < S; ++s) {
    for (Action a = 0; a < A; ++a) {
      std::size_t k = 1;
      if (S > 1) k += std::binomial_distribution<std::size_t>(S - 1, extra_p)(rng);
      k = std::min(k, max_support);
      std::iota(pool.begin(), pool.end(), State{0});
      for (std::size_t i = 0; i < k; ++i) std::swap(pool[i], pool[i + uniform_index(rng, S - i)]);
      std::vector<State> support(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(k));
      if (a == linked[s] &&
          std::find(support.begin(), support.end(), successor[s]) == support.end()) {
        if (support.size() < max_support)
          support.push_back(successor[s]);
        else
          support.back() = successor[s];
      }
      weight.resize(support.size());
      double total = 0.0;
      for (double& w : weight) total += (w = gamma_draw(rng, 1.0));
      const double free_mass = 1.0 - spec.min_mass * static_cast<double>(support.size());
      for (std::size_t i = 0; i < support.size(); ++i)
        m.p(s, a, support[i]) = spec.min_mass + free_mass * weight[i] / total;
    }
  }

  std::vector<std::size_t> pairs(S * A);
  std::iota(pairs.begin(), pairs.end(), std::size_t{0});
  const auto n_rewarded = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::lround(spec.reward_density * static_cast<double>(S * A))));
  for (std::size_t i = 0; i < n_rewarded; ++i) {
    std::swap(pairs[i], pairs[i + uniform_index(rng, pairs.size() - i)]);
    const double mu = spec.min_reward + (1.0 - spec.min_reward) * uniform01(rng);
    m.reward(pairs[i] / A, pairs[i] % A) = mu;
  }
  m.validate();
  return m;
}

Environment garnet(const GarnetSpec& spec, std::uint64_t sampling_seed) {
  return Environment(garnet_model(spec), 0, sampling_seed);
}

}  // namespace ucrl::envs
