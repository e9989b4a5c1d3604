#include "ucrl/harness.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <numeric>

#include "ucrl/mdp_io.hpp"

namespace ucrl::harness {

MdpModel env_model(const EnvSpec& spec) {
  spec.validate();
  if (spec.name == "riverswim") return envs::riverswim_model(spec.states);
  if (spec.name == "four-room") return envs::grid_room_model(envs::GridVariant::kFourRoom);
  if (spec.name == "two-room") return envs::grid_room_model(envs::GridVariant::kTwoRoom);
  auto g = spec.garnet;
  g.n_states = spec.states;
  return envs::garnet_model(g);
}

State env_initial_state(const EnvSpec& spec) {
  spec.validate();
  if (spec.name == "four-room" || spec.name == "two-room") {
    const auto v = spec.name == "four-room" ? envs::GridVariant::kFourRoom : envs::GridVariant::kTwoRoom;
    const auto& g = envs::grid_layout(v);
    return envs::grid_state(v, g.start_row, g.start_col);
  }
  return 0;
}

envs::Environment make_env(const EnvSpec& spec, std::uint64_t seed) {
  return envs::Environment(env_model(spec), env_initial_state(spec), seed);
}

std::vector<std::uint64_t> checkpoint_grid(std::uint64_t horizon, std::size_t n) {
  if (horizon == 0 || n == 0) throw std::invalid_argument("checkpoint_grid: empty grid");
  std::vector<std::uint64_t> out;
  const double log_t = std::log(static_cast<double>(horizon));
  for (std::size_t j = 1; j <= n; ++j) {
    const double x = std::exp(log_t * static_cast<double>(j) / static_cast<double>(n));
    out.push_back(std::clamp<std::uint64_t>(static_cast<std::uint64_t>(std::ceil(x - 1e-9)), 1, horizon));
  }
  out.push_back(horizon);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

RunTrace simulate(const agents::AgentSpec& spec, const EnvSpec& env_spec, const MdpModel& truth,
                  double optimal_gain, const std::vector<std::uint64_t>& checkpoints,
                  std::uint64_t base_seed, std::size_t run_index) {
  RunTrace tr;
  tr.agent = spec.name;
  tr.run_index = run_index;
  tr.env_seed = base_seed + run_index;
  tr.agent_seed = base_seed + run_index + kAgentSeedOffset;
  envs::Environment env(truth, env_initial_state(env_spec), tr.env_seed);
  auto agent = agents::make_agent(spec, truth, tr.agent_seed);

  State s = env.initial_state();
  double total = 0.0;
  std::size_t next_cp = 0;
  const std::uint64_t horizon = checkpoints.empty() ? 0 : checkpoints.back();
  for (std::uint64_t t = 1; t <= horizon; ++t) {
    const Action a = agent->act(s);
    const auto step = env.step(s, a);
    agent->observe(s, a, step.reward, step.next);
    total += step.reward;
    s = step.next;
    if (t == checkpoints[next_cp]) {
      tr.reward_prefix.push_back(total);
      tr.regret.push_back(static_cast<double>(t) * optimal_gain - total);
      ++next_cp;
    }
  }
  return tr;
}

double nearest_rank(std::vector<double> values, double q) {
  if (values.empty()) throw std::invalid_argument("nearest_rank: no values");
  std::sort(values.begin(), values.end());
  const auto rank = static_cast<std::size_t>(std::ceil(q * static_cast<double>(values.size()) - 1e-12));
  return values[std::clamp<std::size_t>(rank, 1, values.size()) - 1];
}

std::size_t resolve_jobs(std::optional<std::size_t> cli, const ExperimentConfig& cfg) {
  if (cli) return *cli;
  if (const char* env = std::getenv("UCRL_JOBS"); env && *env) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (*end != '\0' || v < 0) throw ConfigError("UCRL_JOBS must be a nonnegative integer");
    return static_cast<std::size_t>(v);
  }
  return cfg.jobs;
}

ExperimentResult run_experiment(const ExperimentConfig& cfg, std::size_t jobs) {
  cfg.validate();
  const MdpModel truth = env_model(cfg.env);
  const double g_star = relative_value_iteration(truth, 1e-8).value.gain;
  const auto cps = checkpoint_grid(cfg.horizon, cfg.checkpoints);

  const std::size_t n_items = cfg.agents.size() * cfg.runs;
  std::vector<RunTrace> traces(n_items);
  std::vector<std::exception_ptr> errors(n_items);
  const int threads = jobs > 0 ? static_cast<int>(jobs) : omp_get_max_threads();
  const auto n = static_cast<std::ptrdiff_t>(n_items);
#pragma omp parallel for schedule(dynamic, 1) num_threads(threads)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const auto idx = static_cast<std::size_t>(i);
    try {
      traces[idx] = simulate(cfg.agents[idx / cfg.runs], cfg.env, truth, g_star, cps, cfg.seed,
                             idx % cfg.runs);
    } catch (...) {
      errors[idx] = std::current_exception();
    }
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);

  ExperimentResult out;
  out.aggregate.checkpoints = cps;
  out.aggregate.optimal_gain = g_star;
  std::vector<double> column(cfg.runs);
  for (std::size_t k = 0; k < cfg.agents.size(); ++k) {
    AgentSeries series;
    series.agent = cfg.agents[k].name;
    for (std::size_t c = 0; c < cps.size(); ++c) {
      for (std::size_t r = 0; r < cfg.runs; ++r) column[r] = traces[k * cfg.runs + r].regret[c];
      series.mean.push_back(std::accumulate(column.begin(), column.end(), 0.0) /
                            static_cast<double>(cfg.runs));
      series.q25.push_back(nearest_rank(column, 0.25));
      series.q75.push_back(nearest_rank(column, 0.75));
    }
    out.aggregate.series.push_back(std::move(series));
  }
  out.runs = std::move(traces);
  return out;
}

namespace {

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

std::ofstream open_out(const std::filesystem::path& p) {
  std::ofstream f(p, std::ios::binary | std::ios::trunc);
  if (!f) throw std::runtime_error("cannot write '" + p.string() + "'");
  return f;
}

}  // namespace

void write_outputs(const ExperimentConfig& cfg, const ExperimentResult& res) {
  std::filesystem::create_directories(cfg.out);
  const auto& cps = res.aggregate.checkpoints;
  {
    auto f = open_out(cfg.out / "runs.csv");
    f << "agent,run,t,regret\n";
    for (const auto& tr : res.runs)
      for (std::size_t c = 0; c < cps.size(); ++c)
        f << tr.agent << ',' << tr.run_index << ',' << cps[c] << ',' << num(tr.regret[c]) << '\n';
  }
  {
    auto f = open_out(cfg.out / "aggregate.csv");
    f << "agent,t,mean,q25,q75\n";
    for (const auto& s : res.aggregate.series)
      for (std::size_t c = 0; c < cps.size(); ++c)
        f << s.agent << ',' << cps[c] << ',' << num(s.mean[c]) << ',' << num(s.q25[c]) << ','
          << num(s.q75[c]) << '\n';
  }
  nlohmann::ordered_json j;
  j["environment"] = {{"name", cfg.env.name}, {"n_states", env_model(cfg.env).n_states()}};
  j["horizon"] = cfg.horizon;
  j["runs"] = cfg.runs;
  j["seed"] = cfg.seed;
  j["optimal_gain"] = res.aggregate.optimal_gain;
  auto& agents = j["agents"] = nlohmann::ordered_json::array();
  for (std::size_t k = 0; k < res.aggregate.series.size(); ++k) {
    const auto& s = res.aggregate.series[k];
    const auto& a = cfg.agents[k];
    agents.push_back({{"name", s.agent},
                      {"delta", a.delta},
                      {"gamma", a.gamma},
                      {"lazy", a.lazy},
                      {"alpha", a.alpha},
                      {"final_mean_regret", s.mean.back()},
                      {"final_q25", s.q25.back()},
                      {"final_q75", s.q75.back()}});
  }
  auto f = open_out(cfg.out / "summary.json");
  f << j.dump(2) << '\n';
}

nlohmann::json report_metrics(const EnvSpec& env, double horizon, double delta) {
  return to_json(regret_bound_report(env_model(env), horizon, delta));
}

}  // namespace ucrl::harness
