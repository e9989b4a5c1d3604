#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "ucrl/harness.hpp"

using namespace ucrl;
using namespace ucrl::harness;

namespace {

std::string slurp(const std::filesystem::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

ExperimentConfig small_config(const std::filesystem::path& out) {
  ExperimentConfig cfg;
  cfg.horizon = 3'000;
  cfg.runs = 4;
  cfg.seed = 42;
  cfg.checkpoints = 20;
  cfg.out = out;
  for (const char* name : {"ucrl3", "ucrl2", "psrl", "random"}) cfg.agents.push_back({name});
  return cfg;
}

}  // namespace

TEST_CASE("checkpoint grid") {
  CHECK(checkpoint_grid(100, 2) == std::vector<std::uint64_t>{10, 100});
  CHECK(checkpoint_grid(1000, 3) == std::vector<std::uint64_t>{10, 100, 1000});
  const auto g = checkpoint_grid(200'000, 200);
  CHECK(g.back() == 200'000);
  CHECK(g.front() == 2);  // ceil(200000^(1/200))
  CHECK(std::is_sorted(g.begin(), g.end()));
  CHECK(std::adjacent_find(g.begin(), g.end()) == g.end());
  CHECK(checkpoint_grid(1, 5) == std::vector<std::uint64_t>{1});
  CHECK_THROWS_AS(checkpoint_grid(0, 5), std::invalid_argument);
}

TEST_CASE("nearest-rank quantiles") {
  const std::vector<double> v{15, 20, 35, 40, 50};
  CHECK(nearest_rank(v, 0.05) == 15);
  CHECK(nearest_rank(v, 0.30) == 20);
  CHECK(nearest_rank(v, 0.40) == 20);
  CHECK(nearest_rank(v, 0.50) == 35);
  CHECK(nearest_rank(v, 1.00) == 50);
  CHECK(nearest_rank({3, 1, 2, 4}, 0.25) == 1);
  CHECK(nearest_rank({3, 1, 2, 4}, 0.75) == 3);
  CHECK_THROWS_AS(nearest_rank({}, 0.5), std::invalid_argument);
}

TEST_CASE("regret identity and seeding") {
  EnvSpec env;
  const auto truth = env_model(env);
  const double g = relative_value_iteration(truth, 1e-8).value.gain;
  const auto cps = checkpoint_grid(5'000, 10);
  const auto tr = simulate({"ucrl3"}, env, truth, g, cps, 7, 3);
  CHECK(tr.env_seed == 10);
  CHECK(tr.agent_seed == 10 + kAgentSeedOffset);
  REQUIRE(tr.regret.size() == cps.size());
  for (std::size_t c = 0; c < cps.size(); ++c) {
    CHECK(std::abs(tr.regret[c] - (static_cast<double>(cps[c]) * g - tr.reward_prefix[c])) <= 1e-9);
    if (c > 0) CHECK(tr.reward_prefix[c] >= tr.reward_prefix[c - 1]);
  }
  const auto again = simulate({"ucrl3"}, env, truth, g, cps, 7, 3);
  CHECK(again.regret == tr.regret);
}

TEST_CASE("reference agents") {
  EnvSpec env;
  const auto truth = env_model(env);
  const double g = relative_value_iteration(truth, 1e-8).value.gain;
  const double g_unif = uniform_policy_gain(truth);
  const std::uint64_t T = 100'000;
  const std::vector<std::uint64_t> cps{T};
  double opt = 0.0, rnd = 0.0;
  const int runs = 8;
  for (int i = 0; i < runs; ++i) {
    opt += simulate({"optimal"}, env, truth, g, cps, 1, i).regret.back() / runs;
    rnd += simulate({"random"}, env, truth, g, cps, 1, i).regret.back() / runs;
  }
  CHECK(std::abs(opt) <= 3.0 * std::sqrt(static_cast<double>(T)));
  const double linear = (g - g_unif) * static_cast<double>(T);
  CHECK(std::abs(rnd / linear - 1.0) <= 0.05);
}

TEST_CASE("worker count resolution") {
  ExperimentConfig cfg;
  cfg.jobs = 3;
  unsetenv("UCRL_JOBS");
  CHECK(resolve_jobs(std::nullopt, cfg) == 3);
  setenv("UCRL_JOBS", "5", 1);
  CHECK(resolve_jobs(std::nullopt, cfg) == 5);
  CHECK(resolve_jobs(std::size_t{2}, cfg) == 2);
  setenv("UCRL_JOBS", "many", 1);
  CHECK_THROWS_AS(resolve_jobs(std::nullopt, cfg), ConfigError);
  unsetenv("UCRL_JOBS");
}

TEST_CASE("outputs are identical across worker counts") {
  const auto base = std::filesystem::temp_directory_path() / "ucrl_harness_test";
  std::filesystem::remove_all(base);
  auto a = small_config(base / "one");
  auto b = small_config(base / "many");
  auto c = small_config(base / "again");
  write_outputs(a, run_experiment(a, 1));
  write_outputs(b, run_experiment(b, 4));
  write_outputs(c, run_experiment(c, 1));
  for (const char* f : {"runs.csv", "aggregate.csv", "summary.json"}) {
    CAPTURE(f);
    const auto x = slurp(a.out / f);
    CHECK_FALSE(x.empty());
    CHECK(x == slurp(b.out / f));
    CHECK(x == slurp(c.out / f));
  }
  const auto summary = nlohmann::json::parse(slurp(a.out / "summary.json"));
  CHECK(summary["runs"] == 4);
  CHECK(summary["agents"].size() == 4);
  CHECK(summary["agents"][0]["name"] == "ucrl3");
  std::filesystem::remove_all(base);
}

TEST_CASE("aggregates follow the runs") {
  auto cfg = small_config("unused");
  const auto res = run_experiment(cfg, 2);
  REQUIRE(res.runs.size() == 16);
  const auto& s = res.aggregate.series[1];
  CHECK(s.agent == "ucrl2");
  const std::size_t last = res.aggregate.checkpoints.size() - 1;
  std::vector<double> col;
  double mean = 0.0;
  for (std::size_t r = 0; r < 4; ++r) {
    const auto& tr = res.runs[4 + r];
    CHECK(tr.agent == "ucrl2");
    CHECK(tr.run_index == r);
    col.push_back(tr.regret[last]);
    mean += tr.regret[last] / 4;
  }
  CHECK(s.mean[last] == doctest::Approx(mean));
  CHECK(s.q25[last] == nearest_rank(col, 0.25));
  CHECK(s.q75[last] == nearest_rank(col, 0.75));
  CHECK(s.q25[last] <= s.q75[last]);
}

TEST_CASE("metrics report") {
  EnvSpec env;
  const auto j = report_metrics(env, 100, 0.05);
  CHECK(j.contains("diameter"));
  CHECK(std::abs(j["diameter"].get<double>() - 14.72) <= 0.01);
  EnvSpec bad;
  bad.name = "maze";
  CHECK_THROWS_AS(report_metrics(bad, 100, 0.05), ConfigError);
}
