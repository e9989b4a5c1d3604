// ucrl: run experiments, print regret-bound diagnostics, export models.
//
// Exit codes: 0 success, 1 usage or config error, 2 runtime failure.

#include <fstream>
#include <iostream>
#include <optional>

#include "CLI11.hpp"
#include "ucrl/harness.hpp"
#include "ucrl/mdp_io.hpp"

namespace {

void add_env_options(CLI::App* cmd, ucrl::EnvSpec& env) {
  cmd->add_option("env", env.name, "riverswim | four-room | two-room | garnet")->required();
  cmd->add_option("--states", env.states, "number of states (riverswim, garnet)");
  cmd->add_option("--actions", env.garnet.n_actions, "garnet actions");
  cmd->add_option("--env-seed", env.garnet.seed, "garnet generator seed");
}

void emit(const std::string& text, const std::string& path) {
  if (path.empty() || path == "-") {
    std::cout << text << '\n';
    return;
  }
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw std::runtime_error("cannot write '" + path + "'");
  f << text << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Tabular average-reward RL experiments"};
  app.require_subcommand(1);

  std::string config_path;
  std::optional<std::uint64_t> horizon, seed;
  std::optional<std::size_t> runs, jobs;
  std::optional<std::string> out;
  auto* run = app.add_subcommand("run", "run the experiment described by a config file");
  run->add_option("config", config_path, "config file")->required();
  run->add_option("--horizon", horizon, "override horizon");
  run->add_option("--runs", runs, "override number of runs");
  run->add_option("--seed", seed, "override base seed");
  run->add_option("--out", out, "override output directory");
  run->add_option("--jobs", jobs, "worker threads (0 = OpenMP default)");

  ucrl::EnvSpec report_env;
  double report_horizon = 1e6, report_delta = 0.05;
  std::string report_out;
  auto* report = app.add_subcommand("report", "print regret-bound diagnostics as JSON");
  add_env_options(report, report_env);
  report->add_option("--horizon", report_horizon, "horizon T");
  report->add_option("--delta", report_delta, "confidence level");
  report->add_option("--out", report_out, "output file (default stdout)");

  ucrl::EnvSpec export_env;
  std::string export_out;
  auto* exp = app.add_subcommand("export-env", "write the environment model as JSON");
  add_env_options(exp, export_env);
  exp->add_option("--out", export_out, "output file (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*run) {
      ucrl::ExperimentConfig cfg = ucrl::load_config(config_path);
      if (horizon) cfg.horizon = *horizon;
      if (runs) cfg.runs = *runs;
      if (seed) cfg.seed = *seed;
      if (out) cfg.out = *out;
      cfg.validate();
      const auto result = ucrl::harness::run_experiment(cfg, ucrl::harness::resolve_jobs(jobs, cfg));
      ucrl::harness::write_outputs(cfg, result);
      for (const auto& s : result.aggregate.series)
        std::cout << s.agent << ": mean regret at T = " << s.mean.back() << '\n';
    } else if (*report) {
      if (!(report_horizon > 1.0)) throw ucrl::ConfigError("--horizon must be > 1");
      if (!(report_delta > 0.0 && report_delta < 1.0)) throw ucrl::ConfigError("--delta must lie in (0, 1)");
      report_env.validate();
      emit(ucrl::harness::report_metrics(report_env, report_horizon, report_delta).dump(2), report_out);
    } else if (*exp) {
      export_env.validate();
      emit(ucrl::dump_model(ucrl::harness::env_model(export_env)), export_out);
    }
  } catch (const ucrl::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
