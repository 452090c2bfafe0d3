#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "uavmec/harness.hpp"

namespace fs = std::filesystem;
using namespace uavmec;

namespace {

void setup_logging() {
  auto logger = spdlog::stderr_color_mt("uavmec");
  spdlog::set_default_logger(logger);
  spdlog::set_pattern("[%H:%M:%S] [%^%l%$] %v");
  spdlog::set_level(spdlog::level::info);
  if (const char* level = std::getenv("UAVMEC_LOG")) spdlog::set_level(spdlog::level::from_str(level));
}

struct CommonFlags {
  std::optional<std::string> config;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<std::string> baseline;
  std::optional<std::string> hybrid;

  void attach(CLI::App* cmd) {
    cmd->add_option("--config", config, "Experiment config (JSON); defaults when omitted")->check(CLI::ExistingFile);
    cmd->add_option("--seed", seed, "Run this single seed instead of the configured list");
    cmd->add_option("--out", out, "Output directory");
    cmd->add_option("--baseline", baseline, "none, hfh, straight, greedy_local, greedy_offload or random");
    cmd->add_option("--hybrid", hybrid, "learned or random: who controls the half a baseline leaves free");
  }

  ExperimentConfig load() const {
    harness::Overrides o{seed, out, baseline, hybrid};
    return harness::load_experiment(config ? std::optional<fs::path>(*config) : std::nullopt, o);
  }
};

}  // namespace

int main(int argc, char** argv) {
  setup_logging();
  CLI::App app{"UAV-assisted mobile edge computing: SAC training, evaluation and benchmarks"};
  app.require_subcommand(1);

  CommonFlags train_flags, eval_flags, bench_flags, sweep_flags;
  std::optional<std::string> resume;
  auto* train = app.add_subcommand("train", "Train every configured seed");
  train_flags.attach(train);
  train->add_option("--resume", resume, "Continue from a checkpoint directory")->check(CLI::ExistingDirectory);

  std::optional<std::string> checkpoint;
  std::optional<int> episodes;
  auto* evaluate = app.add_subcommand("evaluate", "Deterministic rollouts with trajectory traces");
  eval_flags.attach(evaluate);
  evaluate->add_option("--checkpoint,--resume", checkpoint, "Checkpoint directory")->check(CLI::ExistingDirectory);
  evaluate->add_option("--episodes", episodes, "Number of rollouts (default: run.eval_episodes)")
      ->check(CLI::PositiveNumber);

  int repetitions = 1000;
  std::vector<int> grid{2, 4, 8, 16, 32};
  auto* bench = app.add_subcommand("bench", "Act and update latency across terminal counts");
  bench_flags.attach(bench);
  bench->add_option("--repetitions", repetitions, "Samples per cell")->check(CLI::PositiveNumber);
  bench->add_option("--terminals", grid, "Terminal counts to measure")->check(CLI::PositiveNumber);

  auto* sweep = app.add_subcommand("sweep", "One training run per value of the sweep block");
  sweep_flags.attach(sweep);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*train) {
      const ExperimentConfig cfg = train_flags.load();
      harness::run_training(cfg, resume ? std::optional<fs::path>(*resume) : std::nullopt);
    } else if (*evaluate) {
      const ExperimentConfig cfg = eval_flags.load();
      const fs::path out = eval_flags.out ? fs::path(*eval_flags.out) : fs::path(cfg.run.output_dir) / "evaluation";
      const EvalSummary s = harness::run_evaluation(cfg, checkpoint ? std::optional<fs::path>(*checkpoint) : std::nullopt,
                                                    out, episodes.value_or(cfg.run.eval_episodes), cfg.run.seeds.front());
      std::cout << "episodes " << s.episodes.size() << "\nmean_return " << s.mean_return << "\nmean_sum_bits "
                << s.mean_bits << "\nmean_fairness " << s.mean_fairness << "\nmean_objective " << s.mean_objective
                << "\narrival_ratio " << s.arrival_ratio << '\n';
    } else if (*bench) {
      const ExperimentConfig cfg = bench_flags.load();
      const auto cells = harness::run_bench(cfg, repetitions, grid);
      const fs::path out = bench_flags.out ? fs::path(*bench_flags.out) : fs::path(cfg.run.output_dir) / "bench";
      fs::create_directories(out);
      std::ofstream csv(out / "bench.csv");
      if (!csv) throw std::runtime_error("cannot write " + (out / "bench.csv").string());
      csv << "terminals,repetitions,act_seconds,update_seconds\n";
      std::cout << "terminals  act_ms      update_ms\n";
      for (const auto& c : cells) {
        csv << c.terminals << ',' << c.repetitions << ',' << c.act_seconds << ',' << c.update_seconds << '\n';
        std::printf("%-10d %-11.5f %.5f\n", c.terminals, 1e3 * c.act_seconds, 1e3 * c.update_seconds);
      }
    } else if (*sweep) {
      const ExperimentConfig cfg = sweep_flags.load();
      harness::run_sweep(cfg);
    }
  } catch (const ConfigError& e) {
    spdlog::error("config error: {}", e.what());
    return 1;
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return 2;
  }
  return 0;
}
