#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "uavmec/experiment_config.hpp"
#include "uavmec/trainer.hpp"

namespace uavmec::harness {

/// Command-line overrides, applied to the document before validation so the
/// echoed config shows them.
struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<std::string> output_dir;
  std::optional<std::string> baseline;
  std::optional<std::string> hybrid;
};

/// Reads `path`, or starts from the defaults when absent.
ExperimentConfig load_experiment(const std::optional<std::filesystem::path>& path, const Overrides& overrides);

struct SeedResult {
  std::uint64_t seed = 0;
  EvalSummary final_eval;
};

/// Trains every seed of the run. Per seed directory `seed_<s>/`:
///   metrics.jsonl   one EpisodeRecord per line, flushed per episode
///   metrics.csv     flat export with 100-episode moving averages
///   timing.jsonl    per-episode mean act latency (wall clock)
///   eval.jsonl      periodic deterministic evaluations
///   final_eval.json, trace.csv, checkpoint/
/// plus `config.json` (resolved echo) and `summary.json` at the top level.
/// With `resume`, only the checkpoint's seed is continued.
std::vector<SeedResult> run_training(const ExperimentConfig& config,
                                     const std::optional<std::filesystem::path>& resume = std::nullopt);

/// Deterministic rollouts from `checkpoint` (or a fresh learner when absent);
/// writes eval_summary.json and trace.csv into `out`.
EvalSummary run_evaluation(const ExperimentConfig& config, const std::optional<std::filesystem::path>& checkpoint,
                           const std::filesystem::path& out, int episodes, std::uint64_t seed);

struct BenchCell {
  int terminals = 0;
  int repetitions = 0;
  double act_seconds = 0.0;     // mean per action
  double update_seconds = 0.0;  // mean per learner update
};

/// Act and update latency of freshly initialized learners with the
/// configured widths, one cell per terminal count.
std::vector<BenchCell> run_bench(const ExperimentConfig& config, int repetitions,
                                 const std::vector<int>& terminal_grid = {2, 4, 8, 16, 32});

/// One training run per sweep value under `<output_dir>/<parameter>=<value>/`
/// and a `sweep.csv` row per value.
nlohmann::json run_sweep(const ExperimentConfig& config);

/// Mean and sample standard deviation across seeds of the final evaluations.
nlohmann::json summarize_seeds(const std::vector<SeedResult>& results);

nlohmann::json record_json(const EpisodeRecord& r);
EpisodeRecord record_from_json(const nlohmann::json& j);
std::vector<EpisodeRecord> read_metrics(const std::filesystem::path& path);

/// Flat export of metrics with trailing moving averages over `window`.
void write_metrics_csv(const std::filesystem::path& path, const std::vector<EpisodeRecord>& records,
                       std::size_t window = 100);

}  // namespace uavmec::harness
