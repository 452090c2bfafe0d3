#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "uavmec/harness.hpp"

using namespace uavmec;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::size_t line_count(const fs::path& p) {
  std::ifstream in(p);
  std::size_t n = 0;
  std::string line;
  while (std::getline(in, line)) ++n;
  return n;
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::path(testing::TempDir()) / name;
  fs::remove_all(p);
  return p;
}

ExperimentConfig tiny(const fs::path& out, std::uint64_t episodes) {
  json doc = {{"world", {{"terminals", 2}, {"slots", 10}, {"flight_time", 1.0}}},
              {"agent",
               {{"hidden_layers", {16, 16}},
                {"batch_size", 8},
                {"warmup_random_slots", 20},
                {"update_interval_slots", 2},
                {"memory_capacity", 500}}},
              {"run",
               {{"episodes", episodes},
                {"seeds", {1}},
                {"eval_every", 4},
                {"eval_episodes", 3},
                {"output_dir", out.string()},
                {"trace_episodes", 2}}}};
  return parse_config(doc.dump());
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(UAVMEC_CLI) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST(Harness, ZeroEpisodesWritesEchoOnly) {
  const fs::path out = scratch("h_zero");
  harness::run_training(tiny(out, 0));
  ASSERT_TRUE(fs::exists(out / "config.json"));
  EXPECT_EQ(fs::file_size(out / "seed_1" / "metrics.jsonl"), 0u);
  EXPECT_FALSE(fs::exists(out / "seed_1" / "checkpoint"));
  const auto echo = json::parse(slurp(out / "config.json"));
  EXPECT_EQ(echo["world"]["slots"], 10);
  EXPECT_EQ(echo["reward"]["omega"], 4);  // defaults are spelled out
  EXPECT_EQ(echo["agent"]["alpha"], 0.2);
}

TEST(Harness, RunsAreByteIdentical) {
  const fs::path a = scratch("h_det_a"), b = scratch("h_det_b");
  harness::run_training(tiny(a, 8));
  harness::run_training(tiny(b, 8));
  for (const char* f : {"metrics.jsonl", "metrics.csv", "eval.jsonl", "final_eval.json", "trace.csv"}) {
    EXPECT_EQ(slurp(a / "seed_1" / f), slurp(b / "seed_1" / f)) << f;
  }
  EXPECT_EQ(line_count(a / "seed_1" / "metrics.jsonl"), 8u);
  EXPECT_EQ(line_count(a / "seed_1" / "eval.jsonl"), 2u);
  EXPECT_TRUE(fs::exists(a / "summary.json"));
}

TEST(Harness, ResumeContinuesTheSameRun) {
  const fs::path whole = scratch("h_whole"), split = scratch("h_split");
  harness::run_training(tiny(whole, 8));
  harness::run_training(tiny(split, 4));
  harness::run_training(tiny(split, 8), split / "seed_1" / "checkpoint");
  for (const char* f : {"metrics.jsonl", "eval.jsonl", "final_eval.json", "trace.csv"}) {
    EXPECT_EQ(slurp(whole / "seed_1" / f), slurp(split / "seed_1" / f)) << f;
  }
  EXPECT_EQ(line_count(split / "seed_1" / "timing.jsonl"), 8u);
}

TEST(Harness, ResumeRejectsChangedConfig) {
  const fs::path out = scratch("h_resume_bad");
  harness::run_training(tiny(out, 2));
  auto other = tiny(out, 4);
  other.trainer.reward.omega = 1;
  EXPECT_THROW(harness::run_training(other, out / "seed_1" / "checkpoint"), std::runtime_error);
}

TEST(Harness, TraceHasOneRowPerSlot) {
  const fs::path out = scratch("h_trace");
  harness::run_training(tiny(out, 2));
  EXPECT_EQ(line_count(out / "seed_1" / "trace.csv"), 1u + 2 * 10);
  const fs::path ev = scratch("h_eval");
  auto cfg = tiny(out, 2);
  cfg.run.trace_episodes = 1;
  const auto s = harness::run_evaluation(cfg, out / "seed_1" / "checkpoint", ev, 4, 0);
  EXPECT_EQ(s.episodes.size(), 4u);
  EXPECT_EQ(line_count(ev / "trace.csv"), 1u + 10);
  EXPECT_TRUE(fs::exists(ev / "eval_summary.json"));
}

TEST(Harness, MetricsRecordsRoundTrip) {
  EpisodeRecord r;
  r.episode = 12;
  r.episode_return = -3.25;
  r.sum_bits = 1.2345678901234567e7;
  r.fairness = 0.8;
  r.objective = 1e6 / 3;
  r.arrived = true;
  r.final_distance = 0.1;
  const auto back = harness::record_from_json(json::parse(harness::record_json(r).dump()));
  EXPECT_EQ(back.episode, r.episode);
  EXPECT_EQ(back.sum_bits, r.sum_bits);
  EXPECT_EQ(back.objective, r.objective);
  EXPECT_EQ(back.arrived, r.arrived);
}

TEST(Harness, CsvMovingAverage) {
  std::vector<EpisodeRecord> recs(4);
  for (int i = 0; i < 4; ++i) recs[i].episode = i, recs[i].episode_return = i + 1;
  const fs::path p = scratch("h_csv.csv");
  harness::write_metrics_csv(p, recs, 2);
  std::ifstream in(p);
  std::string header, row;
  std::getline(in, header);
  EXPECT_NE(header.find("ma_return"), std::string::npos);
  EXPECT_EQ(line_count(p), 5u);
}

TEST(Harness, SummaryUsesSampleStd) {
  std::vector<harness::SeedResult> rs(3);
  for (int i = 0; i < 3; ++i) rs[i].final_eval.mean_fairness = 0.5 + 0.1 * i;
  const auto s = harness::summarize_seeds(rs);
  EXPECT_NEAR(s["fairness"]["mean"].get<double>(), 0.6, 1e-15);
  EXPECT_NEAR(s["fairness"]["std"].get<double>(), 0.1, 1e-15);
}

TEST(Harness, BenchReportsPositiveLatency) {
  auto cfg = tiny(scratch("h_bench"), 0);
  const auto cells = harness::run_bench(cfg, 1, {2, 4});
  ASSERT_EQ(cells.size(), 2u);
  for (const auto& c : cells) {
    EXPECT_EQ(c.repetitions, 1);
    EXPECT_GT(c.act_seconds, 0.0);
    EXPECT_GT(c.update_seconds, 0.0);
  }
}

TEST(Harness, SweepWritesOneRowPerValue) {
  const fs::path out = scratch("h_sweep");
  auto cfg = tiny(out, 2);
  cfg.sweep = SweepConfig{"reward.omega", {0, 2}};
  harness::run_sweep(cfg);
  EXPECT_EQ(line_count(out / "sweep.csv"), 3u);
  EXPECT_TRUE(fs::exists(out / "reward.omega=0" / "seed_1" / "metrics.jsonl"));
  const auto echo = json::parse(slurp(out / "reward.omega=2" / "config.json"));
  EXPECT_EQ(echo["reward"]["omega"], 2);
}

TEST(Harness, OverridesReachTheEcho) {
  harness::Overrides o;
  o.seed = 42;
  o.baseline = "straight";
  o.hybrid = "random";
  o.output_dir = "somewhere";
  const auto c = harness::load_experiment(std::nullopt, o);
  EXPECT_EQ(c.run.seeds, (std::vector<std::uint64_t>{42}));
  EXPECT_EQ(c.trainer.baseline, BaselineKind::Straight);
  EXPECT_FALSE(c.trainer.learn);
  EXPECT_EQ(c.run.output_dir, "somewhere");
  o.baseline = "warp";
  EXPECT_THROW(harness::load_experiment(std::nullopt, o), ConfigError);
}

TEST(Cli, ExitCodes) {
  const fs::path dir = scratch("h_cli");
  fs::create_directories(dir);
  std::ofstream(dir / "bad.json") << "{\n  \"world\": {\"slotz\": 3}\n}\n";
  EXPECT_EQ(run_cli("train --config " + (dir / "bad.json").string()), 1);
  EXPECT_EQ(run_cli("train --bogus-flag"), 1);
  fs::create_directories(dir / "empty_checkpoint");
  EXPECT_EQ(run_cli("evaluate --checkpoint " + (dir / "empty_checkpoint").string() + " --out " + (dir / "e").string()),
            2);
  std::ofstream(dir / "ok.json") << to_json(tiny(dir / "run", 1)).dump(2);
  EXPECT_EQ(run_cli("train --config " + (dir / "ok.json").string()), 0);
  EXPECT_TRUE(fs::exists(dir / "run" / "seed_1" / "metrics.jsonl"));
  EXPECT_EQ(run_cli("bench --config " + (dir / "ok.json").string() + " --repetitions 1 --out " +
                    (dir / "bench").string()),
            0);
}
