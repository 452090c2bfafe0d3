#include <filesystem>
#include <fstream>

#include <gtest/gtest.h>

#include "uavmec/experiment_config.hpp"
#include "uavmec/trainer.hpp"

using namespace uavmec;
namespace fs = std::filesystem;

namespace {

TrainerConfig small() {
  TrainerConfig c;
  c.world.terminals = 2;
  c.world.slots = 10;
  c.world.flight_time = 1.0;
  c.world.initial_energy.assign(2, 1e-3);
  c.mobility.assign(2, GmrmParams{});
  c.agent.hidden_layers = {16, 16};
  c.agent.batch_size = 8;
  c.agent.warmup_random_slots = 20;
  c.agent.update_interval_slots = 5;
  c.agent.memory_capacity = 1000;
  return c;
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::path(testing::TempDir()) / name;
  fs::remove_all(p);
  return p;
}

bool same(const EpisodeRecord& a, const EpisodeRecord& b) {
  return a.episode == b.episode && a.episode_return == b.episode_return && a.sum_bits == b.sum_bits &&
         a.fairness == b.fairness && a.objective == b.objective && a.arrived == b.arrived &&
         a.final_distance == b.final_distance;
}

nlohmann::json echo(const TrainerConfig& c) { return checkpoint_identity(to_json({c, {}, std::nullopt})); }

}  // namespace

TEST(Trainer, SameSeedSameRun) {
  Trainer a(small(), 7), b(small(), 7);
  for (int e = 0; e < 15; ++e) ASSERT_TRUE(same(a.train_episode(), b.train_episode())) << e;
  EXPECT_TRUE(a == b);
  Trainer c(small(), 8);
  EXPECT_FALSE(same(Trainer(small(), 7).train_episode(), c.train_episode()));
}

TEST(Trainer, MemoryOccupancyFollowsRing) {
  TrainerConfig cfg = small();
  cfg.agent.memory_capacity = 35;
  Trainer t(cfg, 1);
  for (int e = 1; e <= 6; ++e) {
    t.train_episode();
    EXPECT_EQ(t.memory().size(), std::min<std::size_t>(35, 10u * e));
  }
  EXPECT_EQ(t.slots_played(), 60u);
}

TEST(Trainer, UpdateCadence) {
  Trainer t(small(), 2);
  for (int e = 0; e < 4; ++e) t.train_episode();
  // Every fifth slot from slot 10 on; slot 5 still has fewer samples than a batch.
  EXPECT_EQ(t.updates_done(), 7u);
}

TEST(Trainer, NoUpdatesLeavesPolicyUntouched) {
  TrainerConfig cfg = small();
  cfg.agent.update_interval_slots = 1000000;
  Trainer t(cfg, 3);
  const auto before = t.agent()->policy;
  for (int e = 0; e < 10; ++e) t.train_episode();
  EXPECT_EQ(t.updates_done(), 0u);
  EXPECT_EQ(t.agent()->policy, before);
}

TEST(Trainer, EvaluationDoesNotTouchTrainingState) {
  Trainer a(small(), 4), b(small(), 4);
  for (int e = 0; e < 5; ++e) a.train_episode(), b.train_episode();
  const auto s1 = a.evaluate(5, 99);
  const auto s2 = a.evaluate(5, 99);
  EXPECT_EQ(s1.mean_return, s2.mean_return);
  EXPECT_TRUE(a == b);
  EXPECT_TRUE(same(a.train_episode(), b.train_episode()));
}

TEST(Trainer, CheckpointResumesBitExactly) {
  const TrainerConfig cfg = small();
  Trainer straight(cfg, 5);
  for (int e = 0; e < 6; ++e) straight.train_episode();
  const fs::path dir = scratch("trainer_ckpt");
  straight.save_checkpoint(dir, echo(cfg));
  Trainer resumed = Trainer::load_checkpoint(dir, cfg, echo(cfg));
  EXPECT_TRUE(resumed == straight);
  const auto start = straight.updates_done();
  while (straight.updates_done() < start + 100) {
    ASSERT_TRUE(same(straight.train_episode(), resumed.train_episode()));
  }
  EXPECT_TRUE(resumed == straight);
}

TEST(Trainer, CheckpointRejectsDifferentConfig) {
  const TrainerConfig cfg = small();
  Trainer t(cfg, 6);
  t.train_episode();
  const fs::path dir = scratch("trainer_ckpt_mismatch");
  t.save_checkpoint(dir, echo(cfg));
  TrainerConfig other = cfg;
  other.reward.omega = 2;
  EXPECT_THROW(Trainer::load_checkpoint(dir, other, echo(other)), std::runtime_error);
}

TEST(Trainer, TraceHasOneRowPerSlot) {
  Trainer t(small(), 7);
  int rows = 0;
  t.train_episode([&](const SlotTrace& s) {
    ++rows;
    EXPECT_EQ(s.slot, rows);
    EXPECT_EQ(s.power.size(), 2u);
  });
  EXPECT_EQ(rows, 10);
  std::vector<std::uint64_t> episodes;
  t.evaluate(3, 1, [&](const SlotTrace& s) { episodes.push_back(s.episode); });
  ASSERT_EQ(episodes.size(), 30u);
  EXPECT_EQ(episodes.front(), 0u);
  EXPECT_EQ(episodes.back(), 2u);
}

TEST(Trainer, StraightBaselineTraceIsALine) {
  TrainerConfig cfg = small();
  cfg.baseline = BaselineKind::Straight;
  cfg.learn = false;
  Trainer t(cfg, 8);
  t.evaluate(1, 1, [&](const SlotTrace& s) {
    const double f = static_cast<double>(s.slot - 1) / cfg.world.slots;
    EXPECT_NEAR(s.uav.x, 18.0 * f, 1e-12);
    EXPECT_NEAR(s.uav.y, 18.0 * f, 1e-12);
  });
  EXPECT_EQ(t.evaluate(4, 2).arrival_ratio, 1.0);
}

TEST(Trainer, HybridShrinksActionSpace) {
  TrainerConfig cfg = small();
  cfg.baseline = BaselineKind::Hfh;
  Trainer t(cfg, 9);
  EXPECT_EQ(t.agent()->action_dim(), 6u);
  cfg.baseline = BaselineKind::GreedyOffload;
  Trainer g(cfg, 9);
  EXPECT_EQ(g.agent()->action_dim(), 2u);
  t.train_episode();
  g.train_episode();
}

TEST(Trainer, MobilitySchedule) {
  TrainerConfig cfg = small();
  MobilityParams slow(2, GmrmParams{});
  for (auto& p : slow) p.mean_speed = 0.5;
  cfg.mobility_schedule = {{3, slow}};
  Trainer t(cfg, 1);
  EXPECT_EQ(t.mobility_for_episode(2)[0].mean_speed, 2.0);
  EXPECT_EQ(t.mobility_for_episode(3)[0].mean_speed, 0.5);
  EXPECT_EQ(t.mobility_for_episode(100)[1].mean_speed, 0.5);
}

TEST(Trainer, RejectsInconsistentConfig) {
  TrainerConfig cfg = small();
  cfg.learn = false;
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
  cfg = small();
  cfg.mobility.resize(3);
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
}

TEST(ArrivalRatio, FirstWindowReachingThreshold) {
  std::vector<EpisodeRecord> r(300);
  for (std::size_t i = 150; i < 300; ++i) r[i].arrived = true;
  EXPECT_EQ(episodes_to_arrival_ratio(r, 0.9, 100), 240u);
  EXPECT_EQ(episodes_to_arrival_ratio(std::vector<EpisodeRecord>(50), 0.0, 100), std::nullopt);
  r.resize(200);
  EXPECT_EQ(episodes_to_arrival_ratio(r, 0.9, 100), std::nullopt);
}
