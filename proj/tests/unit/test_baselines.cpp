#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "uavmec/baselines.hpp"
#include "uavmec/environment.hpp"

using namespace uavmec;

namespace {

EnvState start_state(const WorldConfig& cfg) {
  std::vector<Vec2> q;
  for (int m = 0; m < cfg.terminals; ++m) q.push_back({2.0 + 3 * m, 5.0});
  return initial_state(cfg, q);
}

std::vector<Vec2> still(const WorldConfig& cfg) { return std::vector<Vec2>(cfg.terminals, Vec2{}); }

}  // namespace

TEST(Straight, SpeedAndBearing) {
  WorldConfig cfg;
  const auto cmd = straight_act(start_state(cfg), cfg);
  EXPECT_NEAR(cmd.speed, 6.364, 5e-4);
  EXPECT_DOUBLE_EQ(cmd.speed, std::sqrt(2.0 * 18 * 18) / 4.0);
  EXPECT_DOUBLE_EQ(cmd.heading, std::numbers::pi / 4);
}

TEST(Straight, FollowsAnalyticLine) {
  WorldConfig cfg;
  EnvState s = start_state(cfg);
  for (int n = 1; n <= cfg.slots; ++n) {
    Action a = compose(straight_act(s, cfg), greedy_local_alloc(s, cfg));
    s = step(s, prepare_action(s, a, cfg), still(cfg), cfg).next_state;
    const Vec2 want = cfg.start + (cfg.destination - cfg.start) * (static_cast<double>(n) / cfg.slots);
    ASSERT_NEAR(s.uav.x, want.x, 1e-12) << "slot " << n;
    ASSERT_NEAR(s.uav.y, want.y, 1e-12) << "slot " << n;
  }
  EXPECT_TRUE(is_arrived(s, cfg));
}

TEST(Straight, RejectsUnreachableDestination) {
  WorldConfig cfg;
  cfg.max_speed = 5.0;
  EXPECT_THROW(straight_act(start_state(cfg), cfg), std::domain_error);
}

TEST(GreedyLocal, CubeRootBudget) {
  WorldConfig cfg;
  cfg.max_frequency = 1e9;
  EnvState s = start_state(cfg);
  s.energy = {1e-3, 0.0, 1e-4, 1.0};
  const auto a = greedy_local_alloc(s, cfg);
  EXPECT_NEAR(a.frequency[0], std::cbrt(1e26), 1e-12 * std::cbrt(1e26));
  EXPECT_NEAR(a.frequency[0], 4.642e8, 1e5);
  EXPECT_EQ(a.frequency[1], 0.0);
  EXPECT_NEAR(a.frequency[2], std::cbrt(1e25), 1e-12 * std::cbrt(1e25));
  EXPECT_EQ(a.frequency[3], cfg.max_frequency);
  for (std::size_t m = 0; m < 4; ++m) {
    EXPECT_EQ(a.power[m], 0.0);
    EXPECT_EQ(a.offload_share[m], 0.0);
    EXPECT_LE(slot_energy(0.0, a.frequency[m], 0.0, cfg), s.energy[m]);
  }
}

TEST(GreedyLocal, LeavesOnlyTheHarvest) {
  WorldConfig cfg;
  cfg.max_frequency = 1e9;
  const EnvState s = start_state(cfg);
  const auto out = step(s, prepare_action(s, compose({0, 0}, greedy_local_alloc(s, cfg)), cfg), still(cfg), cfg);
  for (std::size_t m = 0; m < 4; ++m) {
    EXPECT_FALSE(out.penalized[m]);
    EXPECT_NEAR(out.next_state.energy[m], out.harvested[m], 1e-12 * s.energy[m]);
  }
}

TEST(GreedyOffload, EqualSharesAndBudgetPower) {
  WorldConfig cfg;
  EnvState s = start_state(cfg);
  s.energy = {1e-4, 0.0, 1.0, 2e-5};
  const auto a = greedy_offload_alloc(s, cfg);
  EXPECT_EQ(a.offload_share, (std::vector<double>{0.25, 0.25, 0.25, 0.25}));
  EXPECT_NEAR(a.power[0], 4e-3, 1e-12 * 4e-3);
  EXPECT_EQ(a.power[1], 0.0);
  EXPECT_EQ(a.power[2], cfg.max_power);
  EXPECT_NEAR(a.power[3], 8e-4, 1e-12 * 8e-4);
  for (std::size_t m = 0; m < 4; ++m) {
    EXPECT_EQ(a.frequency[m], 0.0);
    EXPECT_LE(slot_energy(a.power[m], 0.0, 0.25, cfg), s.energy[m]);
  }
}

TEST(Hfh, SpanArithmetic) {
  EXPECT_EQ(hfh_spans(40, 4, 2), (std::vector<int>{9, 9, 9, 11}));
  EXPECT_EQ(hfh_spans(40, 4, 0), (std::vector<int>{10, 10, 10, 10}));
  EXPECT_EQ(hfh_spans(10, 3, 1), (std::vector<int>{3, 3, 3}));
  EXPECT_EQ(hfh_spans(10, 3, 3), (std::vector<int>{2, 2, 3}));
  EXPECT_EQ(hfh_spans(3, 4, 5), (std::vector<int>{0, 0, 0, 0}));
}

TEST(Hfh, ReserveFromStart) {
  WorldConfig cfg;
  // 25.46 m at 3 m per slot.
  EXPECT_EQ(reserve_slots(cfg.start, cfg), 9);
  EXPECT_EQ(reserve_slots(cfg.destination, cfg), 0);
  EXPECT_EQ(hfh_followed_terminal(1, cfg), 0);
  EXPECT_EQ(hfh_followed_terminal(7, cfg), 0);
  EXPECT_EQ(hfh_followed_terminal(8, cfg), 1);
  EXPECT_EQ(hfh_followed_terminal(31, cfg), 3);
  EXPECT_EQ(hfh_followed_terminal(32, cfg), std::nullopt);
}

TEST(Hfh, HoversOverStillTerminal) {
  WorldConfig cfg;
  EnvState s = start_state(cfg);
  s.uav = s.terminals[0];
  const auto cmd = hfh_act(s, cfg);
  EXPECT_EQ(cmd.speed, 0.0);
}

TEST(Hfh, MatchesSmallDisplacement) {
  WorldConfig cfg;
  EnvState s = start_state(cfg);
  s.uav = {2.0, 4.9};
  const auto cmd = hfh_act(s, cfg);
  EXPECT_NEAR(cmd.speed * cfg.slot_length(), 0.1, 1e-12);
  EXPECT_NEAR(cmd.heading, std::numbers::pi / 2, 1e-12);
}

TEST(Hfh, ArrivesAfterTouringTerminals) {
  WorldConfig cfg;
  EnvState s = start_state(cfg);
  bool visited_last = false;
  for (int n = 1; n <= cfg.slots; ++n) {
    Action a = compose(hfh_act(s, cfg), greedy_offload_alloc(s, cfg));
    s = step(s, prepare_action(s, a, cfg), still(cfg), cfg).next_state;
    visited_last = visited_last || distance(s.uav, s.terminals.back()) < 1e-9;
  }
  EXPECT_TRUE(visited_last);
  EXPECT_TRUE(is_arrived(s, cfg));
}

TEST(Random, BoundsSeedAndMean) {
  WorldConfig cfg;
  const EnvState s = start_state(cfg);
  Rng rng(1, 0), again(1, 0);
  const int n = 100000;
  double sum = 0;
  for (int i = 0; i < n; ++i) {
    const Action a = random_act(s, cfg, rng);
    const Action b = random_act(s, cfg, again);
    ASSERT_EQ(a.speed, b.speed);
    ASSERT_EQ(a.power, b.power);
    ASSERT_TRUE(a.speed >= 0 && a.speed <= cfg.max_speed);
    ASSERT_TRUE(a.heading >= 0 && a.heading <= 2 * std::numbers::pi);
    for (std::size_t m = 0; m < 4; ++m) {
      ASSERT_TRUE(a.power[m] >= 0 && a.power[m] <= cfg.max_power);
      ASSERT_TRUE(a.frequency[m] >= 0 && a.frequency[m] <= cfg.max_frequency);
      ASSERT_TRUE(a.offload_share[m] >= 0 && a.offload_share[m] <= 1);
    }
    sum += a.speed;
  }
  const double sd = cfg.max_speed / std::sqrt(12.0);
  EXPECT_LE(std::fabs(sum / n - cfg.max_speed / 2), 3 * sd / std::sqrt(n));
}

TEST(BaselineKind, NamesRoundTrip) {
  for (auto k : {BaselineKind::Hfh, BaselineKind::Straight, BaselineKind::GreedyLocal,
                 BaselineKind::GreedyOffload, BaselineKind::Random}) {
    EXPECT_EQ(parse_baseline(to_string(k)), k);
  }
  EXPECT_EQ(parse_baseline("bogus"), std::nullopt);
  EXPECT_TRUE(fixes_trajectory(BaselineKind::Hfh));
  EXPECT_TRUE(fixes_allocation(BaselineKind::GreedyOffload));
  EXPECT_FALSE(fixes_trajectory(BaselineKind::Random));
}
