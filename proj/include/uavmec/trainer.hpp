#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <vector>

#include <json.hpp>

#include "uavmec/baselines.hpp"
#include "uavmec/mobility.hpp"
#include "uavmec/reward.hpp"
#include "uavmec/sac_agent.hpp"
#include "uavmec/world.hpp"

namespace uavmec {

/// How terminal start positions are chosen.
struct InitialPositions {
  enum class Mode { RandomPerSeed, RandomPerEpisode, Fixed };
  Mode mode = Mode::RandomPerSeed;
  std::vector<Vec2> fixed;
};

/// Mobility parameters that take effect from `episode` (0-based) onward.
struct MobilitySwitch {
  std::uint64_t episode = 0;
  MobilityParams params;
};

struct TrainerConfig {
  WorldConfig world;
  MobilityParams mobility;
  std::vector<MobilitySwitch> mobility_schedule;
  InitialPositions initial_positions;
  RewardParams reward;
  std::optional<int> objective_omega;  // defaults to reward.omega
  sac::AgentConfig agent;
  std::optional<BaselineKind> baseline;
  bool learn = true;  // train SAC on whatever half the baseline leaves free

  int effective_objective_omega() const { return objective_omega.value_or(reward.omega); }
  ControlMode control_mode() const;
  bool has_learner() const;
  void validate() const;
};

struct EpisodeRecord {
  std::uint64_t episode = 0;
  double episode_return = 0.0;
  double sum_bits = 0.0;
  double fairness = 1.0;
  double objective = 0.0;
  bool arrived = false;
  double final_distance = 0.0;
  double act_latency_us = 0.0;  // wall clock, mean per slot; not deterministic
};

/// One executed slot, for trajectory dumps.
struct SlotTrace {
  std::uint64_t episode = 0;
  int slot = 0;
  Vec2 uav;
  double speed = 0.0;
  double heading = 0.0;
  std::vector<double> power;
  std::vector<double> offload_share;
  std::vector<double> frequency;
  std::vector<double> distance;
  std::vector<double> bits;
  std::vector<double> energy;
  double reward = 0.0;
};

using TraceSink = std::function<void(const SlotTrace&)>;

struct EvalSummary {
  std::vector<EpisodeRecord> episodes;
  double mean_return = 0.0;
  double mean_bits = 0.0;
  double mean_fairness = 0.0;
  double mean_objective = 0.0;
  double arrival_ratio = 0.0;
};

EvalSummary summarize(std::vector<EpisodeRecord> records);

/// Owns everything a training run mutates: learner, replay memory, random
/// streams and counters. Each training episode plays N slots and performs
/// the configured gradient steps every `update_interval_slots` slots.
class Trainer {
 public:
  Trainer(TrainerConfig config, std::uint64_t seed);

  EpisodeRecord train_episode(const TraceSink& trace = {});

  /// Rollouts on fresh streams derived from `eval_seed`; the learner acts
  /// with its squashed mean. Training state is untouched. Trace rows carry
  /// the evaluation episode index.
  EvalSummary evaluate(int episodes, std::uint64_t eval_seed, const TraceSink& trace = {}) const;

  void save_checkpoint(const std::filesystem::path& dir, const nlohmann::json& config_echo) const;

  /// Restores a run saved by save_checkpoint. Throws std::runtime_error when
  /// the stored config echo differs from `config_echo`.
  static Trainer load_checkpoint(const std::filesystem::path& dir, TrainerConfig config,
                                 const nlohmann::json& config_echo);

  const TrainerConfig& config() const { return config_; }
  std::uint64_t seed() const { return seed_; }
  std::uint64_t episodes_done() const { return episode_; }
  std::uint64_t slots_played() const { return slots_played_; }
  std::uint64_t updates_done() const { return updates_; }
  const std::optional<sac::SacAgent>& agent() const { return agent_; }
  std::optional<sac::SacAgent>& mutable_agent() { return agent_; }
  const sac::ReplayMemory& memory() const { return memory_; }
  const std::vector<Vec2>& seed_positions() const { return seed_positions_; }

  MobilityParams mobility_for_episode(std::uint64_t episode) const;

  bool operator==(const Trainer& other) const;

 private:
  struct Streams {
    Rng action;
    Rng env;
    Rng learner;
    std::vector<Rng> mobility;
  };

  using SlotHook = std::function<void(sac::Transition)>;

  // Plays one episode; exploration and learning are on when `on_slot` is set.
  EpisodeRecord rollout(std::uint64_t episode, Streams& streams, const SlotHook& on_slot,
                        const TraceSink& trace) const;
  std::vector<Vec2> start_positions(Rng& env) const;
  Streams make_streams(std::uint64_t seed, std::uint64_t stream_base) const;

  TrainerConfig config_;
  std::uint64_t seed_ = 0;
  std::optional<sac::SacAgent> agent_;
  sac::ReplayMemory memory_;
  Streams streams_;
  std::vector<Vec2> seed_positions_;
  std::uint64_t episode_ = 0;
  std::uint64_t slots_played_ = 0;
  std::uint64_t updates_ = 0;
};

/// Episodes until the arrival ratio over the last `window` episodes first
/// reaches `threshold`, or std::nullopt if it never does.
std::optional<std::size_t> episodes_to_arrival_ratio(const std::vector<EpisodeRecord>& records,
                                                     double threshold, std::size_t window = 100);

}  // namespace uavmec
