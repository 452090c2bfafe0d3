#include "uavmec/trainer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <numeric>
#include <stdexcept>

#include "uavmec/environment.hpp"
#include "uavmec/mdp.hpp"
#include "uavmec/network_io.hpp"

namespace uavmec {

namespace {

constexpr std::uint64_t kActionStream = 0;
constexpr std::uint64_t kEnvStream = 1;
constexpr std::uint64_t kLearnerStream = 2;
constexpr std::uint64_t kSeedPositionStream = 3;
constexpr std::uint64_t kInitStream = 4;
constexpr std::uint64_t kMobilityStream = 10;
constexpr std::uint64_t kEvalStreamBase = 1000;
constexpr int kCheckpointVersion = 1;

std::vector<Vec2> uniform_positions(int count, const Rect& field, Rng& rng) {
  std::vector<Vec2> out;
  for (int m = 0; m < count; ++m) {
    const double x = rng.uniform(field.lo.x, field.hi.x);
    const double y = rng.uniform(field.lo.y, field.hi.y);
    out.push_back({x, y});
  }
  return out;
}

double mean_of(const std::vector<EpisodeRecord>& records, double EpisodeRecord::*field) {
  if (records.empty()) return 0.0;
  double s = 0.0;
  for (const auto& r : records) s += r.*field;
  return s / static_cast<double>(records.size());
}

nlohmann::json positions_json(const std::vector<Vec2>& ps) {
  auto out = nlohmann::json::array();
  for (const auto& p : ps) out.push_back({p.x, p.y});
  return out;
}

std::vector<Vec2> positions_from(const nlohmann::json& j) {
  std::vector<Vec2> out;
  for (const auto& p : j) out.push_back({p.at(0).get<double>(), p.at(1).get<double>()});
  return out;
}

}  // namespace

ControlMode TrainerConfig::control_mode() const {
  if (!baseline) return ControlMode::Full;
  if (fixes_trajectory(*baseline)) return ControlMode::LearnAllocation;
  if (fixes_allocation(*baseline)) return ControlMode::LearnTrajectory;
  return ControlMode::Full;
}

bool TrainerConfig::has_learner() const {
  if (!baseline) return true;
  return learn && *baseline != BaselineKind::Random;
}

void TrainerConfig::validate() const {
  world.validate();
  const auto m = static_cast<std::size_t>(world.terminals);
  if (mobility.size() != m) throw std::invalid_argument("invalid configuration: mobility needs one entry per terminal");
  for (const auto& p : mobility) p.validate();
  for (const auto& s : mobility_schedule) {
    if (s.params.size() != m) {
      throw std::invalid_argument("invalid configuration: mobility schedule entry needs one entry per terminal");
    }
    for (const auto& p : s.params) p.validate();
  }
  if (initial_positions.mode == InitialPositions::Mode::Fixed) {
    if (initial_positions.fixed.size() != m) {
      throw std::invalid_argument("invalid configuration: initial positions need one entry per terminal");
    }
    for (const auto& p : initial_positions.fixed) {
      if (!world.field.contains(p)) throw std::invalid_argument("invalid configuration: initial position outside the field");
    }
  }
  reward.validate();
  if (objective_omega && *objective_omega < 0) throw std::invalid_argument("invalid configuration: objective omega must be >= 0");
  agent.validate();
  if (!baseline && !learn) throw std::invalid_argument("invalid configuration: nothing to act without a baseline or learner");
  if (baseline == BaselineKind::Straight &&
      distance(world.start, world.destination) / world.flight_time > world.max_speed) {
    throw std::invalid_argument("invalid configuration: straight line needs more than the maximum speed");
  }
}

EvalSummary summarize(std::vector<EpisodeRecord> records) {
  EvalSummary s;
  s.mean_return = mean_of(records, &EpisodeRecord::episode_return);
  s.mean_bits = mean_of(records, &EpisodeRecord::sum_bits);
  s.mean_fairness = mean_of(records, &EpisodeRecord::fairness);
  s.mean_objective = mean_of(records, &EpisodeRecord::objective);
  if (!records.empty()) {
    const auto arrived = std::count_if(records.begin(), records.end(), [](const auto& r) { return r.arrived; });
    s.arrival_ratio = static_cast<double>(arrived) / static_cast<double>(records.size());
  }
  s.episodes = std::move(records);
  return s;
}

Trainer::Trainer(TrainerConfig config, std::uint64_t seed)
    : config_(std::move(config)), seed_(seed), memory_(1) {
  config_.validate();
  memory_ = sac::ReplayMemory(config_.agent.memory_capacity);
  streams_ = make_streams(seed_, 0);
  Rng position_rng(seed_, kSeedPositionStream);
  seed_positions_ = uniform_positions(config_.world.terminals, config_.world.field, position_rng);
  if (config_.has_learner()) {
    Rng init(seed_, kInitStream);
    agent_.emplace(state_dim(config_.world), action_dim(config_.world, config_.control_mode()), config_.agent,
                   init);
  }
}

Trainer::Streams Trainer::make_streams(std::uint64_t seed, std::uint64_t base) const {
  Streams s{Rng(seed, base + kActionStream), Rng(seed, base + kEnvStream), Rng(seed, base + kLearnerStream), {}};
  for (int m = 0; m < config_.world.terminals; ++m) {
    s.mobility.emplace_back(seed, base + kMobilityStream + static_cast<std::uint64_t>(m));
  }
  return s;
}

MobilityParams Trainer::mobility_for_episode(std::uint64_t episode) const {
  MobilityParams params = config_.mobility;
  const MobilitySwitch* latest = nullptr;
  for (const auto& s : config_.mobility_schedule) {
    if (s.episode <= episode && (!latest || s.episode >= latest->episode)) latest = &s;
  }
  if (latest) params = latest->params;
  return params;
}

std::vector<Vec2> Trainer::start_positions(Rng& env) const {
  switch (config_.initial_positions.mode) {
    case InitialPositions::Mode::Fixed:
      return config_.initial_positions.fixed;
    case InitialPositions::Mode::RandomPerEpisode:
      return uniform_positions(config_.world.terminals, config_.world.field, env);
    case InitialPositions::Mode::RandomPerSeed:
      break;
  }
  return seed_positions_;
}

EpisodeRecord Trainer::rollout(std::uint64_t episode, Streams& streams, const SlotHook& on_slot,
                                const TraceSink& trace) const {
  const bool training = static_cast<bool>(on_slot);
  const WorldConfig& world = config_.world;
  const ControlMode mode = config_.control_mode();
  const MobilityParams mobility = mobility_for_episode(episode);
  const std::size_t m = static_cast<std::size_t>(world.terminals);

  EnvState state = initial_state(world, start_positions(streams.env));
  MobilityState motion = initial_motion(mobility);
  FairnessAccumulator acc(m);
  EpisodeRecord record;
  record.episode = episode;
  double act_seconds = 0.0;

  for (int n = 1; n <= world.slots; ++n) {
    const nn::Vector s = encode_state(state, world);
    nn::Vector normalized;
    const auto t0 = std::chrono::steady_clock::now();
    Action action;
    if (agent_) {
      normalized = training ? sac::explore_action(*agent_, s, streams.action, slots_played_)
                            : agent_->act(s, streams.action, true);
      std::optional<TrajectoryCommand> trajectory;
      std::optional<Allocation> allocation;
      if (mode == ControlMode::LearnAllocation) {
        trajectory = *config_.baseline == BaselineKind::Hfh ? hfh_act(state, world) : straight_act(state, world);
      } else if (mode == ControlMode::LearnTrajectory) {
        allocation = *config_.baseline == BaselineKind::GreedyLocal ? greedy_local_alloc(state, world)
                                                                    : greedy_offload_alloc(state, world);
      }
      action = decode_action(normalized, mode, world, trajectory, allocation);
    } else {
      const BaselineKind kind = *config_.baseline;
      action = random_act(state, world, streams.action);
      if (fixes_trajectory(kind)) {
        const TrajectoryCommand t = kind == BaselineKind::Hfh ? hfh_act(state, world) : straight_act(state, world);
        action.speed = t.speed;
        action.heading = t.heading;
      } else if (fixes_allocation(kind)) {
        Allocation a = kind == BaselineKind::GreedyLocal ? greedy_local_alloc(state, world)
                                                          : greedy_offload_alloc(state, world);
        action.power = std::move(a.power);
        action.frequency = std::move(a.frequency);
        action.offload_share = std::move(a.offload_share);
      }
    }
    act_seconds += std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    const EnforcedAction enforced = prepare_action(state, std::move(action), world);
    MobilityStep moved = gmrm_step(motion, mobility, streams.mobility, world.slot_length());
    const std::vector<Vec2> moves = reflect_in_field(state.terminals, moved.displacements, world.field, moved.state);
    motion = std::move(moved.state);
    StepOutcome out = step(state, enforced, moves, world);

    acc.add(out.bits);
    const double comp = computation_reward(out.bits, acc, config_.reward);
    std::optional<double> arrival;
    if (n == world.slots) arrival = arrival_reward(out.next_state.uav, config_.reward, world);
    const double r = combined_reward(n, world.slots, comp, arrival, config_.reward);
    record.episode_return += r;

    if (trace) {
      SlotTrace row;
      row.episode = episode;
      row.slot = n;
      row.uav = state.uav;
      row.speed = enforced.action.speed;
      row.heading = enforced.action.heading;
      row.power = enforced.action.power;
      row.offload_share = enforced.action.offload_share;
      row.frequency = enforced.action.frequency;
      for (const auto& q : state.terminals) row.distance.push_back(distance(state.uav, q));
      row.bits = out.bits;
      row.energy = out.next_state.energy;
      row.reward = r;
      trace(row);
    }

    if (training) on_slot({s, normalized, r, encode_state(out.next_state, world), n == world.slots});
    state = std::move(out.next_state);
  }

  const auto& totals = acc.totals();
  record.sum_bits = std::accumulate(totals.begin(), totals.end(), 0.0);
  record.fairness = acc.index();
  record.objective = std::pow(record.fairness, config_.effective_objective_omega()) * record.sum_bits;
  record.arrived = is_arrived(state, world);
  record.final_distance = distance(state.uav, world.destination);
  record.act_latency_us = 1e6 * act_seconds / world.slots;
  return record;
}

EpisodeRecord Trainer::train_episode(const TraceSink& trace) {
  const auto& ac = config_.agent;
  auto learn = [&](sac::Transition t) {
    ++slots_played_;
    if (!agent_) return;
    memory_.push(std::move(t));
    if (slots_played_ % ac.update_interval_slots != 0 || memory_.size() < ac.batch_size) return;
    for (std::size_t g = 0; g < ac.grad_steps_per_update; ++g) {
      agent_->update(sac::gather(memory_, memory_.sample_indices(ac.batch_size, streams_.learner)),
                     streams_.learner);
      ++updates_;
    }
  };
  EpisodeRecord r = rollout(episode_, streams_, learn, trace);
  ++episode_;
  return r;
}

EvalSummary Trainer::evaluate(int episodes, std::uint64_t eval_seed, const TraceSink& trace) const {
  Streams streams = make_streams(eval_seed, kEvalStreamBase);
  std::vector<EpisodeRecord> records;
  for (int e = 0; e < episodes; ++e) {
    TraceSink numbered;
    if (trace) {
      numbered = [&](const SlotTrace& t) {
        SlotTrace row = t;
        row.episode = static_cast<std::uint64_t>(e);
        trace(row);
      };
    }
    records.push_back(rollout(episode_, streams, {}, numbered));
    records.back().episode = static_cast<std::uint64_t>(e);
  }
  return summarize(std::move(records));
}

void Trainer::save_checkpoint(const std::filesystem::path& dir, const nlohmann::json& config_echo) const {
  std::filesystem::create_directories(dir);
  if (agent_) {
    nn::save_network((dir / "policy.ckpt").string(), agent_->policy, &agent_->policy_opt);
    nn::save_network((dir / "q1.ckpt").string(), agent_->q1, &agent_->q1_opt);
    nn::save_network((dir / "q2.ckpt").string(), agent_->q2, &agent_->q2_opt);
    nn::save_network((dir / "q1_target.ckpt").string(), agent_->q1_target, nullptr);
    nn::save_network((dir / "q2_target.ckpt").string(), agent_->q2_target, nullptr);
    memory_.save((dir / "replay.bin").string());
  }
  nlohmann::json manifest;
  manifest["version"] = kCheckpointVersion;
  manifest["seed"] = seed_;
  manifest["episodes_done"] = episode_;
  manifest["slots_played"] = slots_played_;
  manifest["updates_done"] = updates_;
  manifest["rng"]["action"] = streams_.action.save_state();
  manifest["rng"]["env"] = streams_.env.save_state();
  manifest["rng"]["learner"] = streams_.learner.save_state();
  for (const auto& r : streams_.mobility) manifest["rng"]["mobility"].push_back(r.save_state());
  manifest["seed_positions"] = positions_json(seed_positions_);
  manifest["config"] = config_echo;

  const auto tmp = dir / "manifest.json.tmp";
  {
    std::ofstream out(tmp);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out << manifest.dump(2) << '\n';
  }
  std::filesystem::rename(tmp, dir / "manifest.json");
}

Trainer Trainer::load_checkpoint(const std::filesystem::path& dir, TrainerConfig config,
                                 const nlohmann::json& config_echo) {
  std::ifstream in(dir / "manifest.json");
  if (!in) throw std::runtime_error("no checkpoint manifest in " + dir.string());
  nlohmann::json manifest;
  try {
    manifest = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error("corrupt checkpoint manifest: " + std::string(e.what()));
  }
  if (manifest.value("version", 0) != kCheckpointVersion) {
    throw std::runtime_error("unsupported checkpoint version");
  }
  if (manifest.at("config") != config_echo) {
    throw std::runtime_error("checkpoint was written with a different configuration");
  }
  Trainer t(std::move(config), manifest.at("seed").get<std::uint64_t>());
  t.episode_ = manifest.at("episodes_done").get<std::uint64_t>();
  t.slots_played_ = manifest.at("slots_played").get<std::uint64_t>();
  t.updates_ = manifest.at("updates_done").get<std::uint64_t>();
  const auto& rng = manifest.at("rng");
  t.streams_.action.load_state(rng.at("action").get<std::string>());
  t.streams_.env.load_state(rng.at("env").get<std::string>());
  t.streams_.learner.load_state(rng.at("learner").get<std::string>());
  const auto& mob = rng.at("mobility");
  if (mob.size() != t.streams_.mobility.size()) throw std::runtime_error("checkpoint terminal count mismatch");
  for (std::size_t i = 0; i < mob.size(); ++i) t.streams_.mobility[i].load_state(mob[i].get<std::string>());
  t.seed_positions_ = positions_from(manifest.at("seed_positions"));

  if (t.agent_) {
    auto restore = [&](const char* name, nn::Mlp& net, nn::AdamState* opt) {
      nn::LoadedNetwork loaded = nn::load_network((dir / name).string());
      if (loaded.net.sizes() != net.sizes()) throw std::runtime_error(std::string("shape mismatch in ") + name);
      net = std::move(loaded.net);
      if (opt) {
        if (!loaded.optimizer) throw std::runtime_error(std::string("missing optimizer state in ") + name);
        *opt = std::move(*loaded.optimizer);
      }
    };
    auto& a = *t.agent_;
    restore("policy.ckpt", a.policy, &a.policy_opt);
    restore("q1.ckpt", a.q1, &a.q1_opt);
    restore("q2.ckpt", a.q2, &a.q2_opt);
    restore("q1_target.ckpt", a.q1_target, nullptr);
    restore("q2_target.ckpt", a.q2_target, nullptr);
    t.memory_ = sac::ReplayMemory::load((dir / "replay.bin").string());
    if (t.memory_.capacity() != t.config_.agent.memory_capacity) {
      throw std::runtime_error("checkpoint replay capacity mismatch");
    }
  }
  return t;
}

bool Trainer::operator==(const Trainer& other) const {
  return seed_ == other.seed_ && episode_ == other.episode_ && slots_played_ == other.slots_played_ &&
         updates_ == other.updates_ && agent_ == other.agent_ && memory_ == other.memory_ &&
         streams_.action == other.streams_.action && streams_.env == other.streams_.env &&
         streams_.learner == other.streams_.learner && streams_.mobility == other.streams_.mobility &&
         seed_positions_ == other.seed_positions_;
}

std::optional<std::size_t> episodes_to_arrival_ratio(const std::vector<EpisodeRecord>& records, double threshold,
                                                     std::size_t window) {
  if (window == 0 || records.size() < window) return std::nullopt;
  std::size_t arrived = 0;
  for (std::size_t i = 0; i < records.size(); ++i) {
    arrived += records[i].arrived ? 1 : 0;
    if (i >= window) arrived -= records[i - window].arrived ? 1 : 0;
    if (i + 1 >= window && static_cast<double>(arrived) >= threshold * static_cast<double>(window)) return i + 1;
  }
  return std::nullopt;
}

}  // namespace uavmec
