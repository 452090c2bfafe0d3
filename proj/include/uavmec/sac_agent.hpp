#pragma once

#include <cstdint>
#include <vector>

#include "uavmec/mlp.hpp"
#include "uavmec/rng.hpp"
#include "uavmec/squashed_gaussian.hpp"

namespace uavmec::sac {

using nn::Matrix;
using nn::Vector;

struct AgentConfig {
  double alpha = 0.2;          // entropy temperature
  double gamma = 0.8;          // discount
  double tau = 0.002;          // target smoothing
  double learning_rate = 1e-4;
  std::size_t batch_size = 64;
  std::size_t memory_capacity = 100000;
  std::size_t update_interval_slots = 100;
  std::size_t grad_steps_per_update = 1;
  std::size_t warmup_random_slots = 1000;
  std::vector<std::size_t> hidden_layers{400, 400, 400};
  double log_std_min = -20.0;
  double log_std_max = 2.0;

  void validate() const;
};

/// One replay sample. `action` is the policy's raw output in normalized
/// [-1, 1] coordinates, before any environment-side repair.
struct Transition {
  Vector state;
  Vector action;
  double reward = 0.0;
  Vector next_state;
  bool done = false;
};

/// Fixed-capacity ring; once full, each push overwrites the oldest sample.
class ReplayMemory {
 public:
  explicit ReplayMemory(std::size_t capacity = 1);

  void push(Transition t);
  std::size_t size() const { return items_.size(); }
  std::size_t capacity() const { return capacity_; }
  std::size_t cursor() const { return cursor_; }
  const Transition& operator[](std::size_t i) const { return items_[i]; }

  /// Uniform sampling with replacement.
  std::vector<std::size_t> sample_indices(std::size_t count, Rng& rng) const;

  void save(const std::string& path) const;
  static ReplayMemory load(const std::string& path);

  bool operator==(const ReplayMemory& other) const;

 private:
  std::size_t capacity_;
  std::size_t cursor_ = 0;
  std::vector<Transition> items_;
};

/// Column-stacked view of transitions.
struct Batch {
  Matrix states;       // S x B
  Matrix actions;      // A x B
  Vector rewards;      // B
  Matrix next_states;  // S x B
  Vector done;         // B, 1.0 for terminal transitions

  std::size_t size() const { return static_cast<std::size_t>(rewards.size()); }
};

Batch gather(const ReplayMemory& memory, const std::vector<std::size_t>& indices);

struct CriticLoss {
  double loss = 0.0;  // mean over the batch and both critics
  double loss1 = 0.0;
  double loss2 = 0.0;
  nn::Gradients grad1;
  nn::Gradients grad2;
  Vector target;
};

struct PolicyLoss {
  double loss = 0.0;
  double mean_log_prob = 0.0;
  nn::Gradients grad;
};

struct UpdateStats {
  double critic_loss = 0.0;
  double policy_loss = 0.0;
  double mean_log_prob = 0.0;
};

/// Soft actor-critic learner with clipped double-Q targets. The policy acts
/// in normalized coordinates: every action dimension lies in (-1, 1).
class SacAgent {
 public:
  SacAgent() = default;
  SacAgent(std::size_t state_dim, std::size_t action_dim, AgentConfig config, Rng& init_rng);

  std::size_t state_dim() const { return state_dim_; }
  std::size_t action_dim() const { return action_dim_; }
  const AgentConfig& config() const { return config_; }
  const nn::Bounds& bounds() const { return bounds_; }
  nn::LogStdRange log_std_range() const { return {config_.log_std_min, config_.log_std_max}; }

  /// Stochastic draw from the policy, or the squashed mean when
  /// `deterministic` (the rng is then untouched).
  Vector act(const Vector& state, Rng& rng, bool deterministic) const;

  /// Soft Bellman residual for both critics. `next_noise` (A x B) drives the
  /// fresh next-state actions. Throws std::invalid_argument on an empty batch.
  CriticLoss critic_loss(const Batch& batch, const Matrix& next_noise) const;

  /// Reparameterized policy objective; `noise` is (A x B).
  PolicyLoss policy_loss(const Batch& batch, const Matrix& noise) const;

  void soft_update();

  /// One learner iteration: critic step, policy step, target update.
  UpdateStats update(const Batch& batch, Rng& rng);

  nn::Mlp policy;
  nn::Mlp q1;
  nn::Mlp q2;
  nn::Mlp q1_target;
  nn::Mlp q2_target;
  nn::AdamState policy_opt;
  nn::AdamState q1_opt;
  nn::AdamState q2_opt;

  bool operator==(const SacAgent& other) const;

 private:
  std::size_t state_dim_ = 0;
  std::size_t action_dim_ = 0;
  AgentConfig config_;
  nn::Bounds bounds_;
};

/// Critic input: state rows stacked over action rows.
Matrix critic_input(const Matrix& states, const Matrix& actions);

/// Uniform draw over the normalized action box.
Vector uniform_action(std::size_t action_dim, Rng& rng);

/// Uniform random while fewer than `warmup_random_slots` slots have been
/// played, a policy sample afterwards.
Vector explore_action(const SacAgent& agent, const Vector& state, Rng& rng, std::uint64_t slots_played);

}  // namespace uavmec::sac
