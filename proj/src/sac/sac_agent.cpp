#include "uavmec/sac_agent.hpp"

#include <fstream>
#include <stdexcept>

#include "uavmec/detail/binary_io.hpp"

namespace uavmec::sac {

using detail::get_f64;
using detail::get_le;
using detail::put_f64;
using detail::put_le;

void AgentConfig::validate() const {
  auto fail = [](const char* what) {
    throw std::invalid_argument(std::string("invalid configuration: ") + what);
  };
  if (!(alpha >= 0)) fail("agent.alpha must be >= 0");
  if (!(gamma >= 0 && gamma <= 1)) fail("agent.gamma must lie in [0, 1]");
  if (!(tau > 0 && tau <= 1)) fail("agent.tau must lie in (0, 1]");
  if (!(learning_rate >= 0)) fail("agent.learning_rate must be >= 0");
  if (batch_size == 0) fail("agent.batch_size must be > 0");
  if (memory_capacity == 0) fail("agent.memory_capacity must be > 0");
  if (update_interval_slots == 0) fail("agent.update_interval_slots must be > 0");
  if (hidden_layers.empty()) fail("agent.hidden_layers must not be empty");
  for (auto h : hidden_layers) {
    if (h == 0) fail("agent.hidden_layers entries must be > 0");
  }
  if (!(log_std_min < log_std_max)) fail("agent.log_std_min must be < log_std_max");
}

// ---------------------------------------------------------------------------
// Replay memory

ReplayMemory::ReplayMemory(std::size_t capacity) : capacity_(capacity) {
  if (capacity_ == 0) throw std::invalid_argument("ReplayMemory: capacity must be > 0");
}

void ReplayMemory::push(Transition t) {
  if (items_.size() < capacity_) {
    items_.push_back(std::move(t));
  } else {
    items_[cursor_] = std::move(t);
  }
  cursor_ = (cursor_ + 1) % capacity_;
}

std::vector<std::size_t> ReplayMemory::sample_indices(std::size_t count, Rng& rng) const {
  if (items_.empty()) throw std::logic_error("ReplayMemory: cannot sample from an empty memory");
  std::vector<std::size_t> idx(count);
  for (auto& i : idx) i = rng.index(items_.size());
  return idx;
}

namespace {

constexpr char kReplayMagic[8] = {'U', 'A', 'V', 'M', 'E', 'C', 'R', 'M'};

void put_vector(std::ostream& out, const Vector& v) {
  for (Eigen::Index i = 0; i < v.size(); ++i) put_f64(out, v(i));
}

Vector get_vector(std::istream& in, std::size_t n) {
  Vector v(static_cast<Eigen::Index>(n));
  for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = get_f64(in);
  return v;
}

}  // namespace

void ReplayMemory::save(const std::string& path) const {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out.write(kReplayMagic, sizeof kReplayMagic);
  put_le<std::uint64_t>(out, capacity_);
  put_le<std::uint64_t>(out, cursor_);
  put_le<std::uint64_t>(out, items_.size());
  const std::size_t s_dim = items_.empty() ? 0 : static_cast<std::size_t>(items_.front().state.size());
  const std::size_t a_dim = items_.empty() ? 0 : static_cast<std::size_t>(items_.front().action.size());
  put_le<std::uint64_t>(out, s_dim);
  put_le<std::uint64_t>(out, a_dim);
  for (const auto& t : items_) {
    put_vector(out, t.state);
    put_vector(out, t.action);
    put_f64(out, t.reward);
    put_vector(out, t.next_state);
    put_le<std::uint8_t>(out, t.done ? 1 : 0);
  }
  if (!out) throw std::runtime_error("replay memory: write failed");
}

ReplayMemory ReplayMemory::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  char magic[8];
  in.read(magic, sizeof magic);
  if (!in || !std::equal(magic, magic + 8, kReplayMagic)) throw std::runtime_error("replay memory: bad magic");
  ReplayMemory m(get_le<std::uint64_t>(in));
  m.cursor_ = get_le<std::uint64_t>(in);
  const auto count = get_le<std::uint64_t>(in);
  const auto s_dim = get_le<std::uint64_t>(in);
  const auto a_dim = get_le<std::uint64_t>(in);
  if (count > m.capacity_ || m.cursor_ >= m.capacity_) throw std::runtime_error("replay memory: corrupt header");
  m.items_.reserve(count);
  for (std::uint64_t i = 0; i < count; ++i) {
    Transition t;
    t.state = get_vector(in, s_dim);
    t.action = get_vector(in, a_dim);
    t.reward = get_f64(in);
    t.next_state = get_vector(in, s_dim);
    t.done = get_le<std::uint8_t>(in) != 0;
    m.items_.push_back(std::move(t));
  }
  return m;
}

bool ReplayMemory::operator==(const ReplayMemory& other) const {
  if (capacity_ != other.capacity_ || cursor_ != other.cursor_ || items_.size() != other.items_.size()) {
    return false;
  }
  for (std::size_t i = 0; i < items_.size(); ++i) {
    const auto& a = items_[i];
    const auto& b = other.items_[i];
    if (a.state != b.state || a.action != b.action || a.reward != b.reward ||
        a.next_state != b.next_state || a.done != b.done) {
      return false;
    }
  }
  return true;
}

Batch gather(const ReplayMemory& memory, const std::vector<std::size_t>& indices) {
  if (indices.empty()) throw std::invalid_argument("gather: empty batch");
  const auto& first = memory[indices.front()];
  const auto n = static_cast<Eigen::Index>(indices.size());
  Batch b{Matrix(first.state.size(), n), Matrix(first.action.size(), n), Vector(n),
          Matrix(first.state.size(), n), Vector(n)};
  for (Eigen::Index c = 0; c < n; ++c) {
    const auto& t = memory[indices[static_cast<std::size_t>(c)]];
    b.states.col(c) = t.state;
    b.actions.col(c) = t.action;
    b.rewards(c) = t.reward;
    b.next_states.col(c) = t.next_state;
    b.done(c) = t.done ? 1.0 : 0.0;
  }
  return b;
}

// ---------------------------------------------------------------------------
// Agent

Matrix critic_input(const Matrix& states, const Matrix& actions) {
  Matrix in(states.rows() + actions.rows(), states.cols());
  in << states, actions;
  return in;
}

Vector uniform_action(std::size_t action_dim, Rng& rng) {
  Vector a(static_cast<Eigen::Index>(action_dim));
  for (Eigen::Index k = 0; k < a.size(); ++k) a(k) = rng.uniform(-1.0, 1.0);
  return a;
}

Vector explore_action(const SacAgent& agent, const Vector& state, Rng& rng, std::uint64_t slots_played) {
  if (slots_played < agent.config().warmup_random_slots) return uniform_action(agent.action_dim(), rng);
  return agent.act(state, rng, false);
}

SacAgent::SacAgent(std::size_t state_dim, std::size_t action_dim, AgentConfig config, Rng& init_rng)
    : state_dim_(state_dim), action_dim_(action_dim), config_(std::move(config)) {
  config_.validate();
  if (state_dim == 0 || action_dim == 0) throw std::invalid_argument("SacAgent: dimensions must be > 0");
  bounds_ = nn::Bounds::symmetric(static_cast<Eigen::Index>(action_dim));

  std::vector<std::size_t> policy_sizes{state_dim};
  std::vector<std::size_t> critic_sizes{state_dim + action_dim};
  for (auto h : config_.hidden_layers) {
    policy_sizes.push_back(h);
    critic_sizes.push_back(h);
  }
  policy_sizes.push_back(2 * action_dim);
  critic_sizes.push_back(1);

  policy = nn::Mlp(policy_sizes, init_rng);
  q1 = nn::Mlp(critic_sizes, init_rng);
  q2 = nn::Mlp(critic_sizes, init_rng);
  q1_target = q1;
  q2_target = q2;
  const nn::AdamConfig adam{config_.learning_rate};
  policy_opt = nn::AdamState::for_network(policy, adam);
  q1_opt = nn::AdamState::for_network(q1, adam);
  q2_opt = nn::AdamState::for_network(q2, adam);
}

Vector SacAgent::act(const Vector& state, Rng& rng, bool deterministic) const {
  const Matrix head = policy.forward(Matrix(state));
  if (deterministic) return nn::squashed_mean(head, bounds_).col(0);
  const Matrix noise = nn::standard_normal(static_cast<Eigen::Index>(action_dim_), 1, rng);
  return nn::squash(head, noise, bounds_, log_std_range()).action.col(0);
}

CriticLoss SacAgent::critic_loss(const Batch& batch, const Matrix& next_noise) const {
  const auto n = static_cast<Eigen::Index>(batch.size());
  if (n == 0) throw std::invalid_argument("critic_loss: empty batch");

  const Matrix next_head = policy.forward(batch.next_states);
  const nn::SquashedBatch next = nn::squash(next_head, next_noise, bounds_, log_std_range());
  const Matrix next_in = critic_input(batch.next_states, next.action);
  const Matrix t1 = q1_target.forward(next_in);
  const Matrix t2 = q2_target.forward(next_in);

  CriticLoss out;
  out.target.resize(n);
  for (Eigen::Index b = 0; b < n; ++b) {
    // Terminal transitions bootstrap nothing.
    if (batch.done(b) != 0.0) {
      out.target(b) = batch.rewards(b);
      continue;
    }
    const double soft_value = std::min(t1(0, b), t2(0, b)) - config_.alpha * next.log_prob(b);
    out.target(b) = batch.rewards(b) + config_.gamma * soft_value;
  }

  const Matrix in = critic_input(batch.states, batch.actions);
  auto residual = [&](const nn::Mlp& q, double& loss, nn::Gradients& grad) {
    nn::ForwardCache cache;
    const Matrix values = q.forward(in, &cache);
    const Matrix diff = values - out.target.transpose();
    loss = 0.5 * diff.squaredNorm() / static_cast<double>(n);
    grad = q.backward(cache, diff / static_cast<double>(n));
  };
  residual(q1, out.loss1, out.grad1);
  residual(q2, out.loss2, out.grad2);
  out.loss = 0.5 * (out.loss1 + out.loss2);
  return out;
}

PolicyLoss SacAgent::policy_loss(const Batch& batch, const Matrix& noise) const {
  const auto n = static_cast<Eigen::Index>(batch.size());
  if (n == 0) throw std::invalid_argument("policy_loss: empty batch");
  const double inv_n = 1.0 / static_cast<double>(n);

  nn::ForwardCache policy_cache;
  const Matrix head = policy.forward(batch.states, &policy_cache);
  const nn::SquashedBatch sample = nn::squash(head, noise, bounds_, log_std_range());

  const Matrix in = critic_input(batch.states, sample.action);
  nn::ForwardCache c1;
  nn::ForwardCache c2;
  const Matrix v1 = q1.forward(in, &c1);
  const Matrix v2 = q2.forward(in, &c2);

  Matrix g1 = Matrix::Zero(1, n);
  Matrix g2 = Matrix::Zero(1, n);
  PolicyLoss out;
  double loss = 0.0;
  for (Eigen::Index b = 0; b < n; ++b) {
    const bool first = v1(0, b) <= v2(0, b);
    const double q_min = first ? v1(0, b) : v2(0, b);
    (first ? g1 : g2)(0, b) = -inv_n;
    loss += config_.alpha * sample.log_prob(b) - q_min;
  }
  out.loss = loss * inv_n;
  out.mean_log_prob = sample.log_prob.mean();

  Matrix in_grad1;
  Matrix in_grad2;
  q1.backward(c1, g1, &in_grad1, false);
  q2.backward(c2, g2, &in_grad2, false);
  const auto a_dim = static_cast<Eigen::Index>(action_dim_);
  const Matrix grad_action = in_grad1.bottomRows(a_dim) + in_grad2.bottomRows(a_dim);
  const Vector grad_log_prob = Vector::Constant(n, config_.alpha * inv_n);
  const Matrix head_grad = nn::squash_backward(sample, grad_action, grad_log_prob);
  out.grad = policy.backward(policy_cache, head_grad);
  return out;
}

void SacAgent::soft_update() {
  const double tau = config_.tau;
  auto blend = [tau](const nn::Mlp& source, nn::Mlp& target) {
    auto& dst = target.mutable_layers();
    const auto& src = source.layers();
    for (std::size_t i = 0; i < dst.size(); ++i) {
      dst[i].weight = tau * src[i].weight + (1.0 - tau) * dst[i].weight;
      dst[i].bias = tau * src[i].bias + (1.0 - tau) * dst[i].bias;
    }
  };
  blend(q1, q1_target);
  blend(q2, q2_target);
}

UpdateStats SacAgent::update(const Batch& batch, Rng& rng) {
  const auto a_dim = static_cast<Eigen::Index>(action_dim_);
  const auto n = static_cast<Eigen::Index>(batch.size());
  UpdateStats stats;

  const CriticLoss critic = critic_loss(batch, nn::standard_normal(a_dim, n, rng));
  nn::adam_step(q1, critic.grad1, q1_opt);
  nn::adam_step(q2, critic.grad2, q2_opt);
  stats.critic_loss = critic.loss;

  const PolicyLoss actor = policy_loss(batch, nn::standard_normal(a_dim, n, rng));
  nn::adam_step(policy, actor.grad, policy_opt);
  stats.policy_loss = actor.loss;
  stats.mean_log_prob = actor.mean_log_prob;

  soft_update();
  return stats;
}

bool SacAgent::operator==(const SacAgent& other) const {
  return state_dim_ == other.state_dim_ && action_dim_ == other.action_dim_ && policy == other.policy &&
         q1 == other.q1 && q2 == other.q2 && q1_target == other.q1_target && q2_target == other.q2_target &&
         policy_opt == other.policy_opt && q1_opt == other.q1_opt && q2_opt == other.q2_opt;
}

}  // namespace uavmec::sac
