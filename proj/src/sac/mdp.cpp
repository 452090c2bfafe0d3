#include "uavmec/mdp.hpp"

#include <numbers>
#include <stdexcept>

namespace uavmec {

namespace {

double to_interval(double normalized, double lo, double hi) {
  return lo + (normalized + 1.0) * 0.5 * (hi - lo);
}

}  // namespace

std::size_t state_dim(const WorldConfig& cfg) { return 3 * static_cast<std::size_t>(cfg.terminals) + 3; }

std::size_t action_dim(const WorldConfig& cfg, ControlMode mode) {
  const auto m = static_cast<std::size_t>(cfg.terminals);
  switch (mode) {
    case ControlMode::Full: return 3 * m + 2;
    case ControlMode::LearnAllocation: return 3 * m;
    case ControlMode::LearnTrajectory: return 2;
  }
  return 0;
}

nn::Vector encode_state(const EnvState& state, const WorldConfig& cfg) {
  const auto m_count = state.terminals.size();
  nn::Vector s(static_cast<Eigen::Index>(3 * m_count + 3));
  const double w = cfg.field.width();
  const double h = cfg.field.height();
  Eigen::Index i = 0;
  s(i++) = (state.uav.x - cfg.field.lo.x) / w;
  s(i++) = (state.uav.y - cfg.field.lo.y) / h;
  for (const auto& q : state.terminals) {
    s(i++) = (q.x - cfg.field.lo.x) / w;
    s(i++) = (q.y - cfg.field.lo.y) / h;
  }
  for (double e : state.energy) s(i++) = e / cfg.reference_energy;
  s(i++) = static_cast<double>(state.slot) / cfg.slots;
  return s;
}

Action compose(const TrajectoryCommand& trajectory, const Allocation& allocation) {
  Action a;
  a.speed = trajectory.speed;
  a.heading = trajectory.heading;
  a.power = allocation.power;
  a.frequency = allocation.frequency;
  a.offload_share = allocation.offload_share;
  return a;
}

TrajectoryCommand decode_trajectory(const nn::Vector& v, std::size_t offset, const WorldConfig& cfg) {
  const auto o = static_cast<Eigen::Index>(offset);
  return {to_interval(v(o), 0.0, cfg.max_speed), to_interval(v(o + 1), 0.0, 2.0 * std::numbers::pi)};
}

Allocation decode_allocation(const nn::Vector& v, std::size_t offset, const WorldConfig& cfg) {
  const auto m_count = static_cast<Eigen::Index>(cfg.terminals);
  const auto o = static_cast<Eigen::Index>(offset);
  Allocation a;
  for (Eigen::Index m = 0; m < m_count; ++m) {
    a.power.push_back(to_interval(v(o + m), 0.0, cfg.max_power));
    a.frequency.push_back(to_interval(v(o + m_count + m), 0.0, cfg.max_frequency));
    a.offload_share.push_back(to_interval(v(o + 2 * m_count + m), 0.0, 1.0));
  }
  return a;
}

Action decode_action(const nn::Vector& normalized, ControlMode mode, const WorldConfig& cfg,
                     const std::optional<TrajectoryCommand>& fixed_trajectory,
                     const std::optional<Allocation>& fixed_allocation) {
  if (static_cast<std::size_t>(normalized.size()) != action_dim(cfg, mode)) {
    throw std::invalid_argument("decode_action: action has the wrong length for this control mode");
  }
  switch (mode) {
    case ControlMode::Full:
      return compose(decode_trajectory(normalized, 0, cfg), decode_allocation(normalized, 2, cfg));
    case ControlMode::LearnAllocation:
      if (!fixed_trajectory) throw std::invalid_argument("decode_action: trajectory must be supplied");
      return compose(*fixed_trajectory, decode_allocation(normalized, 0, cfg));
    case ControlMode::LearnTrajectory:
      if (!fixed_allocation) throw std::invalid_argument("decode_action: allocation must be supplied");
      return compose(decode_trajectory(normalized, 0, cfg), *fixed_allocation);
  }
  throw std::invalid_argument("decode_action: unknown control mode");
}

}  // namespace uavmec
