#pragma once

#include <optional>

#include "uavmec/mlp.hpp"
#include "uavmec/world.hpp"

namespace uavmec {

/// Which part of the action the learner controls. The rest comes from a
/// fixed baseline rule.
enum class ControlMode {
  Full,             // speed, heading, powers, frequencies, shares: 3M + 2
  LearnAllocation,  // powers, frequencies, shares: 3M (trajectory fixed)
  LearnTrajectory,  // speed, heading: 2 (allocation fixed)
};

/// Normalized state: UAV and terminal positions scaled by the field extent,
/// batteries by the reference energy, slot index by N. Length 3M + 3.
nn::Vector encode_state(const EnvState& state, const WorldConfig& cfg);

std::size_t state_dim(const WorldConfig& cfg);
std::size_t action_dim(const WorldConfig& cfg, ControlMode mode);

struct TrajectoryCommand {
  double speed = 0.0;
  double heading = 0.0;
};

struct Allocation {
  std::vector<double> power;
  std::vector<double> frequency;
  std::vector<double> offload_share;
};

Action compose(const TrajectoryCommand& trajectory, const Allocation& allocation);

/// Maps a normalized [-1, 1] vector onto the physical action box. Layout in
/// Full mode: (speed, heading, p_1..p_M, f_1..f_M, t_1..t_M).
TrajectoryCommand decode_trajectory(const nn::Vector& normalized, std::size_t offset, const WorldConfig& cfg);
Allocation decode_allocation(const nn::Vector& normalized, std::size_t offset, const WorldConfig& cfg);

/// Builds the physical action for `mode`. The half the learner does not
/// control must be supplied.
Action decode_action(const nn::Vector& normalized, ControlMode mode, const WorldConfig& cfg,
                     const std::optional<TrajectoryCommand>& fixed_trajectory = std::nullopt,
                     const std::optional<Allocation>& fixed_allocation = std::nullopt);

}  // namespace uavmec
