#pragma once

#include <span>
#include <vector>

#include "uavmec/geometry.hpp"
#include "uavmec/rng.hpp"

namespace uavmec {

/// Gauss-Markov parameters for one terminal. Noise spreads are standard
/// deviations; the config layer converts from variances when asked to.
struct GmrmParams {
  double speed_memory = 0.9;      // k1
  double direction_memory = 0.9;  // k2
  double mean_speed = 2.0;        // m/s
  double mean_direction = 0.0;    // rad
  double speed_noise_mean = 0.0;
  double speed_noise_std = 1.4142135623730951;
  double direction_noise_mean = 0.0;
  double direction_noise_std = 1.0;

  void validate() const;
};

using MobilityParams = std::vector<GmrmParams>;

struct TerminalMotion {
  double speed = 0.0;
  double direction = 0.0;
};

using MobilityState = std::vector<TerminalMotion>;

struct MobilityStep {
  MobilityState state;
  std::vector<Vec2> displacements;
};

/// Starts every terminal at its mean speed and mean direction.
MobilityState initial_motion(const MobilityParams& params);

/// One Gauss-Markov update per terminal using that terminal's own stream.
/// Negative speeds are clamped to zero; the direction is left unwrapped.
MobilityStep gmrm_step(const MobilityState& state, const MobilityParams& params,
                       std::span<Rng> streams, double slot_length);

/// Mirrors displacements at the field edges so every terminal stays inside,
/// flipping the matching direction component of `state` on each bounce.
std::vector<Vec2> reflect_in_field(std::span<const Vec2> positions, std::span<const Vec2> displacements,
                                   const Rect& field, MobilityState& state);

}  // namespace uavmec
