#pragma once

#include <span>
#include <vector>

#include "uavmec/world.hpp"

namespace uavmec {

/// Linear channel power gain between the UAV and a ground terminal under the
/// air-to-ground model (LoS/NLoS excess loss weighted by the elevation-angle
/// LoS probability). Directly overhead counts as a 90 degree elevation.
double channel_gain(Vec2 uav, Vec2 terminal, const WorldConfig& cfg);

/// Path loss in dB; channel_gain is 10^(-loss/10).
double path_loss_db(Vec2 uav, Vec2 terminal, const WorldConfig& cfg);

/// Raw bits offloaded in one slot with time share `share` and power `power`.
double offload_bits(double share, double power, double gain, const WorldConfig& cfg);

/// Raw bits computed locally in one slot at CPU frequency `frequency`.
double local_bits(double frequency, const WorldConfig& cfg);

/// Energy harvested in one slot from the UAV's broadcast.
double harvested_energy(double gain, const WorldConfig& cfg);

/// Energy a terminal spends in one slot on local compute plus uploading.
double slot_energy(double power, double frequency, double share, const WorldConfig& cfg);

/// Scales offload shares down proportionally when they sum above one.
std::vector<double> repair_offload_times(std::span<const double> shares);

/// Zeroes power and frequency of every terminal whose slot spend exceeds its
/// battery. The boundary is inclusive: spending exactly the battery is allowed.
EnforcedAction enforce_energy(const EnvState& state, Action action, const WorldConfig& cfg);

/// repair_offload_times followed by enforce_energy.
EnforcedAction prepare_action(const EnvState& state, Action action, const WorldConfig& cfg);

/// Advances one slot. Bits and harvest use the start-of-slot geometry, then the
/// UAV and terminals move (both clamped to the field) and batteries settle.
/// Throws std::logic_error when the episode is already over.
StepOutcome step(const EnvState& state, const EnforcedAction& action,
                 std::span<const Vec2> terminal_moves, const WorldConfig& cfg);

bool is_arrived(const EnvState& state, const WorldConfig& cfg);

}  // namespace uavmec
