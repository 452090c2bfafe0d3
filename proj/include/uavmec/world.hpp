#pragma once

#include <vector>

#include "uavmec/geometry.hpp"

namespace uavmec {

/// Air-to-ground path-loss constants. Defaults are the remote-area set.
struct ChannelParams {
  double carrier_frequency = 2.4e9;  // Hz
  double light_speed = 3.0e8;        // m/s
  double h = 4.88;
  double l = 0.43;
  double eta_los = 0.1;   // dB
  double eta_nlos = 21.0; // dB

  void validate() const;
};

/// Physical, channel and episode constants of the network.
struct WorldConfig {
  double flight_time = 4.0;  // T, seconds
  int slots = 40;            // N
  int terminals = 4;         // M
  double altitude = 5.0;     // H, meters
  double bandwidth = 40e6;   // B, Hz
  double noise_power = 1e-9; // sigma^2, W
  double wpt_efficiency = 0.8;
  double capacitance = 1e-28;     // zeta_c
  double cycles_per_bit = 100.0;  // C
  double upload_overhead = 1.0;   // delta, upload bits per raw bit
  double uav_power = 0.1;         // P_e, W
  double max_speed = 30.0;        // m/s
  Rect field{{0.0, 0.0}, {18.0, 18.0}};
  Vec2 start{0.0, 0.0};
  Vec2 destination{18.0, 18.0};
  double destination_radius = 1.0;
  std::vector<double> initial_energy = std::vector<double>(4, 1e-3);  // J per terminal
  double max_power = 0.1;       // W
  double max_frequency = 3e8;   // cycles/s
  double reference_energy = 1e-3;  // J, state normalization scale
  ChannelParams channel;

  double slot_length() const { return flight_time / slots; }
  /// Throws std::invalid_argument naming the first violated invariant.
  void validate() const;
};

/// Observable network state at the start of slot `slot` (1-based).
struct EnvState {
  Vec2 uav;
  std::vector<Vec2> terminals;
  std::vector<double> energy;
  int slot = 1;
};

/// Per-slot decision: UAV motion plus per-terminal power, CPU frequency and
/// offloading-time share.
struct Action {
  double speed = 0.0;
  double heading = 0.0;
  std::vector<double> power;
  std::vector<double> frequency;
  std::vector<double> offload_share;

  static Action zeros(int terminals);
};

/// An action after offload-time repair and the per-slot energy check.
struct EnforcedAction {
  Action action;
  std::vector<bool> penalized;
};

struct StepOutcome {
  EnvState next_state;
  std::vector<double> bits;
  std::vector<double> harvested;
  std::vector<double> consumed;
  std::vector<bool> penalized;
};

EnvState initial_state(const WorldConfig& cfg, std::vector<Vec2> terminal_positions);

}  // namespace uavmec
