#pragma once

#include <optional>
#include <span>
#include <vector>

#include "uavmec/world.hpp"

namespace uavmec {

struct RewardParams {
  int omega = 4;                      // fairness exponent
  double arrival_constant = 500.0;    // A1
  double distance_slope = 80.0;       // A2, per meter
  double computation_scale = 4.9e-4;  // A3
  bool sparse = false;                // hit-or-miss arrival reward instead of progress

  void validate() const;
};

/// Jain's index (sum U)^2 / (M * sum U^2). All-zero totals count as 1.
double fairness_index(std::span<const double> totals);

/// Running per-terminal bit totals through the current slot.
class FairnessAccumulator {
 public:
  explicit FairnessAccumulator(std::size_t terminals) : totals_(terminals, 0.0) {}

  void add(std::span<const double> slot_bits);
  double index() const { return fairness_index(totals_); }
  const std::vector<double>& totals() const { return totals_; }

 private:
  std::vector<double> totals_;
};

/// I_n^omega * sum of this slot's bits. `acc` must already include them.
double computation_reward(std::span<const double> slot_bits, const FairnessAccumulator& acc,
                          const RewardParams& params);

/// Paid once after the last slot: A1 - A2 * distance in progress mode,
/// A1 or 0 in sparse mode.
double arrival_reward(Vec2 final_uav, const RewardParams& params, const WorldConfig& cfg);

/// Scaled computation reward, plus the arrival reward on the final slot only.
/// Throws std::invalid_argument if the arrival term is given on another slot
/// or is missing on the final one.
double combined_reward(int slot, int slots, double computation, std::optional<double> arrival,
                       const RewardParams& params);

}  // namespace uavmec
