#include "uavmec/reward.hpp"

#include <cmath>
#include <stdexcept>

namespace uavmec {

void RewardParams::validate() const {
  if (omega < 0) throw std::invalid_argument("invalid configuration: omega must be >= 0");
  if (!(arrival_constant > 0 && distance_slope > 0 && computation_scale > 0)) {
    throw std::invalid_argument("invalid configuration: reward constants must be > 0");
  }
}

double fairness_index(std::span<const double> totals) {
  double sum = 0.0;
  double sum_sq = 0.0;
  for (double u : totals) {
    sum += u;
    sum_sq += u * u;
  }
  if (sum_sq == 0.0) return 1.0;
  return sum * sum / (static_cast<double>(totals.size()) * sum_sq);
}

void FairnessAccumulator::add(std::span<const double> slot_bits) {
  if (slot_bits.size() != totals_.size()) {
    throw std::invalid_argument("FairnessAccumulator: terminal count mismatch");
  }
  for (std::size_t m = 0; m < totals_.size(); ++m) totals_[m] += slot_bits[m];
}

double computation_reward(std::span<const double> slot_bits, const FairnessAccumulator& acc,
                          const RewardParams& params) {
  double sum = 0.0;
  for (double u : slot_bits) sum += u;
  return std::pow(acc.index(), params.omega) * sum;
}

double arrival_reward(Vec2 final_uav, const RewardParams& params, const WorldConfig& cfg) {
  const double d = distance(final_uav, cfg.destination);
  if (params.sparse) return d <= cfg.destination_radius ? params.arrival_constant : 0.0;
  return params.arrival_constant - params.distance_slope * d;
}

double combined_reward(int slot, int slots, double computation, std::optional<double> arrival,
                       const RewardParams& params) {
  const bool final_slot = slot == slots;
  if (arrival && !final_slot) {
    throw std::invalid_argument("combined_reward: arrival reward on a non-final slot");
  }
  if (!arrival && final_slot) {
    throw std::invalid_argument("combined_reward: final slot needs the arrival reward");
  }
  return params.computation_scale * computation + arrival.value_or(0.0);
}

}  // namespace uavmec
