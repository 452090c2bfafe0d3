#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "uavmec/mdp.hpp"
#include "uavmec/rng.hpp"
#include "uavmec/world.hpp"

namespace uavmec {

enum class BaselineKind { Hfh, Straight, GreedyLocal, GreedyOffload, Random };

std::string_view to_string(BaselineKind kind);
std::optional<BaselineKind> parse_baseline(std::string_view name);

/// True for the kinds that fix the trajectory (HFH, straight line).
bool fixes_trajectory(BaselineKind kind);
/// True for the kinds that fix the resource allocation (both greedy rules).
bool fixes_allocation(BaselineKind kind);

/// Slots needed to reach the destination from `from` at full speed.
int reserve_slots(Vec2 from, const WorldConfig& cfg);

/// Follow-span lengths for hover-fly-hover: the non-reserved slots split
/// equally over the terminals in index order, remainder on the last one.
std::vector<int> hfh_spans(int slots, int terminals, int reserve);

/// Terminal followed in `slot` under the schedule fixed at the start point,
/// or std::nullopt once the schedule is exhausted.
std::optional<int> hfh_followed_terminal(int slot, const WorldConfig& cfg);

/// Hover-fly-hover: track the scheduled terminal (at most full speed) and
/// head for the destination once the remaining slots equal the reserve.
TrajectoryCommand hfh_act(const EnvState& state, const WorldConfig& cfg);

/// Constant-speed straight line from start to destination over the flight.
/// Throws std::domain_error when that speed exceeds the UAV limit.
TrajectoryCommand straight_act(const EnvState& state, const WorldConfig& cfg);

/// Every terminal spends its whole battery on local computing (capped at
/// the CPU limit), without offloading.
Allocation greedy_local_alloc(const EnvState& state, const WorldConfig& cfg);

/// Every terminal spends its whole battery on offloading with equal time
/// shares (power capped at the limit), without local computing.
Allocation greedy_offload_alloc(const EnvState& state, const WorldConfig& cfg);

/// Each component uniform over its interval.
Action random_act(const EnvState& state, const WorldConfig& cfg, Rng& rng);

}  // namespace uavmec
