#include "uavmec/baselines.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "uavmec/environment.hpp"

namespace uavmec {

namespace {

double bearing(Vec2 from, Vec2 to) {
  double theta = std::atan2(to.y - from.y, to.x - from.x);
  if (theta < 0) theta += 2.0 * std::numbers::pi;
  return theta;
}

TrajectoryCommand move_toward(Vec2 from, Vec2 to, const WorldConfig& cfg) {
  const double d = distance(from, to);
  if (d == 0.0) return {0.0, 0.0};
  return {std::min(d / cfg.slot_length(), cfg.max_speed), bearing(from, to)};
}

// Largest value <= `guess` whose slot spend fits in `budget`.
template <typename Spend>
double fit_budget(double guess, double budget, Spend spend) {
  double v = guess;
  while (v > 0.0 && spend(v) > budget) v = std::nextafter(v, 0.0);
  return v;
}

}  // namespace

std::string_view to_string(BaselineKind kind) {
  switch (kind) {
    case BaselineKind::Hfh: return "hfh";
    case BaselineKind::Straight: return "straight";
    case BaselineKind::GreedyLocal: return "greedy_local";
    case BaselineKind::GreedyOffload: return "greedy_offload";
    case BaselineKind::Random: return "random";
  }
  return "?";
}

std::optional<BaselineKind> parse_baseline(std::string_view name) {
  for (auto k : {BaselineKind::Hfh, BaselineKind::Straight, BaselineKind::GreedyLocal,
                 BaselineKind::GreedyOffload, BaselineKind::Random}) {
    if (to_string(k) == name) return k;
  }
  return std::nullopt;
}

bool fixes_trajectory(BaselineKind kind) {
  return kind == BaselineKind::Hfh || kind == BaselineKind::Straight;
}

bool fixes_allocation(BaselineKind kind) {
  return kind == BaselineKind::GreedyLocal || kind == BaselineKind::GreedyOffload;
}

int reserve_slots(Vec2 from, const WorldConfig& cfg) {
  const double reach = cfg.max_speed * cfg.slot_length();
  const double d = distance(from, cfg.destination);
  if (d == 0.0) return 0;
  if (reach <= 0.0) return std::numeric_limits<int>::max();
  return static_cast<int>(std::ceil(d / reach));
}

std::vector<int> hfh_spans(int slots, int terminals, int reserve) {
  const int free_slots = std::max(slots - reserve, 0);
  std::vector<int> spans(static_cast<std::size_t>(terminals), free_slots / terminals);
  spans.back() += free_slots - spans.back() * terminals;
  return spans;
}

std::optional<int> hfh_followed_terminal(int slot, const WorldConfig& cfg) {
  const auto spans = hfh_spans(cfg.slots, cfg.terminals, reserve_slots(cfg.start, cfg));
  int end = 0;
  for (std::size_t m = 0; m < spans.size(); ++m) {
    end += spans[m];
    if (slot <= end && spans[m] > 0) return static_cast<int>(m);
  }
  return std::nullopt;
}

TrajectoryCommand hfh_act(const EnvState& state, const WorldConfig& cfg) {
  const int remaining = cfg.slots - state.slot + 1;
  const auto followed = hfh_followed_terminal(state.slot, cfg);
  if (remaining <= reserve_slots(state.uav, cfg) || !followed) {
    return move_toward(state.uav, cfg.destination, cfg);
  }
  return move_toward(state.uav, state.terminals[static_cast<std::size_t>(*followed)], cfg);
}

TrajectoryCommand straight_act(const EnvState&, const WorldConfig& cfg) {
  const double speed = distance(cfg.start, cfg.destination) / cfg.flight_time;
  if (speed > cfg.max_speed) {
    throw std::domain_error("straight trajectory needs a speed above the UAV limit");
  }
  return {speed, bearing(cfg.start, cfg.destination)};
}

Allocation greedy_local_alloc(const EnvState& state, const WorldConfig& cfg) {
  Allocation a;
  for (double e : state.energy) {
    double f = cfg.max_frequency;
    if (cfg.capacitance > 0.0) {
      f = std::min(cfg.max_frequency, std::cbrt(e * cfg.slots / (cfg.flight_time * cfg.capacitance)));
    }
    f = fit_budget(f, e, [&](double v) { return slot_energy(0.0, v, 0.0, cfg); });
    a.power.push_back(0.0);
    a.frequency.push_back(f);
    a.offload_share.push_back(0.0);
  }
  return a;
}

Allocation greedy_offload_alloc(const EnvState& state, const WorldConfig& cfg) {
  Allocation a;
  const double share = 1.0 / static_cast<double>(state.energy.size());
  for (double e : state.energy) {
    double p = std::min(cfg.max_power, e * cfg.slots / (cfg.flight_time * share));
    p = fit_budget(p, e, [&](double v) { return slot_energy(v, 0.0, share, cfg); });
    a.power.push_back(p);
    a.frequency.push_back(0.0);
    a.offload_share.push_back(share);
  }
  return a;
}

Action random_act(const EnvState& state, const WorldConfig& cfg, Rng& rng) {
  Action a;
  a.speed = rng.uniform(0.0, cfg.max_speed);
  a.heading = rng.uniform(0.0, 2.0 * std::numbers::pi);
  const std::size_t m_count = state.terminals.size();
  for (std::size_t m = 0; m < m_count; ++m) a.power.push_back(rng.uniform(0.0, cfg.max_power));
  for (std::size_t m = 0; m < m_count; ++m) a.frequency.push_back(rng.uniform(0.0, cfg.max_frequency));
  for (std::size_t m = 0; m < m_count; ++m) a.offload_share.push_back(rng.uniform(0.0, 1.0));
  return a;
}

}  // namespace uavmec
