#include "uavmec/environment.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace uavmec {

double path_loss_db(Vec2 uav, Vec2 terminal, const WorldConfig& cfg) {
  const ChannelParams& ch = cfg.channel;
  const double horizontal = distance(uav, terminal);
  const double slant = std::sqrt(horizontal * horizontal + cfg.altitude * cfg.altitude);
  const double free_space =
      20.0 * std::log10(4.0 * std::numbers::pi * ch.carrier_frequency * slant / ch.light_speed);
  // atan2 gives exactly pi/2 at zero horizontal distance.
  const double elevation_deg = std::atan2(cfg.altitude, horizontal) * 180.0 / std::numbers::pi;
  const double p_los = 1.0 / (1.0 + ch.h * std::exp(-ch.l * (elevation_deg - ch.h)));
  return free_space + p_los * ch.eta_los + (1.0 - p_los) * ch.eta_nlos;
}

double channel_gain(Vec2 uav, Vec2 terminal, const WorldConfig& cfg) {
  return std::pow(10.0, -path_loss_db(uav, terminal, cfg) / 10.0);
}

double offload_bits(double share, double power, double gain, const WorldConfig& cfg) {
  if (share == 0.0 || power == 0.0) return 0.0;
  return cfg.slot_length() / cfg.upload_overhead * share * cfg.bandwidth *
         std::log2(1.0 + power * gain / cfg.noise_power);
}

double local_bits(double frequency, const WorldConfig& cfg) {
  return cfg.flight_time * frequency / (cfg.slots * cfg.cycles_per_bit);
}

double harvested_energy(double gain, const WorldConfig& cfg) {
  return cfg.wpt_efficiency * cfg.slot_length() * gain * cfg.uav_power;
}

double slot_energy(double power, double frequency, double share, const WorldConfig& cfg) {
  return cfg.slot_length() * (cfg.capacitance * frequency * frequency * frequency + share * power);
}

std::vector<double> repair_offload_times(std::span<const double> shares) {
  std::vector<double> out(shares.begin(), shares.end());
  double total = 0.0;
  for (double s : shares) total += s;
  if (total <= 1.0) return out;
  for (double& s : out) s /= total;
  return out;
}

EnforcedAction enforce_energy(const EnvState& state, Action action, const WorldConfig& cfg) {
  const std::size_t m_count = action.power.size();
  if (state.energy.size() != m_count || action.frequency.size() != m_count ||
      action.offload_share.size() != m_count) {
    throw std::invalid_argument("enforce_energy: terminal count mismatch");
  }
  EnforcedAction out{std::move(action), std::vector<bool>(m_count, false)};
  for (std::size_t m = 0; m < m_count; ++m) {
    const double spend =
        slot_energy(out.action.power[m], out.action.frequency[m], out.action.offload_share[m], cfg);
    if (spend > state.energy[m]) {
      out.action.power[m] = 0.0;
      out.action.frequency[m] = 0.0;
      out.penalized[m] = true;
    }
  }
  return out;
}

EnforcedAction prepare_action(const EnvState& state, Action action, const WorldConfig& cfg) {
  action.offload_share = repair_offload_times(action.offload_share);
  return enforce_energy(state, std::move(action), cfg);
}

StepOutcome step(const EnvState& state, const EnforcedAction& enforced,
                 std::span<const Vec2> terminal_moves, const WorldConfig& cfg) {
  if (state.slot > cfg.slots) throw std::logic_error("step: episode is over");
  const std::size_t m_count = state.terminals.size();
  const Action& a = enforced.action;
  if (terminal_moves.size() != m_count || a.power.size() != m_count ||
      enforced.penalized.size() != m_count) {
    throw std::invalid_argument("step: terminal count mismatch");
  }

  StepOutcome out;
  out.bits.resize(m_count);
  out.harvested.resize(m_count);
  out.consumed.resize(m_count);
  out.penalized = enforced.penalized;
  out.next_state.terminals.resize(m_count);
  out.next_state.energy.resize(m_count);

  for (std::size_t m = 0; m < m_count; ++m) {
    const double gain = channel_gain(state.uav, state.terminals[m], cfg);
    out.bits[m] = local_bits(a.frequency[m], cfg) +
                  offload_bits(a.offload_share[m], a.power[m], gain, cfg);
    out.harvested[m] = harvested_energy(gain, cfg);
    out.consumed[m] =
        enforced.penalized[m] ? 0.0 : slot_energy(a.power[m], a.frequency[m], a.offload_share[m], cfg);
    out.next_state.energy[m] = state.energy[m] - out.consumed[m] + out.harvested[m];
    out.next_state.terminals[m] = cfg.field.clamp(state.terminals[m] + terminal_moves[m]);
  }

  const double travel = a.speed * cfg.slot_length();
  out.next_state.uav = cfg.field.clamp(state.uav + heading_vector(a.heading) * travel);
  out.next_state.slot = state.slot + 1;
  return out;
}

bool is_arrived(const EnvState& state, const WorldConfig& cfg) {
  return distance(state.uav, cfg.destination) <= cfg.destination_radius;
}

}  // namespace uavmec
