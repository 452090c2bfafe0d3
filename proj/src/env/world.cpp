#include "uavmec/world.hpp"

#include <stdexcept>
#include <string>

namespace uavmec {

namespace {

void require(bool ok, const char* what) {
  if (!ok) throw std::invalid_argument(std::string("invalid configuration: ") + what);
}

}  // namespace

void ChannelParams::validate() const {
  require(carrier_frequency > 0, "channel.carrier_frequency must be > 0");
  require(light_speed > 0, "channel.light_speed must be > 0");
  require(h > 0, "channel.h must be > 0");
  require(l > 0, "channel.l must be > 0");
  require(eta_los >= 0, "channel.eta_los must be >= 0");
  require(eta_nlos >= eta_los, "channel.eta_nlos must be >= eta_los");
}

void WorldConfig::validate() const {
  require(flight_time > 0, "flight_time must be > 0");
  require(slots >= 1, "slots must be >= 1");
  require(terminals >= 1, "terminals must be >= 1");
  require(altitude > 0, "altitude must be > 0");
  require(bandwidth > 0, "bandwidth must be > 0");
  require(noise_power > 0, "noise_power must be > 0");
  require(wpt_efficiency > 0 && wpt_efficiency <= 1, "wpt_efficiency must be in (0, 1]");
  require(capacitance >= 0, "capacitance must be >= 0");
  require(cycles_per_bit > 0, "cycles_per_bit must be > 0");
  require(upload_overhead >= 1, "upload_overhead must be >= 1");
  require(uav_power >= 0, "uav_power must be >= 0");
  require(max_speed >= 0, "max_speed must be >= 0");
  require(field.hi.x > field.lo.x && field.hi.y > field.lo.y, "field must have positive area");
  require(field.contains(start), "start must lie inside the field");
  require(field.contains(destination), "destination must lie inside the field");
  require(destination_radius > 0, "destination_radius must be > 0");
  require(static_cast<int>(initial_energy.size()) == terminals,
          "initial_energy must have one entry per terminal");
  for (double e : initial_energy) require(e >= 0, "initial_energy entries must be >= 0");
  require(max_power > 0, "max_power must be > 0");
  require(max_frequency > 0, "max_frequency must be > 0");
  require(reference_energy > 0, "reference_energy must be > 0");
  channel.validate();
}

Action Action::zeros(int terminals) {
  Action a;
  a.power.assign(terminals, 0.0);
  a.frequency.assign(terminals, 0.0);
  a.offload_share.assign(terminals, 0.0);
  return a;
}

EnvState initial_state(const WorldConfig& cfg, std::vector<Vec2> terminal_positions) {
  if (static_cast<int>(terminal_positions.size()) != cfg.terminals) {
    throw std::invalid_argument("initial_state: one position per terminal required");
  }
  EnvState s;
  s.uav = cfg.start;
  s.terminals = std::move(terminal_positions);
  s.energy = cfg.initial_energy;
  s.slot = 1;
  return s;
}

}  // namespace uavmec
