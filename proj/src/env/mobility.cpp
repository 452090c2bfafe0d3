#include "uavmec/mobility.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace uavmec {

void GmrmParams::validate() const {
  if (speed_memory < 0 || speed_memory > 1 || direction_memory < 0 || direction_memory > 1) {
    throw std::invalid_argument("mobility memory factors must lie in [0, 1]");
  }
  if (speed_noise_std < 0 || direction_noise_std < 0) {
    throw std::invalid_argument("mobility noise spreads must be >= 0");
  }
}

MobilityState initial_motion(const MobilityParams& params) {
  MobilityState s;
  s.reserve(params.size());
  for (const auto& p : params) s.push_back({p.mean_speed, p.mean_direction});
  return s;
}

MobilityStep gmrm_step(const MobilityState& state, const MobilityParams& params,
                       std::span<Rng> streams, double slot_length) {
  if (state.size() != params.size() || streams.size() != params.size()) {
    throw std::invalid_argument("gmrm_step: per-terminal sizes differ");
  }
  MobilityStep out;
  out.state.resize(state.size());
  out.displacements.resize(state.size());
  for (std::size_t m = 0; m < state.size(); ++m) {
    const GmrmParams& p = params[m];
    const double phi = streams[m].normal(p.speed_noise_mean, p.speed_noise_std);
    const double psi = streams[m].normal(p.direction_noise_mean, p.direction_noise_std);
    const double k1 = p.speed_memory;
    const double k2 = p.direction_memory;
    double speed = k1 * state[m].speed + (1.0 - k1) * p.mean_speed + std::sqrt(1.0 - k1 * k1) * phi;
    const double direction =
        k2 * state[m].direction + (1.0 - k2) * p.mean_direction + std::sqrt(1.0 - k2 * k2) * psi;
    speed = std::max(speed, 0.0);
    out.state[m] = {speed, direction};
    const double wrapped = std::fmod(direction, 2.0 * std::numbers::pi);
    out.displacements[m] = heading_vector(wrapped) * (speed * slot_length);
  }
  return out;
}

namespace {

// Folds a coordinate back into [lo, hi] by mirroring at the edges. Returns
// true when the number of bounces is odd, i.e. travel along the axis reversed.
bool fold(double& v, double lo, double hi) {
  const double span = hi - lo;
  double t = std::fmod(v - lo, 2.0 * span);
  if (t < 0) t += 2.0 * span;
  const bool reversed = t > span;
  v = lo + (reversed ? 2.0 * span - t : t);
  return reversed;
}

}  // namespace

std::vector<Vec2> reflect_in_field(std::span<const Vec2> positions, std::span<const Vec2> displacements,
                                   const Rect& field, MobilityState& state) {
  if (positions.size() != displacements.size() || positions.size() != state.size()) {
    throw std::invalid_argument("reflect_in_field: per-terminal sizes differ");
  }
  std::vector<Vec2> out(positions.size());
  for (std::size_t m = 0; m < positions.size(); ++m) {
    Vec2 target = positions[m] + displacements[m];
    if ((target.x < field.lo.x || target.x > field.hi.x) && fold(target.x, field.lo.x, field.hi.x)) {
      state[m].direction = std::numbers::pi - state[m].direction;
    }
    if ((target.y < field.lo.y || target.y > field.hi.y) && fold(target.y, field.lo.y, field.hi.y)) {
      state[m].direction = -state[m].direction;
    }
    out[m] = field.clamp(target) - positions[m];
  }
  return out;
}

}  // namespace uavmec
