#pragma once

#include <cstdint>
#include <random>
#include <string>

namespace uavmec {

/// Seedable random stream. Every draw goes through a fresh distribution
/// object, so the engine state alone determines all future draws and can be
/// saved and restored exactly.
class Rng {
 public:
  Rng() : Rng(0, 0) {}
  Rng(std::uint64_t seed, std::uint64_t stream);

  double uniform(double lo, double hi);
  double normal(double mean = 0.0, double stddev = 1.0);
  std::size_t index(std::size_t n);  // uniform in [0, n)

  std::string save_state() const;
  void load_state(const std::string& state);

  bool operator==(const Rng& other) const { return engine_ == other.engine_; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace uavmec
