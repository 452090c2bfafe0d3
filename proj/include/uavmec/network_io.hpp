#pragma once

#include <iosfwd>
#include <optional>
#include <string>

#include "uavmec/mlp.hpp"

namespace uavmec::nn {

/// Portable network checkpoint. Layout, all integers and floats little-endian:
///
///   "UAVMECNN"                      8-byte magic
///   u32 version (1)
///   u32 L                           number of entries in the size table
///   u64 sizes[L]
///   per layer: f64 W[out*in] (row-major), f64 b[out]
///   u8  has_optimizer
///   if has_optimizer:
///     u64 step; f64 lr, beta1, beta2, epsilon
///     first moments, then second moments, in the parameter order above
void write_network(std::ostream& out, const Mlp& net, const AdamState* optimizer);

struct LoadedNetwork {
  Mlp net;
  std::optional<AdamState> optimizer;
};

/// Throws std::runtime_error on bad magic, version, truncation or shapes.
LoadedNetwork read_network(std::istream& in);

void save_network(const std::string& path, const Mlp& net, const AdamState* optimizer);
LoadedNetwork load_network(const std::string& path);

}  // namespace uavmec::nn
