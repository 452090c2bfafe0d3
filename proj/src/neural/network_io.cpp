#include "uavmec/network_io.hpp"

#include "uavmec/detail/binary_io.hpp"

#include <array>
#include <fstream>
#include <istream>
#include <ostream>
#include <stdexcept>

namespace uavmec::nn {

namespace {

constexpr std::array<char, 8> kMagic{'U', 'A', 'V', 'M', 'E', 'C', 'N', 'N'};
constexpr std::uint32_t kVersion = 1;

using detail::get_f64;
using detail::get_le;
using detail::put_f64;
using detail::put_le;

void put_layers(std::ostream& out, const std::vector<DenseLayer>& layers) {
  for (const auto& l : layers) {
    for (Eigen::Index r = 0; r < l.weight.rows(); ++r) {
      for (Eigen::Index c = 0; c < l.weight.cols(); ++c) put_f64(out, l.weight(r, c));
    }
    for (Eigen::Index r = 0; r < l.bias.size(); ++r) put_f64(out, l.bias(r));
  }
}

void get_layers(std::istream& in, std::vector<DenseLayer>& layers) {
  for (auto& l : layers) {
    for (Eigen::Index r = 0; r < l.weight.rows(); ++r) {
      for (Eigen::Index c = 0; c < l.weight.cols(); ++c) l.weight(r, c) = get_f64(in);
    }
    for (Eigen::Index r = 0; r < l.bias.size(); ++r) l.bias(r) = get_f64(in);
  }
}

}  // namespace

void write_network(std::ostream& out, const Mlp& net, const AdamState* optimizer) {
  out.write(kMagic.data(), kMagic.size());
  put_le<std::uint32_t>(out, kVersion);
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(net.sizes().size()));
  for (auto s : net.sizes()) put_le<std::uint64_t>(out, s);
  put_layers(out, net.layers());
  put_le<std::uint8_t>(out, optimizer ? 1 : 0);
  if (optimizer) {
    put_le<std::uint64_t>(out, optimizer->step);
    put_f64(out, optimizer->config.learning_rate);
    put_f64(out, optimizer->config.beta1);
    put_f64(out, optimizer->config.beta2);
    put_f64(out, optimizer->config.epsilon);
    put_layers(out, optimizer->first_moment);
    put_layers(out, optimizer->second_moment);
  }
  if (!out) throw std::runtime_error("network checkpoint: write failed");
}

LoadedNetwork read_network(std::istream& in) {
  std::array<char, 8> magic{};
  in.read(magic.data(), magic.size());
  if (!in || magic != kMagic) throw std::runtime_error("network checkpoint: bad magic");
  if (detail::get_le<std::uint32_t>(in) != kVersion) throw std::runtime_error("network checkpoint: unsupported version");
  const auto count = get_le<std::uint32_t>(in);
  if (count < 2 || count > 1024) throw std::runtime_error("network checkpoint: bad size table");
  std::vector<std::size_t> sizes(count);
  for (auto& s : sizes) {
    s = get_le<std::uint64_t>(in);
    if (s == 0 || s > (1u << 24)) throw std::runtime_error("network checkpoint: bad layer size");
  }
  LoadedNetwork loaded{Mlp::zeros(sizes), std::nullopt};
  get_layers(in, loaded.net.mutable_layers());
  if (get_le<std::uint8_t>(in) != 0) {
    AdamState s = AdamState::for_network(loaded.net, {});
    s.step = get_le<std::uint64_t>(in);
    s.config.learning_rate = get_f64(in);
    s.config.beta1 = get_f64(in);
    s.config.beta2 = get_f64(in);
    s.config.epsilon = get_f64(in);
    get_layers(in, s.first_moment);
    get_layers(in, s.second_moment);
    loaded.optimizer = std::move(s);
  }
  return loaded;
}

void save_network(const std::string& path, const Mlp& net, const AdamState* optimizer) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  write_network(out, net, optimizer);
}

LoadedNetwork load_network(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  return read_network(in);
}

}  // namespace uavmec::nn
