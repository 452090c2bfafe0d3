#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "uavmec/rng.hpp"

namespace uavmec::nn {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

struct DenseLayer {
  Matrix weight;  // out x in
  Vector bias;    // out
};

/// Activations recorded by Mlp::forward. Batches are stored column-wise.
struct ForwardCache {
  std::uint64_t generation = 0;
  std::vector<Matrix> inputs;  // input of each layer (post-ReLU for hidden ones)
  std::vector<Matrix> pre;     // pre-activation of each layer
};

/// Per-layer parameter gradients, shaped like the network.
struct Gradients {
  std::vector<DenseLayer> layers;

  Gradients& operator+=(const Gradients& other);
  Gradients& operator*=(double s);
};

/// Fully connected network: ReLU on hidden layers, identity output layer.
/// Parameters are double precision and mutated only through the methods
/// below, each of which invalidates outstanding forward caches.
class Mlp {
 public:
  Mlp() = default;
  /// Uniform fan-in initialization: U(-1/sqrt(fan_in), 1/sqrt(fan_in)).
  Mlp(std::vector<std::size_t> sizes, Rng& rng);

  static Mlp zeros(std::vector<std::size_t> sizes);

  const std::vector<std::size_t>& sizes() const { return sizes_; }
  std::size_t input_size() const { return sizes_.front(); }
  std::size_t output_size() const { return sizes_.back(); }
  const std::vector<DenseLayer>& layers() const { return layers_; }
  std::size_t parameter_count() const;

  /// `input` is (input_size x batch). Fills `cache` when given.
  Matrix forward(const Matrix& input, ForwardCache* cache = nullptr) const;
  Vector forward(const Vector& input) const;

  /// Reverse-mode pass for d(loss)/d(output) = `output_grad`. Writes the
  /// input gradient when `input_grad` is non-null; skips parameter gradients
  /// when `want_params` is false. Throws std::logic_error on a stale cache.
  Gradients backward(const ForwardCache& cache, const Matrix& output_grad,
                     Matrix* input_grad = nullptr, bool want_params = true) const;

  /// Flattened view in layer order (W row-major, then b), used by tests and
  /// checkpoint code.
  std::vector<double> flat_parameters() const;
  void set_flat_parameters(const std::vector<double>& flat);

  std::vector<DenseLayer>& mutable_layers();

  bool operator==(const Mlp& other) const;

 private:
  void touch();

  std::vector<std::size_t> sizes_;
  std::vector<DenseLayer> layers_;
  std::uint64_t generation_ = 0;
};

Gradients zero_gradients(const Mlp& net);

std::vector<double> flatten(const Gradients& grads);

struct AdamConfig {
  double learning_rate = 1e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

struct AdamState {
  AdamConfig config;
  std::uint64_t step = 0;
  std::vector<DenseLayer> first_moment;
  std::vector<DenseLayer> second_moment;

  static AdamState for_network(const Mlp& net, AdamConfig config);
  bool operator==(const AdamState& other) const;
};

/// Bias-corrected adaptive-moment step on `net` along `grads`.
void adam_step(Mlp& net, const Gradients& grads, AdamState& state);

}  // namespace uavmec::nn
