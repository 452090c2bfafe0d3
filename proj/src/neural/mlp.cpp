#include "uavmec/mlp.hpp"

#include <atomic>
#include <cmath>
#include <stdexcept>

namespace uavmec::nn {

namespace {

std::uint64_t next_generation() {
  static std::atomic<std::uint64_t> counter{1};
  return counter.fetch_add(1, std::memory_order_relaxed);
}

void check_sizes(const std::vector<std::size_t>& sizes) {
  if (sizes.size() < 2) throw std::invalid_argument("Mlp: need at least input and output sizes");
  for (auto s : sizes) {
    if (s == 0) throw std::invalid_argument("Mlp: layer sizes must be positive");
  }
}

bool same(const DenseLayer& a, const DenseLayer& b) {
  return a.weight.rows() == b.weight.rows() && a.weight.cols() == b.weight.cols() &&
         a.weight == b.weight && a.bias == b.bias;
}

}  // namespace

Gradients& Gradients::operator+=(const Gradients& other) {
  for (std::size_t i = 0; i < layers.size(); ++i) {
    layers[i].weight += other.layers[i].weight;
    layers[i].bias += other.layers[i].bias;
  }
  return *this;
}

Gradients& Gradients::operator*=(double s) {
  for (auto& l : layers) {
    l.weight *= s;
    l.bias *= s;
  }
  return *this;
}

Mlp::Mlp(std::vector<std::size_t> sizes, Rng& rng) : sizes_(std::move(sizes)) {
  check_sizes(sizes_);
  for (std::size_t i = 0; i + 1 < sizes_.size(); ++i) {
    const auto in = static_cast<Eigen::Index>(sizes_[i]);
    const auto out = static_cast<Eigen::Index>(sizes_[i + 1]);
    const double bound = 1.0 / std::sqrt(static_cast<double>(in));
    DenseLayer layer{Matrix(out, in), Vector(out)};
    for (Eigen::Index r = 0; r < out; ++r) {
      for (Eigen::Index c = 0; c < in; ++c) layer.weight(r, c) = rng.uniform(-bound, bound);
    }
    for (Eigen::Index r = 0; r < out; ++r) layer.bias(r) = rng.uniform(-bound, bound);
    layers_.push_back(std::move(layer));
  }
  touch();
}

Mlp Mlp::zeros(std::vector<std::size_t> sizes) {
  check_sizes(sizes);
  Mlp net;
  net.sizes_ = std::move(sizes);
  for (std::size_t i = 0; i + 1 < net.sizes_.size(); ++i) {
    const auto in = static_cast<Eigen::Index>(net.sizes_[i]);
    const auto out = static_cast<Eigen::Index>(net.sizes_[i + 1]);
    net.layers_.push_back({Matrix::Zero(out, in), Vector::Zero(out)});
  }
  net.touch();
  return net;
}

std::size_t Mlp::parameter_count() const {
  std::size_t n = 0;
  for (const auto& l : layers_) n += static_cast<std::size_t>(l.weight.size() + l.bias.size());
  return n;
}

Matrix Mlp::forward(const Matrix& input, ForwardCache* cache) const {
  if (static_cast<std::size_t>(input.rows()) != input_size()) {
    throw std::invalid_argument("Mlp::forward: input has " + std::to_string(input.rows()) +
                                " rows, expected " + std::to_string(input_size()));
  }
  if (cache) {
    cache->generation = generation_;
    cache->inputs.clear();
    cache->pre.clear();
  }
  Matrix x = input;
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    Matrix z = layers_[i].weight * x;
    z.colwise() += layers_[i].bias;
    if (cache) {
      cache->inputs.push_back(std::move(x));
      cache->pre.push_back(z);
    }
    if (i + 1 < layers_.size()) {
      x = z.cwiseMax(0.0);
    } else {
      x = std::move(z);
    }
  }
  return x;
}

Vector Mlp::forward(const Vector& input) const {
  Matrix out = forward(Matrix(input), nullptr);
  return out.col(0);
}

Gradients Mlp::backward(const ForwardCache& cache, const Matrix& output_grad, Matrix* input_grad,
                        bool want_params) const {
  if (cache.generation != generation_ || cache.pre.size() != layers_.size()) {
    throw std::logic_error("Mlp::backward: cache does not match the current parameters");
  }
  if (static_cast<std::size_t>(output_grad.rows()) != output_size() ||
      output_grad.cols() != cache.pre.back().cols()) {
    throw std::invalid_argument("Mlp::backward: output gradient shape mismatch");
  }
  Gradients grads;
  if (want_params) grads.layers.resize(layers_.size());
  Matrix delta = output_grad;
  for (std::size_t k = layers_.size(); k-- > 0;) {
    if (k + 1 < layers_.size()) {
      // ReLU derivative; zero at and below the kink.
      delta = delta.cwiseProduct((cache.pre[k].array() > 0.0).cast<double>().matrix());
    }
    if (want_params) {
      grads.layers[k].weight = delta * cache.inputs[k].transpose();
      grads.layers[k].bias = delta.rowwise().sum();
    }
    if (k > 0 || input_grad) {
      delta = layers_[k].weight.transpose() * delta;
    }
  }
  if (input_grad) *input_grad = std::move(delta);
  return grads;
}

std::vector<double> Mlp::flat_parameters() const {
  std::vector<double> flat;
  flat.reserve(parameter_count());
  for (const auto& l : layers_) {
    for (Eigen::Index r = 0; r < l.weight.rows(); ++r) {
      for (Eigen::Index c = 0; c < l.weight.cols(); ++c) flat.push_back(l.weight(r, c));
    }
    for (Eigen::Index r = 0; r < l.bias.size(); ++r) flat.push_back(l.bias(r));
  }
  return flat;
}

void Mlp::set_flat_parameters(const std::vector<double>& flat) {
  if (flat.size() != parameter_count()) {
    throw std::invalid_argument("Mlp::set_flat_parameters: wrong parameter count");
  }
  std::size_t i = 0;
  for (auto& l : layers_) {
    for (Eigen::Index r = 0; r < l.weight.rows(); ++r) {
      for (Eigen::Index c = 0; c < l.weight.cols(); ++c) l.weight(r, c) = flat[i++];
    }
    for (Eigen::Index r = 0; r < l.bias.size(); ++r) l.bias(r) = flat[i++];
  }
  touch();
}

std::vector<DenseLayer>& Mlp::mutable_layers() {
  touch();
  return layers_;
}

bool Mlp::operator==(const Mlp& other) const {
  if (sizes_ != other.sizes_) return false;
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    if (!same(layers_[i], other.layers_[i])) return false;
  }
  return true;
}

void Mlp::touch() { generation_ = next_generation(); }

Gradients zero_gradients(const Mlp& net) {
  Gradients g;
  for (const auto& l : net.layers()) {
    g.layers.push_back({Matrix::Zero(l.weight.rows(), l.weight.cols()), Vector::Zero(l.bias.size())});
  }
  return g;
}

std::vector<double> flatten(const Gradients& grads) {
  std::vector<double> flat;
  for (const auto& l : grads.layers) {
    for (Eigen::Index r = 0; r < l.weight.rows(); ++r) {
      for (Eigen::Index c = 0; c < l.weight.cols(); ++c) flat.push_back(l.weight(r, c));
    }
    for (Eigen::Index r = 0; r < l.bias.size(); ++r) flat.push_back(l.bias(r));
  }
  return flat;
}

AdamState AdamState::for_network(const Mlp& net, AdamConfig config) {
  AdamState s;
  s.config = config;
  for (const auto& l : net.layers()) {
    s.first_moment.push_back({Matrix::Zero(l.weight.rows(), l.weight.cols()), Vector::Zero(l.bias.size())});
  }
  s.second_moment = s.first_moment;
  return s;
}

bool AdamState::operator==(const AdamState& other) const {
  if (step != other.step || config.learning_rate != other.config.learning_rate ||
      config.beta1 != other.config.beta1 || config.beta2 != other.config.beta2 ||
      config.epsilon != other.config.epsilon || first_moment.size() != other.first_moment.size()) {
    return false;
  }
  for (std::size_t i = 0; i < first_moment.size(); ++i) {
    if (!same(first_moment[i], other.first_moment[i]) || !same(second_moment[i], other.second_moment[i])) {
      return false;
    }
  }
  return true;
}

void adam_step(Mlp& net, const Gradients& grads, AdamState& state) {
  auto& layers = net.mutable_layers();
  if (grads.layers.size() != layers.size() || state.first_moment.size() != layers.size()) {
    throw std::invalid_argument("adam_step: shape mismatch");
  }
  const AdamConfig& c = state.config;
  state.step += 1;
  const double t = static_cast<double>(state.step);
  const double correction1 = 1.0 - std::pow(c.beta1, t);
  const double correction2 = 1.0 - std::pow(c.beta2, t);

  auto update = [&](auto& param, const auto& grad, auto& m, auto& v) {
    if (param.rows() != grad.rows() || param.cols() != grad.cols()) {
      throw std::invalid_argument("adam_step: gradient shape mismatch");
    }
    m = c.beta1 * m + (1.0 - c.beta1) * grad;
    v = c.beta2 * v + (1.0 - c.beta2) * grad.cwiseProduct(grad);
    param.array() -= c.learning_rate * (m.array() / correction1) /
                     ((v.array() / correction2).sqrt() + c.epsilon);
  };
  for (std::size_t i = 0; i < layers.size(); ++i) {
    update(layers[i].weight, grads.layers[i].weight, state.first_moment[i].weight,
           state.second_moment[i].weight);
    update(layers[i].bias, grads.layers[i].bias, state.first_moment[i].bias,
           state.second_moment[i].bias);
  }
}

}  // namespace uavmec::nn
