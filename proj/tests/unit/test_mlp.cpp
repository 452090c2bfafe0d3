#include <cmath>
#include <sstream>
#include <vector>

#include <gtest/gtest.h>

#include "uavmec/mlp.hpp"
#include "uavmec/network_io.hpp"

using namespace uavmec;
using namespace uavmec::nn;

namespace {

// Plain nested-loop forward pass over the flat parameter layout, in long
// double. Shares nothing with the Eigen path.
std::vector<long double> loop_forward(const std::vector<std::size_t>& sizes, const std::vector<double>& flat,
                                      const std::vector<double>& x) {
  std::vector<long double> a(x.begin(), x.end());
  std::size_t off = 0;
  for (std::size_t l = 0; l + 1 < sizes.size(); ++l) {
    const std::size_t in = sizes[l], out = sizes[l + 1];
    std::vector<long double> z(out, 0.0L);
    for (std::size_t o = 0; o < out; ++o) {
      for (std::size_t i = 0; i < in; ++i) z[o] += static_cast<long double>(flat[off + o * in + i]) * a[i];
    }
    off += out * in;
    for (std::size_t o = 0; o < out; ++o) z[o] += flat[off + o];
    off += out;
    if (l + 2 < sizes.size()) {
      for (auto& v : z) v = v > 0 ? v : 0.0L;
    }
    a = std::move(z);
  }
  return a;
}

Matrix random_matrix(Eigen::Index r, Eigen::Index c, Rng& rng) {
  Matrix m(r, c);
  for (Eigen::Index j = 0; j < c; ++j)
    for (Eigen::Index i = 0; i < r; ++i) m(i, j) = rng.uniform(-1, 1);
  return m;
}

double weighted_loss(const Mlp& net, const Matrix& x, const Matrix& w) {
  return (net.forward(x).array() * w.array()).sum();
}

}  // namespace

TEST(Mlp, IdentityLayerPassesInputThrough) {
  Mlp net = Mlp::zeros({3, 3});
  net.mutable_layers()[0].weight = Matrix::Identity(3, 3);
  Vector x(3);
  x << 1.5, -2.0, 0.25;
  EXPECT_EQ(net.forward(x), x);
}

TEST(Mlp, ZeroNetworkOutputsZero) {
  Mlp net = Mlp::zeros({4, 8, 8, 2});
  Rng rng(1, 0);
  const Matrix x = random_matrix(4, 5, rng);
  EXPECT_TRUE(net.forward(x).isZero(0.0));
}

TEST(Mlp, ForwardMatchesLoopOracle) {
  Rng rng(2, 0);
  const std::vector<std::size_t> sizes{11, 400, 400, 400, 3};
  Mlp net(sizes, rng);
  const auto flat = net.flat_parameters();
  for (int trial = 0; trial < 3; ++trial) {
    std::vector<double> x(11);
    for (auto& v : x) v = rng.uniform(-2, 2);
    const Vector got = net.forward(Vector(Eigen::Map<const Vector>(x.data(), 11)));
    const auto want = loop_forward(sizes, flat, x);
    for (std::size_t o = 0; o < 3; ++o) {
      EXPECT_NEAR(got(o), static_cast<double>(want[o]), 1e-12 * std::max(1.0L, std::fabs(want[o])));
    }
  }
}

TEST(Mlp, InitializationWithinFanInBound) {
  Rng rng(3, 0);
  Mlp net({10, 50, 1}, rng);
  for (const auto& layer : net.layers()) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(layer.weight.cols()));
    EXPECT_LE(layer.weight.cwiseAbs().maxCoeff(), bound);
    EXPECT_LE(layer.bias.cwiseAbs().maxCoeff(), bound);
  }
  EXPECT_EQ(net.parameter_count(), 10u * 50 + 50 + 50 + 1);
}

TEST(Mlp, ScalarLinearGradient) {
  Mlp net = Mlp::zeros({1, 1});
  net.mutable_layers()[0].weight(0, 0) = 0.7;
  Matrix x(1, 1);
  x << 3.0;
  ForwardCache cache;
  net.forward(x, &cache);
  Matrix dy(1, 1);
  dy << 2.0;
  Matrix dx;
  const auto g = net.backward(cache, dy, &dx);
  EXPECT_DOUBLE_EQ(g.layers[0].weight(0, 0), 6.0);
  EXPECT_DOUBLE_EQ(g.layers[0].bias(0), 2.0);
  EXPECT_DOUBLE_EQ(dx(0, 0), 1.4);
}

TEST(Mlp, DeadReluBlocksGradient) {
  Mlp net = Mlp::zeros({1, 2, 1});
  auto& L = net.mutable_layers();
  L[0].weight << 1.0, -1.0;
  L[1].weight << 1.0, 1.0;
  Matrix x(1, 1);
  x << 2.0;  // second hidden unit has pre-activation -2
  ForwardCache cache;
  net.forward(x, &cache);
  const auto g = net.backward(cache, Matrix::Ones(1, 1));
  EXPECT_EQ(g.layers[0].weight(1, 0), 0.0);
  EXPECT_EQ(g.layers[0].bias(1), 0.0);
  EXPECT_EQ(g.layers[1].weight(0, 1), 0.0);
  EXPECT_NE(g.layers[0].weight(0, 0), 0.0);
}

TEST(Mlp, BackwardMatchesFiniteDifferences) {
  Rng rng(4, 0);
  for (int trial = 0; trial < 5; ++trial) {
    Mlp net({5, 8, 16, 3}, rng);
    const Matrix x = random_matrix(5, 4, rng);
    const Matrix w = random_matrix(3, 4, rng);
    ForwardCache cache;
    net.forward(x, &cache);
    Matrix dx;
    const auto analytic = flatten(net.backward(cache, w, &dx));
    auto flat = net.flat_parameters();
    const double h = 1e-6;
    for (std::size_t i = 0; i < flat.size(); ++i) {
      Mlp probe = net;
      auto p = flat;
      p[i] += h;
      probe.set_flat_parameters(p);
      const double up = weighted_loss(probe, x, w);
      p[i] -= 2 * h;
      probe.set_flat_parameters(p);
      const double down = weighted_loss(probe, x, w);
      const double fd = (up - down) / (2 * h);
      ASSERT_LE(std::fabs(fd - analytic[i]), 1e-4 * std::max(1.0, std::fabs(analytic[i]))) << "param " << i;
    }
    for (Eigen::Index r = 0; r < x.rows(); ++r) {
      for (Eigen::Index c = 0; c < x.cols(); ++c) {
        Matrix xp = x, xm = x;
        xp(r, c) += h;
        xm(r, c) -= h;
        const double fd = (weighted_loss(net, xp, w) - weighted_loss(net, xm, w)) / (2 * h);
        ASSERT_LE(std::fabs(fd - dx(r, c)), 1e-4 * std::max(1.0, std::fabs(dx(r, c))));
      }
    }
  }
}

TEST(Mlp, StaleCacheIsRejected) {
  Rng rng(5, 0);
  Mlp net({2, 4, 1}, rng);
  ForwardCache cache;
  net.forward(Matrix(Matrix::Ones(2, 1)), &cache);
  AdamState opt = AdamState::for_network(net, {});
  adam_step(net, zero_gradients(net), opt);
  EXPECT_THROW(net.backward(cache, Matrix::Ones(1, 1)), std::logic_error);
}

TEST(Mlp, ShapeMismatchThrows) {
  Rng rng(5, 0);
  Mlp net({2, 4, 1}, rng);
  EXPECT_THROW(net.forward(Matrix(Matrix::Ones(3, 1))), std::invalid_argument);
}

TEST(Adam, FirstStepClosedForm) {
  Rng rng(6, 0);
  Mlp net({3, 4, 2}, rng);
  const auto before = net.flat_parameters();
  Gradients g = zero_gradients(net);
  for (auto& l : g.layers) {
    for (Eigen::Index i = 0; i < l.weight.size(); ++i) l.weight.data()[i] = rng.uniform(-3, 3);
    for (Eigen::Index i = 0; i < l.bias.size(); ++i) l.bias(i) = rng.uniform(-3, 3);
  }
  AdamConfig cfg;
  cfg.learning_rate = 1e-3;
  AdamState opt = AdamState::for_network(net, cfg);
  adam_step(net, g, opt);
  const auto after = net.flat_parameters();
  const auto gf = flatten(g);
  for (std::size_t i = 0; i < gf.size(); ++i) {
    const double want = before[i] - cfg.learning_rate * gf[i] / (std::fabs(gf[i]) + cfg.epsilon);
    EXPECT_NEAR(after[i], want, 1e-15);
  }
  EXPECT_EQ(opt.step, 1u);
}

TEST(Adam, ZeroGradientAndZeroRateFreeze) {
  Rng rng(7, 0);
  Mlp net({3, 4, 2}, rng);
  const Mlp original = net;
  AdamState opt = AdamState::for_network(net, {});
  adam_step(net, zero_gradients(net), opt);
  EXPECT_EQ(net.flat_parameters(), original.flat_parameters());

  AdamConfig frozen;
  frozen.learning_rate = 0.0;
  AdamState opt0 = AdamState::for_network(net, frozen);
  Gradients g = zero_gradients(net);
  for (auto& l : g.layers) l.weight.setConstant(5.0), l.bias.setConstant(-2.0);
  for (int i = 0; i < 10; ++i) adam_step(net, g, opt0);
  EXPECT_EQ(net.flat_parameters(), original.flat_parameters());
}

TEST(Serialization, RoundTripReproducesUpdates) {
  Rng rng(8, 0);
  Mlp net({4, 16, 16, 2}, rng);
  AdamState opt = AdamState::for_network(net, {});
  Gradients g = zero_gradients(net);
  for (auto& l : g.layers) l.weight.setConstant(0.3), l.bias.setConstant(-0.1);
  for (int i = 0; i < 3; ++i) adam_step(net, g, opt);

  std::stringstream buf;
  write_network(buf, net, &opt);
  auto loaded = read_network(buf);
  ASSERT_TRUE(loaded.optimizer.has_value());
  EXPECT_EQ(loaded.net, net);
  EXPECT_EQ(*loaded.optimizer, opt);
  for (int i = 0; i < 5; ++i) {
    adam_step(net, g, opt);
    adam_step(loaded.net, g, *loaded.optimizer);
  }
  EXPECT_EQ(loaded.net.flat_parameters(), net.flat_parameters());
}

TEST(Serialization, RejectsCorruptStreams) {
  Rng rng(9, 0);
  Mlp net({2, 3, 1}, rng);
  std::stringstream buf;
  write_network(buf, net, nullptr);
  const std::string bytes = buf.str();

  std::stringstream truncated(bytes.substr(0, bytes.size() - 5));
  EXPECT_THROW(read_network(truncated), std::runtime_error);
  std::string bad = bytes;
  bad[0] = 'X';
  std::stringstream magic(bad);
  EXPECT_THROW(read_network(magic), std::runtime_error);
  std::stringstream ok(bytes);
  EXPECT_FALSE(read_network(ok).optimizer.has_value());
}
