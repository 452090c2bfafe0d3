#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "uavmec/squashed_gaussian.hpp"

using namespace uavmec;
using namespace uavmec::nn;

namespace {

Vector v1(double x) { return Vector::Constant(1, x); }

}  // namespace

TEST(SquashedGaussian, DensityIntegratesToOne) {
  Rng rng(1, 0);
  for (int trial = 0; trial < 10; ++trial) {
    const double mean = rng.uniform(-1.5, 1.5);
    const double log_std = rng.uniform(-1.5, 0.5);
    const double lo = rng.uniform(-3, 0), hi = lo + rng.uniform(0.5, 4);
    const Bounds b{v1(lo), v1(hi)};
    const int n = 400000;
    const double dx = (hi - lo) / n;
    double mass = 0;
    for (int i = 0; i < n; ++i) {
      const double a = lo + (i + 0.5) * dx;
      mass += std::exp(squashed_gaussian_log_prob(v1(a), v1(mean), v1(log_std), b)) * dx;
    }
    EXPECT_NEAR(mass, 1.0, 1e-3) << "mean " << mean << " log_std " << log_std;
  }
}

TEST(SquashedGaussian, SampleLogProbMatchesDensity) {
  Rng rng(2, 0);
  const Bounds b{Vector::Constant(3, -1.0), Vector::Constant(3, 4.0)};
  Vector mean(3), log_std(3);
  mean << 0.2, -0.4, 0.9;
  log_std << -0.5, 0.1, -1.0;
  for (int i = 0; i < 50; ++i) {
    const auto s = squashed_gaussian_sample(mean, log_std, b, rng);
    EXPECT_NEAR(s.log_prob, squashed_gaussian_log_prob(s.action, mean, log_std, b), 1e-8);
  }
}

TEST(SquashedGaussian, FloorStdIsDeterministic) {
  const Bounds b{v1(0.0), v1(10.0)};
  Rng rng(3, 0);
  for (int i = 0; i < 20; ++i) {
    const auto s = squashed_gaussian_sample(v1(0.3), v1(-100.0), b, rng);
    EXPECT_NEAR(s.action(0), 5.0 + 5.0 * std::tanh(0.3), 1e-7);
  }
  EXPECT_NEAR(squashed_mean(Vector::Constant(2, 0.3), b)(0, 0), 5.0 + 5.0 * std::tanh(0.3), 1e-15);
}

TEST(SquashedGaussian, ClampedLogStdIgnoresExcess) {
  const Bounds b = Bounds::symmetric(1);
  Rng r1(4, 0), r2(4, 0);
  const auto a = squashed_gaussian_sample(v1(0.1), v1(-20.0), b, r1);
  const auto c = squashed_gaussian_sample(v1(0.1), v1(-60.0), b, r2);
  EXPECT_EQ(a.action(0), c.action(0));
  EXPECT_EQ(a.log_prob, c.log_prob);
}

TEST(SquashedGaussian, SymmetricAboutMidpoint) {
  const Bounds b{v1(2.0), v1(6.0)};
  for (double a : {2.5, 3.3, 3.99}) {
    EXPECT_NEAR(squashed_gaussian_log_prob(v1(a), v1(0.0), v1(0.2), b),
                squashed_gaussian_log_prob(v1(8.0 - a), v1(0.0), v1(0.2), b), 1e-12);
  }
  Rng rng(5, 0);
  const int n = 100000;
  double sum = 0, sum_sq = 0;
  for (int i = 0; i < n; ++i) {
    const double a = squashed_gaussian_sample(v1(0.0), v1(0.2), b, rng).action(0);
    sum += a;
    sum_sq += a * a;
  }
  const double mean = sum / n;
  const double var = sum_sq / n - mean * mean;
  EXPECT_LE(std::fabs(mean - 4.0), 3.0 * std::sqrt(var / n));
}

TEST(SquashedGaussian, SamplesStayStrictlyInside) {
  const Bounds b{Vector::Constant(2, 0.0), Vector::Constant(2, 1.0)};
  Rng rng(6, 0);
  Vector mean(2), log_std(2);
  mean << 40.0, -40.0;
  log_std << 2.0, 2.0;
  for (int i = 0; i < 1000; ++i) {
    const auto s = squashed_gaussian_sample(mean, log_std, b, rng);
    ASSERT_GT(s.action(0), 0.0);
    ASSERT_LT(s.action(0), 1.0);
    ASSERT_GT(s.action(1), 0.0);
    ASSERT_LT(s.action(1), 1.0);
    ASSERT_TRUE(std::isfinite(s.log_prob));
  }
}

TEST(SquashedGaussian, BackwardMatchesFiniteDifferences) {
  Rng rng(7, 0);
  const Bounds b{Vector::Constant(2, -1.0), Vector::Constant(2, 3.0)};
  Matrix head(4, 3);
  for (Eigen::Index i = 0; i < head.size(); ++i) head.data()[i] = rng.uniform(-1, 1);
  const Matrix noise = standard_normal(2, 3, rng);
  Matrix ga(2, 3);
  for (Eigen::Index i = 0; i < ga.size(); ++i) ga.data()[i] = rng.uniform(-1, 1);
  Vector gl(3);
  gl << 0.7, -0.3, 1.1;
  auto loss = [&](const Matrix& h) {
    const auto s = squash(h, noise, b, {});
    return (s.action.array() * ga.array()).sum() + s.log_prob.dot(gl);
  };
  const Matrix grad = squash_backward(squash(head, noise, b, {}), ga, gl);
  const double eps = 1e-6;
  for (Eigen::Index i = 0; i < head.size(); ++i) {
    Matrix up = head, down = head;
    up.data()[i] += eps;
    down.data()[i] -= eps;
    const double fd = (loss(up) - loss(down)) / (2 * eps);
    EXPECT_LE(std::fabs(fd - grad.data()[i]), 1e-4 * std::max(1.0, std::fabs(fd)));
  }
}

TEST(SquashedGaussian, RejectsInvertedBounds) {
  const Bounds b{v1(1.0), v1(1.0)};
  EXPECT_THROW(b.validate(), std::invalid_argument);
}
