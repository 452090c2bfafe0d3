#include "uavmec/squashed_gaussian.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace uavmec::nn {

namespace {

constexpr double kHalfLogTwoPi = 0.91893853320467274178;  // 0.5 * log(2 pi)

double softplus(double x) { return x > 0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x)); }

// log(1 - tanh(u)^2), stable for large |u|.
double log_one_minus_tanh_sq(double u) {
  return 2.0 * (std::numbers::ln2 - u - softplus(-2.0 * u));
}

double strictly_inside(double a, double lo, double hi) {
  if (a >= hi) return std::nextafter(hi, lo);
  if (a <= lo) return std::nextafter(lo, hi);
  return a;
}

}  // namespace

Bounds Bounds::symmetric(Eigen::Index dim, double half_width) {
  return {Vector::Constant(dim, -half_width), Vector::Constant(dim, half_width)};
}

void Bounds::validate() const {
  if (lo.size() != hi.size()) throw std::invalid_argument("Bounds: lo/hi size mismatch");
  for (Eigen::Index k = 0; k < lo.size(); ++k) {
    if (!(lo(k) < hi(k))) throw std::invalid_argument("Bounds: require lo < hi in every dimension");
  }
}

SquashedBatch squash(const Matrix& head, const Matrix& noise, const Bounds& bounds, LogStdRange range) {
  const Eigen::Index dim = bounds.size();
  if (head.rows() != 2 * dim || noise.rows() != dim || noise.cols() != head.cols()) {
    throw std::invalid_argument("squash: head/noise/bounds shape mismatch");
  }
  const Eigen::Index batch = head.cols();
  SquashedBatch out;
  out.half = (bounds.hi - bounds.lo) / 2.0;
  const Vector mid = (bounds.hi + bounds.lo) / 2.0;
  out.action.resize(dim, batch);
  out.squashed.resize(dim, batch);
  out.std.resize(dim, batch);
  out.log_std_active.resize(dim, batch);
  out.log_prob = Vector::Zero(batch);
  out.noise = noise;

  double log_half_sum = 0.0;
  for (Eigen::Index k = 0; k < dim; ++k) log_half_sum += std::log(out.half(k));

  for (Eigen::Index b = 0; b < batch; ++b) {
    double lp = -log_half_sum;
    for (Eigen::Index k = 0; k < dim; ++k) {
      const double raw = head(dim + k, b);
      const double log_std = std::clamp(raw, range.min, range.max);
      out.log_std_active(k, b) = (raw > range.min && raw < range.max) ? 1.0 : 0.0;
      const double sd = std::exp(log_std);
      const double eps = noise(k, b);
      const double u = head(k, b) + sd * eps;
      const double y = std::tanh(u);
      out.std(k, b) = sd;
      out.squashed(k, b) = y;
      out.action(k, b) = strictly_inside(mid(k) + out.half(k) * y, bounds.lo(k), bounds.hi(k));
      lp += -0.5 * eps * eps - log_std - kHalfLogTwoPi - log_one_minus_tanh_sq(u);
    }
    out.log_prob(b) = lp;
  }
  return out;
}

Matrix squash_backward(const SquashedBatch& batch, const Matrix& grad_action, const Vector& grad_log_prob) {
  const Eigen::Index dim = batch.action.rows();
  const Eigen::Index n = batch.action.cols();
  Matrix grad(2 * dim, n);
  for (Eigen::Index b = 0; b < n; ++b) {
    for (Eigen::Index k = 0; k < dim; ++k) {
      const double y = batch.squashed(k, b);
      const double sech_sq = 1.0 - y * y;
      const double sd_eps = batch.std(k, b) * batch.noise(k, b);
      const double da_du = batch.half(k) * sech_sq;
      // d log_prob / du = 2 tanh(u)
      const double du = grad_action(k, b) * da_du + grad_log_prob(b) * 2.0 * y;
      grad(k, b) = du;
      grad(dim + k, b) = batch.log_std_active(k, b) * (du * sd_eps - grad_log_prob(b));
    }
  }
  return grad;
}

Matrix squashed_mean(const Matrix& head, const Bounds& bounds) {
  const Eigen::Index dim = bounds.size();
  if (head.rows() != 2 * dim) throw std::invalid_argument("squashed_mean: head shape mismatch");
  Matrix out(dim, head.cols());
  for (Eigen::Index b = 0; b < head.cols(); ++b) {
    for (Eigen::Index k = 0; k < dim; ++k) {
      const double mid = (bounds.hi(k) + bounds.lo(k)) / 2.0;
      const double half = (bounds.hi(k) - bounds.lo(k)) / 2.0;
      out(k, b) = strictly_inside(mid + half * std::tanh(head(k, b)), bounds.lo(k), bounds.hi(k));
    }
  }
  return out;
}

Matrix standard_normal(Eigen::Index rows, Eigen::Index cols, Rng& rng) {
  Matrix m(rows, cols);
  // Column-major fill keeps the draw order identical to per-sample loops.
  for (Eigen::Index c = 0; c < cols; ++c) {
    for (Eigen::Index r = 0; r < rows; ++r) m(r, c) = rng.normal();
  }
  return m;
}

SquashedSample squashed_gaussian_sample(const Vector& mean, const Vector& log_std, const Bounds& bounds,
                                        Rng& rng, LogStdRange range) {
  bounds.validate();
  if (mean.size() != bounds.size() || log_std.size() != bounds.size()) {
    throw std::invalid_argument("squashed_gaussian_sample: dimension mismatch");
  }
  Matrix head(2 * bounds.size(), 1);
  head << mean, log_std;
  const SquashedBatch s = squash(head, standard_normal(bounds.size(), 1, rng), bounds, range);
  return {s.action.col(0), s.log_prob(0)};
}

double squashed_gaussian_log_prob(const Vector& action, const Vector& mean, const Vector& log_std,
                                  const Bounds& bounds, LogStdRange range) {
  bounds.validate();
  double lp = 0.0;
  for (Eigen::Index k = 0; k < bounds.size(); ++k) {
    const double mid = (bounds.hi(k) + bounds.lo(k)) / 2.0;
    const double half = (bounds.hi(k) - bounds.lo(k)) / 2.0;
    const double y = (action(k) - mid) / half;
    if (!(y > -1.0 && y < 1.0)) return -std::numeric_limits<double>::infinity();
    const double u = std::atanh(y);
    const double ls = std::clamp(log_std(k), range.min, range.max);
    const double eps = (u - mean(k)) / std::exp(ls);
    lp += -0.5 * eps * eps - ls - kHalfLogTwoPi - log_one_minus_tanh_sq(u) - std::log(half);
  }
  return lp;
}

}  // namespace uavmec::nn
