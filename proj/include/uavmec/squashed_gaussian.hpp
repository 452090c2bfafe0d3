#pragma once

#include "uavmec/mlp.hpp"
#include "uavmec/rng.hpp"

namespace uavmec::nn {

/// Per-dimension action interval [lo, hi], lo < hi.
struct Bounds {
  Vector lo;
  Vector hi;

  static Bounds symmetric(Eigen::Index dim, double half_width = 1.0);
  Eigen::Index size() const { return lo.size(); }
  void validate() const;
};

struct LogStdRange {
  double min = -20.0;
  double max = 2.0;
};

/// Batched tanh-squashed diagonal Gaussian built from a policy head whose
/// output stacks the mean (first A rows) over the raw log-std (last A rows).
/// Each column is one sample: u = mean + exp(log_std) * noise, y = tanh(u),
/// action = mid + half * y. `log_prob` is the exact density of the action,
/// including the tanh and affine change-of-variable terms.
struct SquashedBatch {
  Matrix action;     // A x B
  Vector log_prob;   // B
  Matrix squashed;   // y = tanh(u), A x B
  Matrix std;        // A x B
  Matrix noise;      // A x B
  Matrix log_std_active;  // 1 where the raw log-std is inside the clamp range
  Vector half;       // A
};

SquashedBatch squash(const Matrix& head, const Matrix& noise, const Bounds& bounds, LogStdRange range);

/// Gradient with respect to `head` given d/d(action) and d/d(log_prob),
/// holding the noise fixed (reparameterization).
Matrix squash_backward(const SquashedBatch& batch, const Matrix& grad_action, const Vector& grad_log_prob);

/// Deterministic action: mid + half * tanh(mean), one column per sample.
Matrix squashed_mean(const Matrix& head, const Bounds& bounds);

struct SquashedSample {
  Vector action;
  double log_prob = 0.0;
};

/// Draws one action from N(mean, exp(log_std)^2) squashed into `bounds`. The
/// action always lies strictly inside every interval.
SquashedSample squashed_gaussian_sample(const Vector& mean, const Vector& log_std, const Bounds& bounds,
                                        Rng& rng, LogStdRange range = {});

/// Log-density of `action` under the squashed Gaussian with the given moments.
double squashed_gaussian_log_prob(const Vector& action, const Vector& mean, const Vector& log_std,
                                  const Bounds& bounds, LogStdRange range = {});

Matrix standard_normal(Eigen::Index rows, Eigen::Index cols, Rng& rng);

}  // namespace uavmec::nn
