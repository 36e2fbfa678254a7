#pragma once

#include "cvi/types.hpp"

namespace cvi {

struct AdamSettings {
  double beta1 = 0.9;
  double beta2 = 0.9999;
  double eps = 1e-8;
};

bool operator==(const AdamSettings& a, const AdamSettings& b);

/// Bias-corrected first/second moment accumulators over a flat parameter vector.
class AdamState {
 public:
  AdamState(Eigen::Index size, AdamSettings settings);

  /// Folds in one gradient and returns gamma * m_hat / (sqrt(v_hat) + eps).
  Vector step(const Vector& gradient, double gamma);

  const Vector& first_moment() const { return m_; }
  const Vector& second_moment() const { return v_; }
  long steps_taken() const { return t_; }

 private:
  AdamSettings settings_;
  Vector m_;
  Vector v_;
  long t_ = 0;
};

}  // namespace cvi
