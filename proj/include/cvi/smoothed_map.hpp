#pragma once

#include "cvi/adam.hpp"
#include "cvi/gaussian_mixture.hpp"
#include "cvi/schedule.hpp"
#include "cvi/trace.hpp"

#include <cstdint>

namespace cvi {

enum class SmapOptimizer { sgd, adam };

struct SmoothedMapConfig {
  double alpha = 1.0;      // smoothing variance
  long iterations = 20000;
  int samples = 100;       // importance samples per gradient
  StepSchedule schedule;
  Vector init;
  std::uint64_t seed = 0;
  SmapOptimizer optimizer = SmapOptimizer::sgd;
  AdamSettings adam;
  // Optional early stop when the trailing-window mean gradient-estimate norm drops
  // below the tolerance.
  bool stop_on_small_gradient = false;
  double gradient_tolerance = 1e-3;
  long gradient_window = 100;
  long record_every = 100;

  void validate() const;
};

struct SmapGradient {
  Vector gradient;
  Vector std_error;  // delta-method standard error of the ratio estimator, per coordinate
  double ess = 0.0;  // (sum w)^2 / sum w^2
};

/// Self-normalized importance-sampling estimate of grad(-log pi_hat)(theta):
///   alpha^{-1/2} sum_s z_s w_s / sum_s w_s,  w_s proportional to pi_n(theta - sqrt(alpha) z_s).
/// `z` holds one standard-normal draw per column. Weights are formed in log space
/// after subtracting the batch maximum, so the normalizer of pi_n never matters.
SmapGradient smap_gradient(const TargetModel& model, const Vector& theta, double alpha,
                           const Matrix& z);

enum class StopReason { iteration_cap, gradient_norm };
const char* to_string(StopReason reason);

struct SmoothedMapResult {
  Vector theta_hat;
  RunTrace trace;
  StopReason stop = StopReason::iteration_cap;
};

SmoothedMapResult smap_run(const TargetModel& model, const SmoothedMapConfig& cfg);

/// Closed-form convolution of a mixture with N(0, alpha I): covariances gain alpha I.
GaussianMixtureTarget smoothed_density_oracle(const GaussianMixtureTarget& target, double alpha);

/// 10 n^{-0.3}, which keeps n alpha^3 = 1000 n^{0.1} growing without bound.
double default_alpha(long n);

}  // namespace cvi
