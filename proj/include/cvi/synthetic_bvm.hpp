#pragma once

#include "cvi/gaussian_mixture.hpp"

#include <cstdint>
#include <vector>

namespace cvi {

/// One-dimensional model with a five-component Gaussian-mixture prior and a
/// N(theta, 5000) likelihood. Its posterior is asymptotically normal yet stays
/// multimodal for large n, which is what makes it a good smoothing testbed.
class SyntheticBvMModel final : public TargetModel {
 public:
  static constexpr double kLikelihoodVariance = 5000.0;
  static constexpr double kDataMean = 3.0;
  static constexpr double kDataVariance = 10.0;

  explicit SyntheticBvMModel(std::vector<double> data);

  std::string name() const override { return "synthetic-bvm"; }
  int dim() const override { return 1; }
  long sample_size() const override { return static_cast<long>(data_.size()); }

  double log_density(const Vector& theta) const override;
  Vector grad_log_density(const Vector& theta) const override;
  std::optional<Matrix> hessian_log_density(const Vector& theta) const override;
  std::optional<Vector> sample_prior(Rng& rng) const override;

  const std::vector<double>& data() const { return data_; }
  const GaussianMixtureTarget& prior() const { return prior_; }
  double data_mean() const { return mean_; }

 private:
  std::vector<double> data_;
  GaussianMixtureTarget prior_;
  double mean_ = 0.0;
  double centered_ss_ = 0.0;  // sum (x_i - mean)^2
};

/// The five-component prior (0,.15^2),(1,.1^2),(-4,.3^2),(4,.3^2),(-8,.1^2), equal weights.
GaussianMixtureTarget synthetic_bvm_prior();

/// Draws n observations i.i.d. N(3, 10) with the given seed. n must be >= 1.
SyntheticBvMModel make_synthetic_bvm(long n, std::uint64_t seed);

}  // namespace cvi
