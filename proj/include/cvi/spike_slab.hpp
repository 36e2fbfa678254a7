#pragma once

#include "cvi/model.hpp"

#include <cstdint>

namespace cvi {

struct Dataset;

/// Linear regression y ~ N(X beta, sigma^2) with an independent spike-and-slab
/// prior beta_j ~ 0.5 N(0, tau1^2) + 0.5 N(0, tau2^2) on every coefficient.
class SpikeSlabRegressionModel final : public TargetModel {
 public:
  SpikeSlabRegressionModel(Matrix features, Vector response, double sigma, double tau_spike,
                           double tau_slab);

  std::string name() const override { return "spike-slab-regression"; }
  int dim() const override { return static_cast<int>(features_.cols()); }
  long sample_size() const override { return static_cast<long>(features_.rows()); }

  double log_density(const Vector& beta) const override;
  Vector grad_log_density(const Vector& beta) const override;
  std::optional<Matrix> hessian_log_density(const Vector& beta) const override;
  std::optional<Vector> sample_prior(Rng& rng) const override;

  const Matrix& features() const { return features_; }
  const Vector& response() const { return response_; }
  double sigma() const { return sigma_; }
  double tau_spike() const { return tau_spike_; }
  double tau_slab() const { return tau_slab_; }

 private:
  // log p(b), d/db, d2/db2 of the scalar two-component prior.
  void prior_terms(double b, double& value, double& first, double& second) const;

  Matrix features_;
  Vector response_;
  double sigma_;
  double tau_spike_;
  double tau_slab_;
  Matrix gram_;  // X^T X / sigma^2
};

/// N=10 rows of x ~ N(0, I_5), y = x_1 + eps with eps ~ N(0, 0.25);
/// sigma = 5, tau1 = 0.1, tau2 = 10.
SpikeSlabRegressionModel make_sparse_regression_synthetic(std::uint64_t seed);

/// Builds the model from a CSV: `response` names the target column, every other
/// column not listed in `exclude` is a feature. A positive `subsample` keeps that
/// many rows chosen without replacement using `seed`.
SpikeSlabRegressionModel sparse_regression_from_dataset(const Dataset& data,
                                                        const std::string& response,
                                                        const std::vector<std::string>& exclude,
                                                        double sigma, double tau_spike,
                                                        double tau_slab, long subsample,
                                                        std::uint64_t seed);

}  // namespace cvi
