#pragma once

#include "cvi/model.hpp"

#include <cstdint>

namespace cvi {

struct Dataset;

/// Constrained GMM parameters: weights on the simplex interior, K x D means and
/// K x D per-coordinate standard deviations.
struct GmmParameters {
  Vector weights;
  Matrix means;
  Matrix scales;
};

/// Unconstrained layout: (lambda_{1:K}, mu_{1:K,1:D} row-major, tau_{1:K,1:D} row-major).
/// lambda_k = log w_k (normalized so logsumexp(lambda) = 0), tau = log sigma.
/// Rejects weights outside the open simplex and non-positive scales.
Vector gmm_transform(const GmmParameters& params);
GmmParameters gmm_inverse_transform(const Vector& unconstrained, int components, int dims);

/// Bayesian Gaussian mixture with a Dirichlet(alpha0) prior on the weights,
/// N(0, I) on the means and LogNormal(0, 1) on the standard deviations, expressed in
/// the unconstrained coordinates above. The weights are represented by marginalized
/// LogGamma(alpha0, 1) variables, so lambda has density exp(alpha0 l - e^l)/Gamma(alpha0)
/// and tau has density N(0, 1); no further Jacobian is needed.
class BayesianGmmModel final : public TargetModel {
 public:
  BayesianGmmModel(Matrix data, int components, double alpha0);

  std::string name() const override { return "bayesian-gmm"; }
  int dim() const override;
  long sample_size() const override { return static_cast<long>(data_.rows()); }

  double log_density(const Vector& theta) const override;
  Vector grad_log_density(const Vector& theta) const override;
  std::optional<Vector> sample_prior(Rng& rng) const override;

  int components() const { return components_; }
  int data_dim() const { return static_cast<int>(data_.cols()); }
  double alpha0() const { return alpha0_; }
  const Matrix& data() const { return data_; }

 private:
  double evaluate(const Vector& theta, Vector* grad) const;

  Matrix data_;
  int components_;
  double alpha0_;
};

/// N = 400 points drawn equally from 4 isotropic bivariate Gaussians with
/// covariance 0.6^2 I and means uniform in [-10, 10]^2; fitted with K = 3, alpha0 = 1.
BayesianGmmModel make_gmm_synthetic(std::uint64_t seed, int components = 3, double alpha0 = 1.0);

BayesianGmmModel gmm_from_dataset(const Dataset& data, int components, double alpha0,
                                  long subsample, std::uint64_t seed);

}  // namespace cvi
