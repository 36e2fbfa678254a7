#pragma once

#include "cvi/model.hpp"

#include <Eigen/Cholesky>

#include <vector>

namespace cvi {

struct LogDensityAndGradient {
  double value;
  Vector gradient;
};

/// Normalized finite mixture of multivariate Gaussians. Doubles as the analytic
/// oracle family: Gaussian targets are single-component mixtures.
class GaussianMixtureTarget final : public TargetModel {
 public:
  GaussianMixtureTarget(std::vector<double> weights, std::vector<Vector> means,
                        std::vector<Matrix> covariances, long n = 1);

  std::string name() const override { return "gaussian-mixture"; }
  int dim() const override { return dim_; }
  long sample_size() const override { return n_; }

  double log_density(const Vector& theta) const override;
  Vector grad_log_density(const Vector& theta) const override;
  std::optional<Matrix> hessian_log_density(const Vector& theta) const override;
  std::optional<Vector> sample_prior(Rng& rng) const override;

  /// Log-sum-exp evaluation; the gradient is the responsibility-weighted sum of
  /// component scores.
  LogDensityAndGradient log_density_and_grad(const Vector& theta) const;

  const std::vector<double>& weights() const { return weights_; }
  const std::vector<Vector>& means() const { return means_; }
  const std::vector<Matrix>& covariances() const { return covariances_; }
  std::size_t components() const { return weights_.size(); }

 private:
  // Per-component log(w_k N(theta; m_k, C_k)) and score -C_k^{-1}(theta - m_k).
  void component_terms(const Vector& theta, Vector& log_terms, Matrix* scores) const;

  int dim_;
  long n_;
  std::vector<double> weights_;
  std::vector<Vector> means_;
  std::vector<Matrix> covariances_;
  std::vector<Matrix> precisions_;
  std::vector<Matrix> chol_lower_;
  std::vector<double> log_consts_;  // log w_k - d/2 log 2pi - 1/2 log det C_k
};

/// 0.7 N(0, 4) + 0.15 N(-30, 9) + 0.15 N(30, 9), with n = 1.
GaussianMixtureTarget trimodal_mixture();

/// N(mean, covariance) as a one-component mixture with nominal sample size n.
GaussianMixtureTarget gaussian_target(const Vector& mean, const Matrix& covariance, long n = 1);

GaussianMixtureTarget standard_normal_target(int d = 1);

}  // namespace cvi
