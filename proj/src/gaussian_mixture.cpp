#include "cvi/gaussian_mixture.hpp"

#include "cvi/errors.hpp"

#include <cmath>
#include <numbers>
#include <numeric>
#include <stdexcept>

namespace cvi {

GaussianMixtureTarget::GaussianMixtureTarget(std::vector<double> weights, std::vector<Vector> means,
                                             std::vector<Matrix> covariances, long n)
    : n_(n),
      weights_(std::move(weights)),
      means_(std::move(means)),
      covariances_(std::move(covariances)) {
  if (weights_.empty()) throw std::invalid_argument("mixture needs at least one component");
  if (means_.size() != weights_.size() || covariances_.size() != weights_.size())
    throw std::invalid_argument("mixture weights, means and covariances differ in length");
  if (n_ < 1) throw std::invalid_argument("sample size must be >= 1");
  const double total = std::accumulate(weights_.begin(), weights_.end(), 0.0);
  if (std::abs(total - 1.0) > 1e-12)
    throw std::invalid_argument("mixture weights must sum to 1");
  dim_ = static_cast<int>(means_.front().size());
  if (dim_ < 1) throw std::invalid_argument("mixture dimension must be positive");

  for (std::size_t k = 0; k < weights_.size(); ++k) {
    const Matrix& c = covariances_[k];
    if (weights_[k] <= 0.0) throw std::invalid_argument("mixture weights must be positive");
    if (means_[k].size() != dim_ || c.rows() != dim_ || c.cols() != dim_)
      throw std::invalid_argument("mixture component has the wrong dimension");
    if ((c - c.transpose()).cwiseAbs().maxCoeff() > 1e-12 * std::max(1.0, c.cwiseAbs().maxCoeff()))
      throw std::invalid_argument("mixture covariance is not symmetric");
    Eigen::LLT<Matrix> llt(c);
    if (llt.info() != Eigen::Success)
      throw std::invalid_argument("mixture covariance is not positive definite");
    Matrix lower = llt.matrixL();
    const double log_det = 2.0 * lower.diagonal().array().log().sum();
    precisions_.push_back(llt.solve(Matrix::Identity(dim_, dim_)));
    chol_lower_.push_back(std::move(lower));
    log_consts_.push_back(std::log(weights_[k]) -
                          0.5 * dim_ * std::log(2.0 * std::numbers::pi) - 0.5 * log_det);
  }
}

void GaussianMixtureTarget::component_terms(const Vector& theta, Vector& log_terms,
                                            Matrix* scores) const {
  const auto k_count = static_cast<Eigen::Index>(weights_.size());
  log_terms.resize(k_count);
  if (scores) scores->resize(dim_, k_count);
  for (Eigen::Index k = 0; k < k_count; ++k) {
    const Vector diff = theta - means_[k];
    const Vector white = chol_lower_[k].triangularView<Eigen::Lower>().solve(diff);
    log_terms[k] = log_consts_[k] - 0.5 * white.squaredNorm();
    if (scores) scores->col(k) = -(precisions_[k] * diff);
  }
}

LogDensityAndGradient GaussianMixtureTarget::log_density_and_grad(const Vector& theta) const {
  Vector log_terms;
  Matrix scores;
  component_terms(theta, log_terms, &scores);
  const double top = log_terms.maxCoeff();
  const Vector resp = (log_terms.array() - top).exp().matrix();
  const double total = resp.sum();
  return {top + std::log(total), scores * (resp / total)};
}

double GaussianMixtureTarget::log_density(const Vector& theta) const {
  Vector log_terms;
  component_terms(theta, log_terms, nullptr);
  const double top = log_terms.maxCoeff();
  return top + std::log((log_terms.array() - top).exp().sum());
}

Vector GaussianMixtureTarget::grad_log_density(const Vector& theta) const {
  return log_density_and_grad(theta).gradient;
}

std::optional<Matrix> GaussianMixtureTarget::hessian_log_density(const Vector& theta) const {
  Vector log_terms;
  Matrix scores;
  component_terms(theta, log_terms, &scores);
  const double top = log_terms.maxCoeff();
  Vector resp = (log_terms.array() - top).exp().matrix();
  resp /= resp.sum();
  const Vector g = scores * resp;
  Matrix h = Matrix::Zero(dim_, dim_);
  for (Eigen::Index k = 0; k < resp.size(); ++k)
    h += resp[k] * (scores.col(k) * scores.col(k).transpose() - precisions_[k]);
  h -= g * g.transpose();
  return h;
}

std::optional<Vector> GaussianMixtureTarget::sample_prior(Rng& rng) const {
  std::discrete_distribution<std::size_t> pick(weights_.begin(), weights_.end());
  const std::size_t k = pick(rng);
  return Vector(means_[k] + chol_lower_[k] * standard_normal_vector(rng, dim_));
}

GaussianMixtureTarget trimodal_mixture() {
  auto scalar = [](double v) { return Vector::Constant(1, v); };
  auto var = [](double v) { return Matrix::Constant(1, 1, v); };
  return GaussianMixtureTarget({0.7, 0.15, 0.15}, {scalar(0.0), scalar(-30.0), scalar(30.0)},
                               {var(4.0), var(9.0), var(9.0)}, 1);
}

GaussianMixtureTarget gaussian_target(const Vector& mean, const Matrix& covariance, long n) {
  return GaussianMixtureTarget({1.0}, {mean}, {covariance}, n);
}

GaussianMixtureTarget standard_normal_target(int d) {
  return gaussian_target(Vector::Zero(d), Matrix::Identity(d, d), 1);
}

}  // namespace cvi
