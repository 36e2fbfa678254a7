#include "cvi/synthetic_bvm.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace cvi {

GaussianMixtureTarget synthetic_bvm_prior() {
  const double locs[] = {0.0, 1.0, -4.0, 4.0, -8.0};
  const double sds[] = {0.15, 0.1, 0.3, 0.3, 0.1};
  std::vector<double> w(5, 0.2);
  std::vector<Vector> m;
  std::vector<Matrix> c;
  for (int k = 0; k < 5; ++k) {
    m.push_back(Vector::Constant(1, locs[k]));
    c.push_back(Matrix::Constant(1, 1, sds[k] * sds[k]));
  }
  return GaussianMixtureTarget(std::move(w), std::move(m), std::move(c), 1);
}

SyntheticBvMModel::SyntheticBvMModel(std::vector<double> data)
    : data_(std::move(data)), prior_(synthetic_bvm_prior()) {
  if (data_.empty()) throw std::invalid_argument("synthetic BvM model needs n >= 1 observations");
  double sum = 0.0;
  for (double x : data_) sum += x;
  mean_ = sum / static_cast<double>(data_.size());
  for (double x : data_) centered_ss_ += (x - mean_) * (x - mean_);
}

double SyntheticBvMModel::log_density(const Vector& theta) const {
  const double n = static_cast<double>(data_.size());
  const double v = kLikelihoodVariance;
  const double dev = theta[0] - mean_;
  return prior_.log_density(theta) - 0.5 * n * std::log(2.0 * std::numbers::pi * v) -
         (centered_ss_ + n * dev * dev) / (2.0 * v);
}

Vector SyntheticBvMModel::grad_log_density(const Vector& theta) const {
  const double n = static_cast<double>(data_.size());
  Vector g = prior_.grad_log_density(theta);
  g[0] -= n * (theta[0] - mean_) / kLikelihoodVariance;
  return g;
}

std::optional<Matrix> SyntheticBvMModel::hessian_log_density(const Vector& theta) const {
  Matrix h = *prior_.hessian_log_density(theta);
  h(0, 0) -= static_cast<double>(data_.size()) / kLikelihoodVariance;
  return h;
}

std::optional<Vector> SyntheticBvMModel::sample_prior(Rng& rng) const {
  return prior_.sample_prior(rng);
}

SyntheticBvMModel make_synthetic_bvm(long n, std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("make_synthetic_bvm: n must be >= 1");
  Rng rng = make_rng(seed, 0xB0B);
  std::normal_distribution<double> draw(SyntheticBvMModel::kDataMean,
                                        std::sqrt(SyntheticBvMModel::kDataVariance));
  std::vector<double> data(static_cast<std::size_t>(n));
  for (double& x : data) x = draw(rng);
  return SyntheticBvMModel(std::move(data));
}

}  // namespace cvi
