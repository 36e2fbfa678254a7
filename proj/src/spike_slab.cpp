#include "cvi/spike_slab.hpp"

#include "cvi/dataset.hpp"
#include "cvi/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace cvi {

SpikeSlabRegressionModel::SpikeSlabRegressionModel(Matrix features, Vector response, double sigma,
                                                   double tau_spike, double tau_slab)
    : features_(std::move(features)),
      response_(std::move(response)),
      sigma_(sigma),
      tau_spike_(tau_spike),
      tau_slab_(tau_slab) {
  if (features_.rows() != response_.size())
    throw std::invalid_argument("feature rows and response length differ");
  if (features_.rows() < 1 || features_.cols() < 1)
    throw std::invalid_argument("regression needs at least one row and one feature");
  if (!(sigma_ > 0.0 && tau_spike_ > 0.0 && tau_slab_ > 0.0))
    throw std::invalid_argument("sigma, tau1 and tau2 must be positive");
  gram_ = features_.transpose() * features_ / (sigma_ * sigma_);
}

void SpikeSlabRegressionModel::prior_terms(double b, double& value, double& first,
                                           double& second) const {
  const double taus[2] = {tau_spike_, tau_slab_};
  double logs[2];
  double scores[2];
  for (int k = 0; k < 2; ++k) {
    const double t2 = taus[k] * taus[k];
    logs[k] = std::log(0.5) - 0.5 * std::log(2.0 * std::numbers::pi * t2) - b * b / (2.0 * t2);
    scores[k] = -b / t2;
  }
  const double top = std::max(logs[0], logs[1]);
  const double e0 = std::exp(logs[0] - top);
  const double e1 = std::exp(logs[1] - top);
  const double r0 = e0 / (e0 + e1);
  const double r1 = 1.0 - r0;
  value = top + std::log(e0 + e1);
  first = r0 * scores[0] + r1 * scores[1];
  second = r0 * (scores[0] * scores[0] - 1.0 / (taus[0] * taus[0])) +
           r1 * (scores[1] * scores[1] - 1.0 / (taus[1] * taus[1])) - first * first;
}

double SpikeSlabRegressionModel::log_density(const Vector& beta) const {
  const double s2 = sigma_ * sigma_;
  const double rows = static_cast<double>(features_.rows());
  const Vector resid = response_ - features_ * beta;
  double lp = -0.5 * rows * std::log(2.0 * std::numbers::pi * s2) - resid.squaredNorm() / (2.0 * s2);
  for (Eigen::Index j = 0; j < beta.size(); ++j) {
    double v, d1, d2;
    prior_terms(beta[j], v, d1, d2);
    lp += v;
  }
  return lp;
}

Vector SpikeSlabRegressionModel::grad_log_density(const Vector& beta) const {
  const Vector resid = response_ - features_ * beta;
  Vector g = features_.transpose() * resid / (sigma_ * sigma_);
  for (Eigen::Index j = 0; j < beta.size(); ++j) {
    double v, d1, d2;
    prior_terms(beta[j], v, d1, d2);
    g[j] += d1;
  }
  return g;
}

std::optional<Matrix> SpikeSlabRegressionModel::hessian_log_density(const Vector& beta) const {
  Matrix h = -gram_;
  for (Eigen::Index j = 0; j < beta.size(); ++j) {
    double v, d1, d2;
    prior_terms(beta[j], v, d1, d2);
    h(j, j) += d2;
  }
  return h;
}

std::optional<Vector> SpikeSlabRegressionModel::sample_prior(Rng& rng) const {
  std::bernoulli_distribution slab(0.5);
  std::normal_distribution<double> normal;
  Vector beta(dim());
  for (Eigen::Index j = 0; j < beta.size(); ++j)
    beta[j] = (slab(rng) ? tau_slab_ : tau_spike_) * normal(rng);
  return beta;
}

SpikeSlabRegressionModel make_sparse_regression_synthetic(std::uint64_t seed) {
  constexpr int rows = 10;
  constexpr int d = 5;
  Rng rng = make_rng(seed, 0x5B);
  Matrix x = standard_normal_matrix(rng, rows, d);
  std::normal_distribution<double> noise(0.0, 0.5);
  Vector y(rows);
  for (int i = 0; i < rows; ++i) y[i] = x(i, 0) + noise(rng);
  return SpikeSlabRegressionModel(std::move(x), std::move(y), 5.0, 0.1, 10.0);
}

SpikeSlabRegressionModel sparse_regression_from_dataset(const Dataset& data,
                                                        const std::string& response,
                                                        const std::vector<std::string>& exclude,
                                                        double sigma, double tau_spike,
                                                        double tau_slab, long subsample,
                                                        std::uint64_t seed) {
  const int target = data.column(response);
  std::vector<int> feature_cols;
  for (int c = 0; c < static_cast<int>(data.columns.size()); ++c) {
    if (c == target) continue;
    if (std::find(exclude.begin(), exclude.end(), data.columns[c]) != exclude.end()) continue;
    feature_cols.push_back(c);
  }
  if (feature_cols.empty()) throw ConfigError("regression dataset has no feature columns");
  const std::vector<long> rows = subsample_rows(data.values.rows(), subsample, seed);
  Matrix x(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(feature_cols.size()));
  Vector y(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    y[i] = data.values(rows[i], target);
    for (std::size_t j = 0; j < feature_cols.size(); ++j) x(i, j) = data.values(rows[i], feature_cols[j]);
  }
  return SpikeSlabRegressionModel(std::move(x), std::move(y), sigma, tau_spike, tau_slab);
}

}  // namespace cvi
