#include "cvi/bayesian_gmm.hpp"

#include "cvi/dataset.hpp"
#include "cvi/errors.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace cvi {

namespace {

double log_sum_exp(const Vector& v) {
  const double top = v.maxCoeff();
  return top + std::log((v.array() - top).exp().sum());
}

}  // namespace

Vector gmm_transform(const GmmParameters& params) {
  const auto k = params.weights.size();
  const auto d = params.means.cols();
  if (k < 1 || params.means.rows() != k || params.scales.rows() != k || params.scales.cols() != d)
    throw std::invalid_argument("gmm_transform: inconsistent parameter shapes");
  if ((params.weights.array() <= 0.0).any())
    throw std::invalid_argument("gmm_transform: weights must lie in the open simplex");
  if (std::abs(params.weights.sum() - 1.0) > 1e-10)
    throw std::invalid_argument("gmm_transform: weights must sum to 1");
  if ((params.scales.array() <= 0.0).any())
    throw std::invalid_argument("gmm_transform: scales must be positive");

  Vector out(k + 2 * k * d);
  out.head(k) = params.weights.array().log();
  for (Eigen::Index c = 0; c < k; ++c)
    for (Eigen::Index j = 0; j < d; ++j) {
      out[k + c * d + j] = params.means(c, j);
      out[k + k * d + c * d + j] = std::log(params.scales(c, j));
    }
  return out;
}

GmmParameters gmm_inverse_transform(const Vector& unconstrained, int components, int dims) {
  const Eigen::Index k = components;
  const Eigen::Index d = dims;
  if (k < 1 || d < 1 || unconstrained.size() != k + 2 * k * d)
    throw std::invalid_argument("gmm_inverse_transform: vector has the wrong length");
  GmmParameters p;
  const Vector lambda = unconstrained.head(k);
  p.weights = (lambda.array() - log_sum_exp(lambda)).exp();
  p.means.resize(k, d);
  p.scales.resize(k, d);
  for (Eigen::Index c = 0; c < k; ++c)
    for (Eigen::Index j = 0; j < d; ++j) {
      p.means(c, j) = unconstrained[k + c * d + j];
      p.scales(c, j) = std::exp(unconstrained[k + k * d + c * d + j]);
    }
  return p;
}

BayesianGmmModel::BayesianGmmModel(Matrix data, int components, double alpha0)
    : data_(std::move(data)), components_(components), alpha0_(alpha0) {
  if (data_.rows() < 1 || data_.cols() < 1) throw std::invalid_argument("GMM needs data");
  if (components_ < 1) throw std::invalid_argument("GMM needs K >= 1");
  if (!(alpha0_ > 0.0)) throw std::invalid_argument("Dirichlet concentration must be positive");
}

int BayesianGmmModel::dim() const {
  return components_ + 2 * components_ * static_cast<int>(data_.cols());
}

double BayesianGmmModel::evaluate(const Vector& theta, Vector* grad) const {
  const Eigen::Index k = components_;
  const Eigen::Index d = data_.cols();
  const Eigen::Index rows = data_.rows();
  const double log2pi = std::log(2.0 * std::numbers::pi);

  const Vector lambda = theta.head(k);
  const Vector log_w = lambda.array() - log_sum_exp(lambda);
  Matrix mu(k, d), tau(k, d);
  for (Eigen::Index c = 0; c < k; ++c)
    for (Eigen::Index j = 0; j < d; ++j) {
      mu(c, j) = theta[k + c * d + j];
      tau(c, j) = theta[k + k * d + c * d + j];
    }
  const Matrix inv_var = (-2.0 * tau.array()).exp();

  double lp = 0.0;
  for (Eigen::Index c = 0; c < k; ++c)
    lp += alpha0_ * lambda[c] - std::exp(lambda[c]) - std::lgamma(alpha0_);
  lp += -0.5 * mu.squaredNorm() - 0.5 * static_cast<double>(k * d) * log2pi;
  lp += -0.5 * tau.squaredNorm() - 0.5 * static_cast<double>(k * d) * log2pi;

  Vector resp_sum;
  Matrix g_mu, g_tau;
  if (grad) {
    resp_sum = Vector::Zero(k);
    g_mu = Matrix::Zero(k, d);
    g_tau = Matrix::Zero(k, d);
  }
  Vector terms(k);
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index c = 0; c < k; ++c) {
      double t = log_w[c];
      for (Eigen::Index j = 0; j < d; ++j) {
        const double diff = data_(i, j) - mu(c, j);
        t += -0.5 * log2pi - tau(c, j) - 0.5 * diff * diff * inv_var(c, j);
      }
      terms[c] = t;
    }
    const double lse = log_sum_exp(terms);
    lp += lse;
    if (grad) {
      for (Eigen::Index c = 0; c < k; ++c) {
        const double r = std::exp(terms[c] - lse);
        resp_sum[c] += r;
        for (Eigen::Index j = 0; j < d; ++j) {
          const double diff = data_(i, j) - mu(c, j);
          g_mu(c, j) += r * diff * inv_var(c, j);
          g_tau(c, j) += r * (diff * diff * inv_var(c, j) - 1.0);
        }
      }
    }
  }

  if (grad) {
    grad->resize(theta.size());
    const Vector w = log_w.array().exp();
    for (Eigen::Index c = 0; c < k; ++c) {
      (*grad)[c] = alpha0_ - std::exp(lambda[c]) + resp_sum[c] - static_cast<double>(rows) * w[c];
      for (Eigen::Index j = 0; j < d; ++j) {
        (*grad)[k + c * d + j] = -mu(c, j) + g_mu(c, j);
        (*grad)[k + k * d + c * d + j] = -tau(c, j) + g_tau(c, j);
      }
    }
  }
  return lp;
}

double BayesianGmmModel::log_density(const Vector& theta) const { return evaluate(theta, nullptr); }

Vector BayesianGmmModel::grad_log_density(const Vector& theta) const {
  Vector g;
  evaluate(theta, &g);
  return g;
}

std::optional<Vector> BayesianGmmModel::sample_prior(Rng& rng) const {
  const Eigen::Index k = components_;
  std::gamma_distribution<double> gamma(alpha0_, 1.0);
  std::normal_distribution<double> normal;
  Vector theta(dim());
  for (Eigen::Index c = 0; c < k; ++c) {
    // Guard against a zero gamma draw for tiny alpha0.
    theta[c] = std::log(std::max(gamma(rng), 1e-300));
  }
  for (Eigen::Index i = k; i < theta.size(); ++i) theta[i] = normal(rng);
  return theta;
}

BayesianGmmModel make_gmm_synthetic(std::uint64_t seed, int components, double alpha0) {
  constexpr int clusters = 4;
  constexpr int per_cluster = 100;
  Rng rng = make_rng(seed, 0x6A);
  std::uniform_real_distribution<double> centre(-10.0, 10.0);
  std::normal_distribution<double> noise(0.0, 0.6);
  Matrix data(clusters * per_cluster, 2);
  for (int c = 0; c < clusters; ++c) {
    const double cx = centre(rng);
    const double cy = centre(rng);
    for (int i = 0; i < per_cluster; ++i) {
      data(c * per_cluster + i, 0) = cx + noise(rng);
      data(c * per_cluster + i, 1) = cy + noise(rng);
    }
  }
  return BayesianGmmModel(std::move(data), components, alpha0);
}

BayesianGmmModel gmm_from_dataset(const Dataset& data, int components, double alpha0,
                                  long subsample, std::uint64_t seed) {
  const std::vector<long> rows = subsample_rows(data.values.rows(), subsample, seed);
  Matrix x(static_cast<Eigen::Index>(rows.size()), data.values.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) x.row(i) = data.values.row(rows[i]);
  return BayesianGmmModel(std::move(x), components, alpha0);
}

}  // namespace cvi
