#include "cvi/gauss_family.hpp"

#include "cvi/errors.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace cvi {

Matrix GaussianApprox::covariance() const { return L * L.transpose() / n; }

bool GaussianApprox::diagonal_positive() const { return (L.diagonal().array() > 0.0).all(); }

void GaussianApprox::validate() const {
  const auto d = mu.size();
  if (d < 1) throw std::invalid_argument("Gaussian approximation needs d >= 1");
  if (L.rows() != d || L.cols() != d) throw std::invalid_argument("L must be d x d");
  if (!(n >= 1.0)) throw std::invalid_argument("scale anchor n must be >= 1");
  if (!mu.allFinite() || !L.allFinite()) throw std::invalid_argument("non-finite mu or L");
  for (Eigen::Index j = 1; j < d; ++j)
    for (Eigen::Index i = 0; i < j; ++i)
      if (L(i, j) != 0.0) throw std::invalid_argument("L must be lower triangular");
  if ((L.diagonal().array() < 0.0).any())
    throw std::invalid_argument("L must have a nonnegative diagonal");
}

Vector GaussianApprox::flatten() const {
  const auto d = mu.size();
  Vector flat(d + d * d);
  flat.head(d) = mu;
  flat.tail(d * d) = L.reshaped();
  return flat;
}

GaussianApprox GaussianApprox::unflatten(const Vector& flat, int d, double n) {
  if (flat.size() != d + static_cast<Eigen::Index>(d) * d)
    throw std::invalid_argument("flattened approximation has the wrong length");
  GaussianApprox q;
  q.mu = flat.head(d);
  q.L = flat.tail(static_cast<Eigen::Index>(d) * d).reshaped(d, d);
  q.n = n;
  return q;
}

GaussianApprox GaussianApprox::identity(const Vector& mu, double n) {
  return GaussianApprox{mu, Matrix::Identity(mu.size(), mu.size()), n};
}

Vector sample(const GaussianApprox& q, const Vector& z) {
  return q.mu + (q.L.triangularView<Eigen::Lower>() * z) / std::sqrt(q.n);
}

namespace {

// Data term of both estimators, with the -1/(n L_ii) entropy term added only where
// L_ii > 0.
GradientPair gradients_with_entropy(const TargetModel& model, const GaussianApprox& q,
                                    const Vector& z) {
  const Vector x = sample(q, z);
  Vector g = objective_gradient(model, x);
  GradientPair out;
  out.g_L = (g * z.transpose() / std::sqrt(q.n)).triangularView<Eigen::Lower>();
  for (Eigen::Index i = 0; i < q.mu.size(); ++i)
    if (q.L(i, i) > 0.0) out.g_L(i, i) -= 1.0 / (q.n * q.L(i, i));
  out.g_mu = std::move(g);
  return out;
}

}  // namespace

GradientPair stochastic_gradients(const TargetModel& model, const GaussianApprox& q,
                                  const Vector& z) {
  if (!q.diagonal_positive())
    throw std::invalid_argument(
        "raw L-gradient is undefined at a zero diagonal; use scaled_stochastic_gradients");
  return gradients_with_entropy(model, q, z);
}

GradientPair scale_gradient(GradientPair g, const GaussianApprox& q) {
  for (Eigen::Index i = 0; i < q.mu.size(); ++i) {
    const double lii = q.L(i, i);
    if (lii > 0.0)
      g.g_L(i, i) *= 1.0 / (1.0 + 1.0 / (q.n * lii));
    else
      g.g_L(i, i) = -1.0;
  }
  return g;
}

GradientPair scaled_stochastic_gradients(const TargetModel& model, const GaussianApprox& q,
                                         const Vector& z) {
  return scale_gradient(gradients_with_entropy(model, q, z), q);
}

GaussianApprox project(GaussianApprox q) {
  for (Eigen::Index i = 0; i < q.mu.size(); ++i) q.L(i, i) = std::max(0.0, q.L(i, i));
  return q;
}

ElboEstimate elbo_estimate(const TargetModel& model, const GaussianApprox& q, int samples,
                           std::uint64_t seed) {
  if (samples < 2) throw std::invalid_argument("ELBO estimate needs at least 2 samples");
  if (!q.diagonal_positive())
    throw std::invalid_argument("ELBO is undefined for a degenerate Gaussian (zero diagonal)");
  const int d = q.dim();
  const double log_norm = -0.5 * d * std::log(2.0 * std::numbers::pi) -
                          q.L.diagonal().array().log().sum() + 0.5 * d * std::log(q.n);
  Rng rng = make_rng(seed, 0xE1B0);
  double mean = 0.0;
  double m2 = 0.0;
  for (int s = 0; s < samples; ++s) {
    const Vector z = standard_normal_vector(rng, d);
    const Vector x = sample(q, z);
    const double lp = model.log_density(x);
    if (!std::isfinite(lp))
      throw EvaluationError("non-finite log density in ELBO at " + format_vector(x), x);
    const double term = lp - (log_norm - 0.5 * z.squaredNorm());
    const double delta = term - mean;
    mean += delta / (s + 1);
    m2 += delta * (term - mean);
  }
  const double var = m2 / (samples - 1);
  return {mean, std::sqrt(var / samples)};
}

double kl_gaussians(const Vector& m1, const Matrix& s1, const Vector& m2, const Matrix& s2) {
  const auto d = m1.size();
  if (m2.size() != d || s1.rows() != d || s2.rows() != d || s1.cols() != d || s2.cols() != d)
    throw std::invalid_argument("kl_gaussians: dimension mismatch");
  Eigen::LLT<Matrix> c1(s1), c2(s2);
  if (c1.info() != Eigen::Success || c2.info() != Eigen::Success)
    throw std::invalid_argument("kl_gaussians: covariance is not positive definite");
  const Matrix l1 = c1.matrixL();
  const Matrix l2 = c2.matrixL();
  if ((l1.diagonal().array() <= 0.0).any() || (l2.diagonal().array() <= 0.0).any())
    throw std::invalid_argument("kl_gaussians: singular covariance");
  const double logdet1 = 2.0 * l1.diagonal().array().log().sum();
  const double logdet2 = 2.0 * l2.diagonal().array().log().sum();
  const double trace = c2.solve(s1).trace();
  const Vector diff = m2 - m1;
  const double maha = diff.dot(c2.solve(diff));
  return 0.5 * (trace + maha - static_cast<double>(d) + logdet2 - logdet1);
}

double kl_gaussians(const GaussianApprox& q1, const GaussianApprox& q2) {
  return kl_gaussians(q1.mu, q1.covariance(), q2.mu, q2.covariance());
}

}  // namespace cvi
