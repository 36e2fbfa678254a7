#pragma once

#include "cvi/model.hpp"

#include <cstdint>

namespace cvi {

/// Gaussian N(mu, L L^T / n) with L lower triangular and a nonnegative diagonal.
/// A zero diagonal entry is a legal mid-optimization state of CSVI.
struct GaussianApprox {
  Vector mu;
  Matrix L;
  double n = 1.0;

  int dim() const { return static_cast<int>(mu.size()); }
  Matrix covariance() const;
  bool diagonal_positive() const;

  /// Throws std::invalid_argument when shapes disagree, L has a nonzero strictly
  /// upper entry, a negative diagonal, or n < 1.
  void validate() const;

  /// [mu; vec(L)] with L in column-major order.
  Vector flatten() const;
  static GaussianApprox unflatten(const Vector& flat, int d, double n);

  static GaussianApprox identity(const Vector& mu, double n = 1.0);
};

/// Unbiased estimates of the mu- and L-gradients of -log det(L)/n + F_n(mu, L).
struct GradientPair {
  Vector g_mu;
  Matrix g_L;  // lower triangular
};

/// mu + n^{-1/2} L z.
Vector sample(const GaussianApprox& q, const Vector& z);

/// g_mu = grad f_n(x), g_L = -(diag L)^{-1}/n + n^{-1/2} ltri(grad f_n(x) z^T), x = sample(q, z).
/// Throws std::invalid_argument if any diagonal of L is zero; use
/// scaled_stochastic_gradients at the boundary.
GradientPair stochastic_gradients(const TargetModel& model, const GaussianApprox& q,
                                  const Vector& z);

/// Multiplies diagonal entry i of g_L by 1/(1 + (n L_ii)^{-1}) when L_ii > 0 and
/// replaces it by -1 when L_ii = 0. Off-diagonal entries and g_mu are untouched.
GradientPair scale_gradient(GradientPair g, const GaussianApprox& q);

/// stochastic_gradients followed by scale_gradient, extended to zero diagonals.
GradientPair scaled_stochastic_gradients(const TargetModel& model, const GaussianApprox& q,
                                         const Vector& z);

/// Clamps negative diagonal entries of L to zero.
GaussianApprox project(GaussianApprox q);

struct ElboEstimate {
  double mean = 0.0;
  double std_error = 0.0;
};

/// Monte Carlo mean of log pi_n(x) - log q(x) over `samples` reparameterized draws.
/// Unnormalized: it carries the model's additive constant.
ElboEstimate elbo_estimate(const TargetModel& model, const GaussianApprox& q, int samples,
                           std::uint64_t seed);

/// KL(N(m1, S1) || N(m2, S2)). Throws std::invalid_argument on a non-SPD covariance.
double kl_gaussians(const Vector& m1, const Matrix& s1, const Vector& m2, const Matrix& s2);
double kl_gaussians(const GaussianApprox& q1, const GaussianApprox& q2);

}  // namespace cvi
