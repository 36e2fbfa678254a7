#pragma once

#include "cvi/types.hpp"

#include <functional>
#include <optional>
#include <string>

namespace cvi {

/// Black-box unnormalized posterior density pi_n on R^d.
///
/// Implementations must be pure: the same theta always yields the same output and
/// evaluation never mutates the model, so one instance may be shared by several
/// threads. Models expose log pi_n directly; the n-scaled objective
/// f_n = -log(pi_n) / n is formed by the free functions below.
class TargetModel {
 public:
  virtual ~TargetModel() = default;

  virtual std::string name() const = 0;
  virtual int dim() const = 0;
  /// Nominal sample size n >= 1. Sets the covariance convention Sigma = L L^T / n.
  virtual long sample_size() const = 0;

  virtual double log_density(const Vector& theta) const = 0;
  virtual Vector grad_log_density(const Vector& theta) const = 0;
  /// Analytic Hessian of log pi_n when the model provides one.
  virtual std::optional<Matrix> hessian_log_density(const Vector& /*theta*/) const {
    return std::nullopt;
  }
  /// A draw from the prior, for models that have one (used for random initialization).
  virtual std::optional<Vector> sample_prior(Rng& /*rng*/) const { return std::nullopt; }
};

/// f_n(theta) = -log pi_n(theta) / n. Throws EvaluationError on a non-finite density.
double objective(const TargetModel& model, const Vector& theta);
Vector objective_gradient(const TargetModel& model, const Vector& theta);

/// Per-coordinate finite-difference step.
using StepRule = std::function<double(double)>;

/// cbrt(machine epsilon) * max(1, |x|).
double default_fd_step(double x);

/// Central differences of grad log pi_n, symmetrized.
Matrix finite_difference_hessian(const TargetModel& model, const Vector& theta,
                                 const StepRule& step = default_fd_step);

/// Hessian of log pi_n: analytic when available, else finite_difference_hessian.
Matrix hessian_log_density(const TargetModel& model, const Vector& theta);

/// Hessian of f_n.
Matrix objective_hessian(const TargetModel& model, const Vector& theta);

}  // namespace cvi
