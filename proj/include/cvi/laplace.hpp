#pragma once

#include "cvi/gauss_family.hpp"
#include "cvi/trace.hpp"

namespace cvi {

struct SmoothedMapResult;

struct LineSearchConfig {
  double beta = 0.5;  // shrink factor in (0, 1)
  double t_init = 1.0;
  int max_backtracks = 60;

  void validate() const;
};

struct LaplaceConfig {
  LineSearchConfig line_search;
  long iterations = 20000;
  double grad_tolerance = 1e-8;  // stop once ||grad f_n|| falls below this
  long record_every = 100;
  int final_elbo_samples = 1000;
  std::uint64_t elbo_seed = 0;
};

struct BacktrackingStep {
  Vector theta;
  double t = 0.0;
  int backtracks = 0;
  double f_before = 0.0;
  double f_after = 0.0;
  double grad_norm = 0.0;
};

/// theta - t grad f_n(theta) for the first t = t_init beta^j with
/// f_n(theta - t g) <= f_n(theta) - t/2 ||g||^2. Throws LineSearchError past max_backtracks.
BacktrackingStep backtracking_step(const TargetModel& model, const Vector& theta,
                                   const LineSearchConfig& ls);

struct LaplaceResult {
  Vector theta_star;
  Matrix sigma;  // (1/n) (grad^2 f_n(theta*))^{-1}
  RunTrace trace;
  bool hessian_pd = false;

  /// The fitted Gaussian in (mu, L) form with L = chol(n sigma).
  GaussianApprox as_gaussian(double n) const;
};

LaplaceResult laplace_run(const TargetModel& model, const Vector& init, const LaplaceConfig& cfg);
LaplaceResult cla_run(const TargetModel& model, const SmoothedMapResult& smap,
                      const LaplaceConfig& cfg);

/// Sigma from the Hessian of log pi_n. Cholesky when -H is PD; otherwise eigenvalues
/// of the symmetrized -H are floored at 1e-8 and `pd` is set false.
Matrix laplace_covariance(const Matrix& hessian_log_density, bool& pd);

}  // namespace cvi
