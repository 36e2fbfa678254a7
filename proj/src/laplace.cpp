#include "cvi/laplace.hpp"

#include "cvi/errors.hpp"
#include "cvi/smoothed_map.hpp"

#include <Eigen/Eigenvalues>

#include <chrono>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace cvi {

void LineSearchConfig::validate() const {
  if (!(beta > 0.0 && beta < 1.0)) throw std::invalid_argument("line-search beta must be in (0, 1)");
  if (!(t_init > 0.0) || !std::isfinite(t_init))
    throw std::invalid_argument("line-search initial step must be positive");
  if (max_backtracks < 0) throw std::invalid_argument("max_backtracks must be nonnegative");
}

BacktrackingStep backtracking_step(const TargetModel& model, const Vector& theta,
                                   const LineSearchConfig& ls) {
  BacktrackingStep out;
  out.f_before = objective(model, theta);
  const Vector g = objective_gradient(model, theta);
  if (!g.allFinite()) throw EvaluationError("non-finite gradient in line search", theta);
  const double g2 = g.squaredNorm();
  out.grad_norm = std::sqrt(g2);

  double t = ls.t_init;
  for (int j = 0; j <= ls.max_backtracks; ++j) {
    const Vector candidate = theta - t * g;
    // A candidate where the density is not finite just fails the sufficient-decrease test.
    double f = std::numeric_limits<double>::infinity();
    try {
      f = objective(model, candidate);
    } catch (const EvaluationError&) {
    }
    if (f <= out.f_before - 0.5 * t * g2) {
      out.theta = candidate;
      out.t = t;
      out.backtracks = j;
      out.f_after = f;
      return out;
    }
    t *= ls.beta;
  }
  throw LineSearchError("no sufficient decrease after " + std::to_string(ls.max_backtracks) +
                            " backtracks at " + format_vector(theta),
                        theta, out.grad_norm);
}

Matrix laplace_covariance(const Matrix& hessian_log_density, bool& pd) {
  if (!hessian_log_density.allFinite())
    throw EvaluationError("non-finite Hessian", Vector());
  const Matrix neg = -0.5 * (hessian_log_density + hessian_log_density.transpose());
  const Eigen::Index d = neg.rows();
  Eigen::LLT<Matrix> llt(neg);
  if (llt.info() == Eigen::Success && (llt.matrixL().toDenseMatrix().diagonal().array() > 0).all()) {
    pd = true;
    return llt.solve(Matrix::Identity(d, d));
  }
  pd = false;
  Eigen::SelfAdjointEigenSolver<Matrix> eig(neg);
  const Vector floored = eig.eigenvalues().cwiseMax(1e-8);
  return eig.eigenvectors() * floored.cwiseInverse().asDiagonal() * eig.eigenvectors().transpose();
}

GaussianApprox LaplaceResult::as_gaussian(double n) const {
  GaussianApprox q;
  q.mu = theta_star;
  q.n = n;
  Eigen::LLT<Matrix> llt(n * sigma);
  if (llt.info() != Eigen::Success)
    throw std::invalid_argument("Laplace covariance is not positive definite");
  q.L = llt.matrixL();
  return q;
}

namespace {

Vector pack(const Vector& theta, const Matrix& sigma) {
  Vector out(theta.size() + sigma.size());
  out << theta, sigma.reshaped();
  return out;
}

LaplaceResult run(const TargetModel& model, const Vector& init, const LaplaceConfig& cfg,
                  const char* name) {
  cfg.line_search.validate();
  if (cfg.iterations < 0) throw std::invalid_argument("iteration count must be nonnegative");
  if (cfg.record_every < 1) throw std::invalid_argument("record_every must be >= 1");
  if (init.size() != model.dim()) throw std::invalid_argument("init has the wrong dimension");
  if (!init.allFinite()) throw std::invalid_argument("init must be finite");
  const auto started = std::chrono::steady_clock::now();
  const int d = model.dim();

  LaplaceResult result;
  RunTrace& trace = result.trace;
  trace.algorithm = name;
  trace.seed = cfg.elbo_seed;
  trace.dim = d;
  trace.sample_size = model.sample_size();
  trace.param_layout = "theta";

  Vector theta = init;
  trace.records.push_back({0, objective(model, theta), objective_gradient(model, theta).norm(), 0.0,
                           kFlagNone, theta});
  std::string stop = "iteration_cap";
  long k = 0;
  for (; k < cfg.iterations; ++k) {
    const double gnorm = objective_gradient(model, theta).norm();
    if (gnorm < cfg.grad_tolerance) {
      stop = "gradient_norm";
      break;
    }
    BacktrackingStep step;
    try {
      step = backtracking_step(model, theta, cfg.line_search);
    } catch (const EvaluationError& e) {
      throw OptimizationError(std::string(e.what()) + " (" + name + " iteration " +
                                  std::to_string(k) + ")",
                              k, theta);
    }
    theta = step.theta;
    const long done = k + 1;
    if (done % cfg.record_every == 0 || done == cfg.iterations)
      trace.records.push_back({done, step.f_after, step.grad_norm, step.t,
                               kFlagNone, theta});
  }
  if (trace.records.back().iteration != k)
    trace.records.push_back({k, objective(model, theta), objective_gradient(model, theta).norm(),
                             0.0, kFlagNone, theta});

  result.theta_star = theta;
  result.sigma = laplace_covariance(hessian_log_density(model, theta), result.hessian_pd);
  if (!result.hessian_pd)
    trace.warnings.push_back("Hessian of -log pi_n is not positive definite at the optimum; "
                             "covariance eigenvalues were floored");

  TraceSummary summary;
  summary.params = pack(theta, result.sigma);
  summary.param_layout = "theta_sigma";
  summary.iterations = k;
  summary.stop_reason = stop;
  summary.final_elbo = std::numeric_limits<double>::quiet_NaN();
  summary.final_elbo_std_error = std::numeric_limits<double>::quiet_NaN();
  if (cfg.final_elbo_samples >= 2) {
    try {
      const ElboEstimate e = elbo_estimate(
          model, result.as_gaussian(static_cast<double>(model.sample_size())),
          cfg.final_elbo_samples, cfg.elbo_seed);
      summary.final_elbo = e.mean;
      summary.final_elbo_std_error = e.std_error;
    } catch (const std::exception& e) {
      trace.warnings.push_back(std::string("final ELBO failed: ") + e.what());
    }
  }
  summary.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  trace.summary = std::move(summary);
  return result;
}

}  // namespace

LaplaceResult laplace_run(const TargetModel& model, const Vector& init, const LaplaceConfig& cfg) {
  return run(model, init, cfg, "laplace");
}

LaplaceResult cla_run(const TargetModel& model, const SmoothedMapResult& smap,
                      const LaplaceConfig& cfg) {
  return run(model, smap.theta_hat, cfg, "cla");
}

}  // namespace cvi
