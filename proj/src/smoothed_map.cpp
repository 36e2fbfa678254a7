#include "cvi/smoothed_map.hpp"

#include "cvi/errors.hpp"

#include <chrono>
#include <cmath>
#include <deque>
#include <limits>
#include <stdexcept>

namespace cvi {

void SmoothedMapConfig::validate() const {
  if (!(alpha > 0.0) || !std::isfinite(alpha))
    throw std::invalid_argument("smoothing variance alpha must be positive");
  if (samples < 1) throw std::invalid_argument("SMAP needs at least one sample per gradient");
  if (iterations < 0) throw std::invalid_argument("iteration count must be nonnegative");
  if (record_every < 1) throw std::invalid_argument("record_every must be >= 1");
  if (stop_on_small_gradient && gradient_window < 1)
    throw std::invalid_argument("gradient window must be >= 1");
  if (init.size() < 1 || !init.allFinite()) throw std::invalid_argument("SMAP init must be finite");
  schedule.validate();
}

const char* to_string(StopReason reason) {
  switch (reason) {
    case StopReason::iteration_cap:
      return "iteration_cap";
    case StopReason::gradient_norm:
      return "gradient_norm";
  }
  return "unknown";
}

SmapGradient smap_gradient(const TargetModel& model, const Vector& theta, double alpha,
                           const Matrix& z) {
  if (z.cols() < 1) throw std::invalid_argument("smap_gradient needs at least one sample");
  if (z.rows() != theta.size()) throw std::invalid_argument("sample dimension mismatch");
  if (!(alpha > 0.0)) throw std::invalid_argument("alpha must be positive");
  const double root_alpha = std::sqrt(alpha);
  const Eigen::Index samples = z.cols();

  Vector log_w(samples);
  for (Eigen::Index s = 0; s < samples; ++s) {
    const double lp = model.log_density(theta - root_alpha * z.col(s));
    if (std::isnan(lp)) throw EvaluationError("NaN log density in smoothed gradient", theta);
    log_w[s] = lp;
  }
  const double top = log_w.maxCoeff();
  if (!std::isfinite(top))
    throw DegenerateWeightsError(
        "all importance weights vanish at " + format_vector(theta), theta);
  const Vector w = (log_w.array() - top).exp().matrix();
  const double sum_w = w.sum();
  const double sum_w2 = w.squaredNorm();

  const Vector z_bar = z * w / sum_w;
  SmapGradient out;
  out.gradient = z_bar / root_alpha;
  out.ess = sum_w * sum_w / sum_w2;
  out.std_error = Vector::Zero(theta.size());
  if (samples > 1) {
    for (Eigen::Index s = 0; s < samples; ++s)
      out.std_error += (w[s] * w[s]) * (z.col(s) - z_bar).cwiseAbs2();
    out.std_error = (out.std_error / (sum_w * sum_w)).cwiseSqrt() / root_alpha;
  } else {
    out.std_error.setConstant(std::numeric_limits<double>::infinity());
  }
  return out;
}

SmoothedMapResult smap_run(const TargetModel& model, const SmoothedMapConfig& cfg) {
  cfg.validate();
  if (cfg.init.size() != model.dim()) throw std::invalid_argument("SMAP init has the wrong dimension");
  const auto started = std::chrono::steady_clock::now();
  const int d = model.dim();

  SmoothedMapResult result;
  RunTrace& trace = result.trace;
  trace.algorithm = "smap";
  trace.seed = cfg.seed;
  trace.dim = d;
  trace.sample_size = model.sample_size();
  trace.param_layout = "theta";

  Vector x = cfg.init;
  Rng rng = make_rng(cfg.seed, 1);
  AdamState adam(d, cfg.adam);
  std::deque<double> window;
  double window_sum = 0.0;
  std::uint32_t pending_flags = kFlagNone;

  trace.records.push_back({0, std::numeric_limits<double>::quiet_NaN(),
                           std::numeric_limits<double>::quiet_NaN(), 0.0, kFlagNone, x});

  long k = 0;
  for (; k < cfg.iterations; ++k) {
    const Matrix z = standard_normal_matrix(rng, d, cfg.samples);
    SmapGradient g;
    try {
      g = smap_gradient(model, x, cfg.alpha, z);
    } catch (const EvaluationError& e) {
      throw OptimizationError(std::string(e.what()) + " (SMAP iteration " + std::to_string(k) + ")",
                              k, x);
    }
    if (cfg.samples >= 2 && g.ess < 2.0) {
      pending_flags |= kFlagLowEss;
      ++trace.low_ess_count;
    }
    const double gamma = cfg.schedule(k);
    if (cfg.optimizer == SmapOptimizer::adam)
      x -= adam.step(g.gradient, gamma);
    else
      x -= gamma * g.gradient;
    if (!x.allFinite())
      throw OptimizationError("non-finite SMAP iterate at iteration " + std::to_string(k), k, x);

    const double norm = g.gradient.norm();
    bool stop = false;
    if (cfg.stop_on_small_gradient) {
      window.push_back(norm);
      window_sum += norm;
      if (static_cast<long>(window.size()) > cfg.gradient_window) {
        window_sum -= window.front();
        window.pop_front();
      }
      stop = static_cast<long>(window.size()) == cfg.gradient_window &&
             window_sum / static_cast<double>(cfg.gradient_window) < cfg.gradient_tolerance;
    }
    const long done = k + 1;
    if (done % cfg.record_every == 0 || done == cfg.iterations || stop) {
      trace.records.push_back({done, std::numeric_limits<double>::quiet_NaN(), norm, gamma,
                               pending_flags, x});
      pending_flags = kFlagNone;
    }
    if (stop) {
      result.stop = StopReason::gradient_norm;
      ++k;
      break;
    }
  }
  if (trace.low_ess_count > 0)
    trace.warnings.push_back("importance-sampling ESS below 2 on " +
                             std::to_string(trace.low_ess_count) + " iterations");

  result.theta_hat = x;
  TraceSummary summary;
  summary.params = x;
  summary.param_layout = "theta";
  summary.final_elbo = std::numeric_limits<double>::quiet_NaN();
  summary.final_elbo_std_error = std::numeric_limits<double>::quiet_NaN();
  summary.iterations = k;
  summary.stop_reason = to_string(result.stop);
  summary.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  trace.summary = std::move(summary);
  return result;
}

GaussianMixtureTarget smoothed_density_oracle(const GaussianMixtureTarget& target, double alpha) {
  if (!(alpha >= 0.0)) throw std::invalid_argument("smoothing variance must be nonnegative");
  std::vector<Matrix> covs = target.covariances();
  for (Matrix& c : covs) c += alpha * Matrix::Identity(c.rows(), c.cols());
  return GaussianMixtureTarget(target.weights(), target.means(), std::move(covs),
                               target.sample_size());
}

double default_alpha(long n) {
  if (n < 1) throw std::invalid_argument("default_alpha: n must be >= 1");
  return 10.0 * std::pow(static_cast<double>(n), -0.3);
}

}  // namespace cvi
