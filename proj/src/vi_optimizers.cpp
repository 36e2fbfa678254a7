#include "cvi/vi_optimizers.hpp"

#include "cvi/errors.hpp"
#include "cvi/smoothed_map.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace cvi {

const char* to_string(ViAlgorithm algorithm) {
  switch (algorithm) {
    case ViAlgorithm::csvi:
      return "csvi";
    case ViAlgorithm::svi:
      return "svi";
    case ViAlgorithm::csvi_adam:
      return "csvi-adam";
  }
  return "unknown";
}

ViAlgorithm vi_algorithm_from_string(const std::string& name) {
  if (name == "csvi") return ViAlgorithm::csvi;
  if (name == "svi") return ViAlgorithm::svi;
  if (name == "csvi-adam") return ViAlgorithm::csvi_adam;
  throw std::invalid_argument("unknown VI algorithm '" + name + "'");
}

void ViRunConfig::validate() const {
  init.validate();
  schedule.validate();
  if (iterations < 0) throw std::invalid_argument("iteration count must be nonnegative");
  if (elbo_checkpoint_every < 0) throw std::invalid_argument("ELBO cadence must be nonnegative");
  if (elbo_samples < 2 || final_elbo_samples < 2)
    throw std::invalid_argument("ELBO estimates need at least 2 samples");
  if (record_every < 1) throw std::invalid_argument("record_every must be >= 1");
  if (!(svi_floor > 0.0)) throw std::invalid_argument("SVI floor must be positive");
}

namespace {

double gradient_norm(const GradientPair& g) {
  return std::sqrt(g.g_mu.squaredNorm() + g.g_L.squaredNorm());
}

bool any_negative_diagonal(const Matrix& L) { return (L.diagonal().array() < 0.0).any(); }

void check_finite(const GaussianApprox& q, const GradientPair& g) {
  if (!g.g_mu.allFinite() || !g.g_L.allFinite())
    throw EvaluationError("non-finite VI gradient", q.flatten());
  if (!q.mu.allFinite() || !q.L.allFinite())
    throw EvaluationError("non-finite VI iterate", q.flatten());
}

constexpr std::uint64_t kStreamSteps = 2;
constexpr std::uint64_t kStreamElbo = 3;
constexpr std::uint64_t kStreamFinalElbo = 4;

ElboCheckpoint checkpoint(const TargetModel& model, const GaussianApprox& q, long iteration,
                          int samples, std::uint64_t seed) {
  ElboCheckpoint c{iteration, std::numeric_limits<double>::quiet_NaN(),
                   std::numeric_limits<double>::quiet_NaN()};
  if (!q.diagonal_positive()) return c;
  Rng mix = make_rng(seed, kStreamElbo + (static_cast<std::uint64_t>(iteration) << 8));
  try {
    const ElboEstimate e = elbo_estimate(model, q, samples, mix());
    c.mean = e.mean;
    c.std_error = e.std_error;
  } catch (const EvaluationError&) {
  }
  return c;
}

// One update of the chosen algorithm; returns the gradient norm and ORs flags.
struct StepOutcome {
  double grad_norm;
  std::uint32_t flags;
};

template <typename Step>
ViResult run_loop(const TargetModel& model, const ViRunConfig& cfg, const char* name, Step&& step) {
  cfg.validate();
  if (cfg.init.dim() != model.dim())
    throw std::invalid_argument("VI init has the wrong dimension for the model");
  if (cfg.init.n != static_cast<double>(model.sample_size()))
    throw std::invalid_argument("VI init scale anchor n differs from the model's sample size");
  const auto started = std::chrono::steady_clock::now();
  const int d = model.dim();

  ViResult result{cfg.init, {}};
  RunTrace& trace = result.trace;
  trace.algorithm = name;
  trace.seed = cfg.seed;
  trace.dim = d;
  trace.sample_size = model.sample_size();
  trace.param_layout = "mu_L";
  GaussianApprox& q = result.approx;

  Rng rng = make_rng(cfg.seed, kStreamSteps);
  trace.records.push_back({0, std::numeric_limits<double>::quiet_NaN(),
                           std::numeric_limits<double>::quiet_NaN(), 0.0, kFlagNone, q.flatten()});
  if (cfg.elbo_checkpoint_every > 0)
    trace.elbo.push_back(checkpoint(model, q, 0, cfg.elbo_samples, cfg.seed));

  std::uint32_t pending = kFlagNone;
  for (long k = 0; k < cfg.iterations; ++k) {
    const Vector z = standard_normal_vector(rng, d);
    const double gamma = cfg.schedule(k);
    StepOutcome out;
    try {
      out = step(q, gamma, z, trace);
    } catch (const EvaluationError& e) {
      throw OptimizationError(std::string(e.what()) + " (" + name + " iteration " +
                                  std::to_string(k) + ")",
                              k, q.flatten());
    }
    pending |= out.flags;
    const long done = k + 1;
    if (done % cfg.record_every == 0 || done == cfg.iterations) {
      trace.records.push_back({done, std::numeric_limits<double>::quiet_NaN(), out.grad_norm, gamma,
                               pending, q.flatten()});
      pending = kFlagNone;
    }
    if (cfg.elbo_checkpoint_every > 0 && done % cfg.elbo_checkpoint_every == 0)
      trace.elbo.push_back(checkpoint(model, q, done, cfg.elbo_samples, cfg.seed));
  }

  TraceSummary summary;
  summary.params = q.flatten();
  summary.param_layout = "mu_L";
  summary.iterations = cfg.iterations;
  summary.stop_reason = to_string(StopReason::iteration_cap);
  summary.final_elbo = std::numeric_limits<double>::quiet_NaN();
  summary.final_elbo_std_error = std::numeric_limits<double>::quiet_NaN();
  if (q.diagonal_positive()) {
    try {
      const ElboEstimate e =
          elbo_estimate(model, q, cfg.final_elbo_samples, make_rng(cfg.seed, kStreamFinalElbo)());
      summary.final_elbo = e.mean;
      summary.final_elbo_std_error = e.std_error;
    } catch (const EvaluationError& e) {
      trace.warnings.push_back(std::string("final ELBO failed: ") + e.what());
    }
  } else {
    trace.warnings.push_back("final L has a zero diagonal; ELBO undefined");
  }
  if (trace.instability_count > 0)
    trace.warnings.push_back("SVI lifted a diagonal of L to the floor " +
                             std::to_string(trace.instability_count) + " times");
  summary.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  trace.summary = std::move(summary);
  return result;
}

}  // namespace

GaussianApprox csvi_step(const TargetModel& model, const GaussianApprox& q, double gamma,
                         const Vector& z) {
  const GradientPair g = scaled_stochastic_gradients(model, q, z);
  GaussianApprox next = q;
  next.mu -= gamma * g.g_mu;
  next.L -= gamma * g.g_L;
  next = project(std::move(next));
  check_finite(next, g);
  return next;
}

ViResult csvi_run(const TargetModel& model, const ViRunConfig& cfg) {
  return run_loop(model, cfg, "csvi",
                  [&](GaussianApprox& q, double gamma, const Vector& z, RunTrace&) {
                    const GradientPair g = scaled_stochastic_gradients(model, q, z);
                    q.mu -= gamma * g.g_mu;
                    q.L -= gamma * g.g_L;
                    const bool clamped = any_negative_diagonal(q.L);
                    q = project(std::move(q));
                    check_finite(q, g);
                    return StepOutcome{gradient_norm(g), clamped ? kFlagProjected : kFlagNone};
                  });
}

ViResult csvi_run(const TargetModel& model, ViRunConfig cfg, const SmoothedMapResult& smap) {
  cfg.init.mu = smap.theta_hat;
  return csvi_run(model, cfg);
}

ViResult svi_run(const TargetModel& model, const ViRunConfig& cfg) {
  const double floor = cfg.svi_floor;
  const int d = cfg.init.dim();
  AdamState adam(static_cast<Eigen::Index>(d) + static_cast<Eigen::Index>(d) * d, cfg.adam);
  return run_loop(model, cfg, "svi", [&](GaussianApprox& q, double gamma, const Vector& z,
                                         RunTrace& trace) {
    std::uint32_t flags = kFlagNone;
    for (Eigen::Index i = 0; i < q.mu.size(); ++i)
      if (q.L(i, i) < floor) {
        q.L(i, i) = floor;
        flags |= kFlagFloorClamped;
        ++trace.instability_count;
      }
    const GradientPair g = stochastic_gradients(model, q, z);
    if (cfg.svi_adam) {
      Vector flat(adam.first_moment().size());
      flat.head(d) = g.g_mu;
      flat.tail(static_cast<Eigen::Index>(d) * d) = g.g_L.reshaped();
      const Vector delta = adam.step(flat, gamma);
      q.mu -= delta.head(d);
      q.L -= delta.tail(static_cast<Eigen::Index>(d) * d).reshaped(d, d);
    } else {
      q.mu -= gamma * g.g_mu;
      Matrix step = g.g_L;
      if (cfg.svi_log_diagonal) {
        // Step log L_ii; the chain rule turns g into L_ii g.
        for (Eigen::Index i = 0; i < q.mu.size(); ++i) {
          q.L(i, i) *= std::exp(-gamma * q.L(i, i) * g.g_L(i, i));
          step(i, i) = 0.0;
        }
      }
      q.L -= gamma * step;
    }
    for (Eigen::Index i = 0; i < q.mu.size(); ++i)
      if (q.L(i, i) < floor) {
        q.L(i, i) = floor;
        flags |= kFlagFloorClamped;
        ++trace.instability_count;
      }
    check_finite(q, g);
    return StepOutcome{gradient_norm(g), flags};
  });
}

ViResult csvi_adam_run(const TargetModel& model, const ViRunConfig& cfg) {
  const int d = cfg.init.dim();
  AdamState adam(static_cast<Eigen::Index>(d) + static_cast<Eigen::Index>(d) * d, cfg.adam);
  return run_loop(model, cfg, "csvi-adam",
                  [&](GaussianApprox& q, double gamma, const Vector& z, RunTrace&) {
                    const GradientPair g = scaled_stochastic_gradients(model, q, z);
                    Vector flat(adam.first_moment().size());
                    flat.head(d) = g.g_mu;
                    flat.tail(static_cast<Eigen::Index>(d) * d) = g.g_L.reshaped();
                    const Vector delta = adam.step(flat, gamma);
                    q.mu -= delta.head(d);
                    q.L -= delta.tail(static_cast<Eigen::Index>(d) * d).reshaped(d, d);
                    const bool clamped = any_negative_diagonal(q.L);
                    q = project(std::move(q));
                    check_finite(q, g);
                    return StepOutcome{gradient_norm(g), clamped ? kFlagProjected : kFlagNone};
                  });
}

ViResult vi_run(const TargetModel& model, const ViRunConfig& cfg) {
  switch (cfg.algorithm) {
    case ViAlgorithm::csvi:
      return csvi_run(model, cfg);
    case ViAlgorithm::svi:
      return svi_run(model, cfg);
    case ViAlgorithm::csvi_adam:
      return csvi_adam_run(model, cfg);
  }
  throw std::invalid_argument("unknown VI algorithm");
}

}  // namespace cvi
