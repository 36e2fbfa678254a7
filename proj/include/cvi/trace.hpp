#pragma once

#include "cvi/types.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace cvi {

enum TraceFlag : std::uint32_t {
  kFlagNone = 0,
  kFlagProjected = 1u << 0,       // a diagonal entry of L was clamped by the projection
  kFlagFloorClamped = 1u << 1,    // SVI had to lift a diagonal to its floor before the gradient
  kFlagLowEss = 1u << 2,          // importance-sampling ESS fell below 2
  kFlagBacktrackLimit = 1u << 3,  // reserved for line-search diagnostics
};

struct TraceRecord {
  long iteration = 0;
  double objective = 0.0;  // f_n for Laplace runs, NaN where not tracked
  double grad_norm = 0.0;
  double step_size = 0.0;
  std::uint32_t flags = kFlagNone;  // OR of flags raised since the previous record
  Vector params;                    // snapshot (see RunTrace::param_layout)
};

struct ElboCheckpoint {
  long iteration = 0;
  double mean = 0.0;
  double std_error = 0.0;
};

struct TraceSummary {
  Vector params;
  // "theta", "mu_L", or "theta_sigma" for [theta; vec(Sigma)] from Laplace-type runs.
  std::string param_layout;
  double final_elbo = 0.0;
  double final_elbo_std_error = 0.0;
  long iterations = 0;
  std::string stop_reason;
  double wall_seconds = 0.0;
};

/// Record of one optimizer run. Records are taken every `record_every` iterations
/// plus the first and last, so iterations are strictly increasing.
struct RunTrace {
  std::string algorithm;
  std::uint64_t seed = 0;
  int dim = 0;
  long sample_size = 1;  // n of the target, needed to read L as a covariance factor
  // Layout of TraceRecord::params: "theta" for point estimates, "mu_L" for [mu; L column-major].
  std::string param_layout;
  std::vector<TraceRecord> records;
  std::vector<ElboCheckpoint> elbo;
  long instability_count = 0;
  long low_ess_count = 0;
  std::vector<std::string> warnings;
  std::optional<TraceSummary> summary;
};

}  // namespace cvi
