#pragma once

#include "cvi/diagnostics.hpp"
#include "cvi/harness/config.hpp"
#include "cvi/trace.hpp"

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace cvi::harness {

struct TrialFailure {
  std::string algorithm;
  long trial = 0;
  std::uint64_t seed = 0;
  std::string message;
};

/// One row per trial of one algorithm.
struct SummaryRow {
  long trial = 0;
  std::uint64_t seed = 0;
  std::string status;  // ok, failed, missing, corrupt
  double final_elbo = 0.0;
  double final_elbo_std_error = 0.0;
  long iterations = 0;
  std::string stop_reason;
  Vector moments;  // [mean; marginal sd], or the point for smap
  std::optional<bool> captured;
  double distance = 0.0;
};

struct AlgorithmSummary {
  std::string id;
  AlgorithmKind kind = AlgorithmKind::csvi;
  std::vector<SummaryRow> rows;
  std::optional<CaptureReport> capture;
};

struct ExperimentReport {
  std::string config_hash;
  std::vector<AlgorithmSummary> algorithms;
  std::vector<TrialFailure> failures;
  std::vector<std::string> problems;  // missing or corrupt trace files
};

/// Every algorithm of one trial, in config order. Trial i runs with seed
/// base_seed + i; all random mean inits of a trial share one draw, as do all random
/// scale inits, so algorithms are compared on paired starting points.
struct TrialResult {
  std::map<std::string, RunTrace> traces;
  std::vector<TrialFailure> failures;
};
TrialResult run_trial(const ExperimentConfig& cfg, long trial);

/// Runs all trials on `jobs` workers and writes under `out_dir`:
///   config.json, manifest.json, capture.json, summary_<id>.csv,
///   traces/<id>/trial_NNNN.csv and .json
/// Per-trial failures are recorded in the manifest and do not stop other trials.
/// Throws ConfigError when the config or a model cannot be built.
ExperimentReport run_experiment(const ExperimentConfig& cfg, const std::string& out_dir, int jobs,
                                std::ostream* progress = nullptr);

/// Re-reads a finished experiment directory. Missing or corrupt traces are listed in
/// `problems` and the remaining ones are still summarized.
ExperimentReport summarize(const std::string& dir);

/// Writes summary_<id>.csv for every algorithm and capture.json.
void write_summaries(const ExperimentReport& report, const std::string& out_dir);
std::string summary_csv(const AlgorithmSummary& summary);

/// $CVI_OUTPUT_ROOT when set, else "cvi-output".
std::string default_output_root();

std::string trace_stem(long trial);  // "trial_0007"

}  // namespace cvi::harness
