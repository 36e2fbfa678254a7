#pragma once

#include "cvi/adam.hpp"
#include "cvi/gauss_family.hpp"
#include "cvi/schedule.hpp"
#include "cvi/trace.hpp"

#include <cstdint>
#include <string>

namespace cvi {

struct SmoothedMapResult;

enum class ViAlgorithm { csvi, svi, csvi_adam };
const char* to_string(ViAlgorithm algorithm);
ViAlgorithm vi_algorithm_from_string(const std::string& name);

struct ViRunConfig {
  GaussianApprox init;
  StepSchedule schedule;
  long iterations = 100000;
  std::uint64_t seed = 0;
  ViAlgorithm algorithm = ViAlgorithm::csvi;
  long elbo_checkpoint_every = 1000;
  int elbo_samples = 100;
  int final_elbo_samples = 1000;
  long record_every = 100;
  AdamSettings adam;
  // SVI only: lower bound that diagonal entries of L are lifted to.
  double svi_floor = 1e-10;
  // SVI only: step the diagonal of L in log space (the 1-D "log sigma" variant).
  bool svi_log_diagonal = false;
  // SVI only: Adam moments over the unscaled gradients instead of plain SGD.
  bool svi_adam = false;

  void validate() const;
};

struct ViResult {
  GaussianApprox approx;
  RunTrace trace;
};

/// One CSVI iteration: scaled gradient at (q, z), step of size gamma, projection.
GaussianApprox csvi_step(const TargetModel& model, const GaussianApprox& q, double gamma,
                         const Vector& z);

/// K CSVI iterations from cfg.init.
ViResult csvi_run(const TargetModel& model, const ViRunConfig& cfg);
/// As above with mu initialized to the smoothed MAP and L kept from cfg.init.
ViResult csvi_run(const TargetModel& model, ViRunConfig cfg, const SmoothedMapResult& smap);

/// Unscaled-gradient baseline; diagonals below the floor are lifted before the
/// gradient is taken and the event is counted as an instability.
ViResult svi_run(const TargetModel& model, const ViRunConfig& cfg);

/// CSVI with Adam moments over the scaled gradients, then the same projection.
ViResult csvi_adam_run(const TargetModel& model, const ViRunConfig& cfg);

/// Dispatches on cfg.algorithm.
ViResult vi_run(const TargetModel& model, const ViRunConfig& cfg);

}  // namespace cvi
