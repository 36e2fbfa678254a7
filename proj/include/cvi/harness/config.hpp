#pragma once

#include "cvi/adam.hpp"
#include "cvi/diagnostics.hpp"
#include "cvi/laplace.hpp"
#include "cvi/schedule.hpp"
#include "cvi/types.hpp"

#include <json.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace cvi::harness {

inline constexpr int kConfigSchemaVersion = 1;

enum class AlgorithmKind { smap, csvi, svi, csvi_adam, cla, laplace };
const char* to_string(AlgorithmKind kind);
AlgorithmKind algorithm_kind_from_string(const std::string& name);

/// A model kind plus its kind-specific settings (see model_factory.hpp for the keys).
struct ModelSpec {
  std::string kind;
  nlohmann::json params = nlohmann::json::object();
};

struct MeanInit {
  enum class Kind { smap, uniform, prior, fixed };
  Kind kind = Kind::fixed;
  double low = -50.0;  // uniform: every coordinate drawn from (low, high)
  double high = 50.0;
  Vector value;         // fixed
  std::string smap_id;  // smap: id of an earlier smap algorithm in the same trial
};

struct ScaleInit {
  enum class Kind { identity, log_uniform, fixed };
  Kind kind = Kind::identity;
  double low = 0.1;  // log_uniform: diagonal of L with log L_ii ~ U(log low, log high)
  double high = 10.0;
  double value = 1.0;  // fixed: L = value * I
};

struct AlgorithmSpec {
  std::string id;
  AlgorithmKind kind = AlgorithmKind::csvi;
  // Merged into the experiment's model params for this algorithm only.
  nlohmann::json model_overrides = nlohmann::json::object();
  MeanInit mean_init;
  ScaleInit scale_init;
  StepSchedule schedule;
  long iterations = 100000;
  long record_every = 100;

  // smap
  double alpha = 0.0;  // 0 selects default_alpha(n)
  int samples = 100;
  // smap and svi: Adam moments instead of plain SGD (csvi-adam is its own kind)
  bool adam = false;
  AdamSettings adam_settings;

  // VI
  long elbo_checkpoint_every = 1000;
  int elbo_samples = 100;
  int final_elbo_samples = 1000;
  double svi_floor = 1e-10;
  bool svi_log_diagonal = false;

  // cla / laplace
  LineSearchConfig line_search;
  double grad_tolerance = 1e-8;
};

struct ExperimentConfig {
  int schema_version = kConfigSchemaVersion;
  std::string name;
  ModelSpec model;
  std::vector<AlgorithmSpec> algorithms;
  long trials = 1;
  std::uint64_t base_seed = 0;
  std::string output_dir;
  // Applied to [mean; marginal sd] of each Gaussian-producing algorithm.
  std::optional<CaptureCriterion> capture;

  /// Throws ConfigError on anything that would make a run meaningless, including
  /// dataset paths that do not exist.
  void validate() const;
};

nlohmann::json to_json(const ExperimentConfig& cfg);
/// Throws ConfigError on unknown schema versions, unknown keys, or bad types.
ExperimentConfig config_from_json(const nlohmann::json& j);

ExperimentConfig load_config(const std::string& path);
void save_config(const ExperimentConfig& cfg, const std::string& path);

/// FNV-1a over the canonical JSON of every semantic field (output_dir excluded), hex.
std::string config_hash(const ExperimentConfig& cfg);

/// Built-in experiment settings: mixture, bvm-smap, sparse-regression-synthetic,
/// gmm-synthetic. Throws ConfigError for unknown names.
ExperimentConfig preset(const std::string& name);
std::vector<std::string> preset_names();

}  // namespace cvi::harness
