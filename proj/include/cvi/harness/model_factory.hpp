#pragma once

#include "cvi/harness/config.hpp"
#include "cvi/model.hpp"

#include <memory>
#include <string>
#include <vector>

namespace cvi::harness {

/// Instantiates a model from its spec. Recognized kinds and params:
///   trimodal-mixture                 (none)
///   gaussian                      mean [..] = [0], cov [[..]] = I, n = 1
///   gaussian-mixture              weights [..], means [[..]], covariances [[[..]]], n = 1
///   synthetic-bvm                 n = 1000, data_seed = 0
///   example1                      n = 10000, data_seed = 0
///   sparse-regression-synthetic   data_seed = 0
///   sparse-regression-csv         path, response, exclude [..] = [], sigma = 5, tau1 = 0.1,
///                                 tau2 = 10, subsample = 0 (all rows), subsample_seed = 0
///   gmm-synthetic                 data_seed = 0, K = 3, alpha0 = 1
///   gmm-csv                       path, columns [..] = all, K = 3, alpha0 = 1,
///                                 subsample = 0, subsample_seed = 0
/// `overrides` is merged over spec.params. Throws ConfigError on unknown kinds or keys.
std::unique_ptr<TargetModel> make_model(const ModelSpec& spec,
                                        const nlohmann::json& overrides = nlohmann::json::object());

std::vector<std::string> model_kinds();

/// "kind" or "kind:key=value,key=value". Values parse as numbers when they can,
/// ';'-separated lists become number arrays, anything else stays a string.
/// "kind:{...}" takes the params as a JSON object instead.
ModelSpec parse_model_string(const std::string& text);

}  // namespace cvi::harness
