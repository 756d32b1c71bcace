// Copyright 2026 The normcf Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef NORMCF_CONFIG_H_
#define NORMCF_CONFIG_H_

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "absl/status/statusor.h"
#include "normcf/norm_store.h"
#include "normcf/simulation.h"

namespace normcf {

// Input and output locations. Relative paths in a config file resolve
// against the file's directory; empty means "not provided".
struct Paths {
  std::filesystem::path action_space;
  std::filesystem::path preferences;
  std::filesystem::path truth;
  std::filesystem::path norms;
  std::filesystem::path out_dir;
};

struct Config {
  PipelineParams pipeline;
  // population.space is the action space for every command.
  PopulationConfig population;
  std::int64_t n_epochs = 5;
  std::vector<DriftEvent> drift;
  DecisionPolicy policy = DecisionPolicy::kPredict;
  Paths paths;
};

// JSON document, every section and key optional:
//
//   {
//     "similarity":  {"d_max": 2, "sigma_min": 0, "gap_penalty": "max"},
//     "predictor":   {"k": 10, "n_min": 2},
//     "synthesis":   {"theta": 0.5, "gamma": 0.5},
//     "sensitivity": {"varsigma": 0.75, "m_min": 5, "enabled": true},
//     "population":  {"n_users": 300, "n_clusters": 3, "cluster_noise": 0.1,
//                     "masking": 0.5, "seed": 42},
//     "action_space": {"attributes": [{"name": ..., "values": [...]}]},
//     "simulation":  {"n_epochs": 5, "revision_age": 3, "policy": "predict",
//                     "drift": [{"epoch": 5, "cluster": 0,
//                                "kind": "sign_flip"}]},
//     "paths":       {"action_space": ..., "preferences": ..., "truth": ...,
//                     "norms": ..., "out_dir": ...}
//   }
//
// Unknown keys are errors. Validation errors name the offending field as
// "section.key". An empty document yields every default. An action space
// given both inline and via paths.action_space is rejected; a path is
// loaded here.
absl::StatusOr<Config> ParseConfig(std::string_view text,
                                   const std::filesystem::path& base_dir);
absl::StatusOr<Config> LoadConfig(const std::filesystem::path& path);

}  // namespace normcf

#endif  // NORMCF_CONFIG_H_
