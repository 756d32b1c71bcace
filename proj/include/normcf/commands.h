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

#ifndef NORMCF_COMMANDS_H_
#define NORMCF_COMMANDS_H_

#include <filesystem>
#include <string_view>

#include "absl/status/status.h"
#include "normcf/config.h"

namespace normcf {

// Subcommands and the files each writes into the output directory:
//
//   generate    action_space.json truth.csv observed.csv clusters.csv
//   predict     predictions.csv
//   synthesize  decisions.csv norms.csv
//   simulate    reports.jsonl norms.csv
//   inspect     similarity.csv sensitivity.csv
//   evaluate    evaluation.json
//
// Inputs come from config.paths. Every file is written atomically and no
// input file is touched.
absl::Status Execute(std::string_view command, const Config& config,
                     const std::filesystem::path& out_dir);

// 0 for OK, 2 for NotFound or Unavailable, 1 otherwise.
int ExitCode(const absl::Status& status);

// The one-line stderr message for a failed status, e.g.
// "normcf: validation error: synthesis.theta: must lie in (0, 1], got 1.5".
std::string ErrorLine(const absl::Status& status);

}  // namespace normcf

#endif  // NORMCF_COMMANDS_H_
