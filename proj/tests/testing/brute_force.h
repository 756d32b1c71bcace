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

#ifndef NORMCF_TESTS_TESTING_BRUTE_FORCE_H_
#define NORMCF_TESTS_TESTING_BRUTE_FORCE_H_

#include <optional>
#include <string>
#include <vector>

#include "normcf/preference_model.h"

namespace normcf::testing {

// Straight-line reference predictor: a full similarity table, one explicit
// sort of every candidate, one explicit weighted sum. Shares no code with
// the library beyond the matrix accessors.
struct ReferencePrediction {
  double value = 0.0;
  double confidence = 0.0;
  std::vector<std::string> neighbor_ids;
};

struct ReferenceParams {
  std::size_t k = 10;
  std::size_t n_min = 2;
  double d_max = 2.0;
  double sigma_min = 0.0;
};

// Table of similarities indexed [u][v].
std::vector<std::vector<double>> ReferenceSimilarityTable(
    const PreferenceMatrix& matrix, double d_max);

// nullopt when fewer than n_min neighbours qualify.
std::optional<ReferencePrediction> ReferencePredict(
    const PreferenceMatrix& matrix, UserIndex user, ActionIndex action,
    const ReferenceParams& params);

}  // namespace normcf::testing

#endif  // NORMCF_TESTS_TESTING_BRUTE_FORCE_H_
