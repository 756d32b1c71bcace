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

#ifndef NORMCF_PREDICTOR_H_
#define NORMCF_PREDICTOR_H_

#include <cstddef>
#include <map>
#include <string_view>
#include <variant>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "normcf/preference_model.h"
#include "normcf/similarity.h"

namespace normcf {

struct PredictorParams {
  SimilarityParams similarity;
  // Neighbourhood size; also the denominator of the confidence score.
  std::size_t k = 10;
  // Fewer eligible neighbours than this yields NoNeighbors.
  std::size_t n_min = 2;

  absl::Status Validate() const;
};

struct Prediction {
  double value = 0.0;
  double confidence = 0.0;
  NeighborList neighbors;
  std::size_t support = 0;
  // Set when the target preference was already known, i.e. the prediction
  // was requested for evaluation only.
  bool target_known = false;
};

struct NoNeighbors {
  std::size_t support = 0;
};

using PredictionOutcome = std::variant<Prediction, NoNeighbors>;

// Sum of neighbour similarities divided by k. The gap-penalized similarity
// already discounts low overlap, so this grows with both similarity and the
// amount of shared knowledge. Empty list gives 0.
double Confidence(const NeighborList& neighbors, std::size_t k);

// Similarity-weighted mean of the neighbours' preferences for `action`.
PredictionOutcome Predict(const PreferenceMatrix& matrix, UserIndex user,
                          ActionIndex action, const PredictorParams& params);
// Same result, reusing a precomputed similarity table. The index params must
// match params.similarity.
PredictionOutcome Predict(const NeighborIndex& index, UserIndex user,
                          ActionIndex action, const PredictorParams& params);
absl::StatusOr<PredictionOutcome> Predict(const PreferenceMatrix& matrix,
                                          std::string_view user,
                                          const Action& action,
                                          const PredictorParams& params);

// One outcome per action unknown to `user`, keyed by action index.
std::map<ActionIndex, PredictionOutcome> PredictAll(
    const PreferenceMatrix& matrix, UserIndex user,
    const PredictorParams& params);
std::map<ActionIndex, PredictionOutcome> PredictAll(
    const NeighborIndex& index, UserIndex user, const PredictorParams& params);
absl::StatusOr<std::map<ActionIndex, PredictionOutcome>> PredictAll(
    const PreferenceMatrix& matrix, std::string_view user,
    const PredictorParams& params);

}  // namespace normcf

#endif  // NORMCF_PREDICTOR_H_
