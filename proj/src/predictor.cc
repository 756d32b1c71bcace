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

#include "normcf/predictor.h"

#include <algorithm>

#include "absl/strings/str_cat.h"

namespace normcf {

absl::Status PredictorParams::Validate() const {
  if (absl::Status status = similarity.Validate(); !status.ok()) return status;
  if (n_min < 1) {
    return absl::InvalidArgumentError("n_min must be at least 1");
  }
  if (k < n_min) {
    return absl::InvalidArgumentError(
        absl::StrCat("k (", k, ") must be at least n_min (", n_min, ")"));
  }
  return absl::OkStatus();
}

double Confidence(const NeighborList& neighbors, std::size_t k) {
  if (neighbors.empty() || k == 0) return 0.0;
  double total = 0.0;
  for (const Neighbor& neighbor : neighbors) total += neighbor.similarity;
  return std::clamp(total / static_cast<double>(k), 0.0, 1.0);
}

namespace {

PredictionOutcome FromNeighbors(const PreferenceMatrix& matrix, UserIndex user,
                                ActionIndex action, NeighborList neighbors,
                                const PredictorParams& params) {
  if (neighbors.size() < params.n_min) {
    return NoNeighbors{neighbors.size()};
  }
  double weighted = 0.0;
  double weights = 0.0;
  double lowest = kMaxPreference;
  double highest = kMinPreference;
  for (const Neighbor& neighbor : neighbors) {
    const double value = matrix.Value(neighbor.user, action);
    weighted += neighbor.similarity * value;
    weights += neighbor.similarity;
    lowest = std::min(lowest, value);
    highest = std::max(highest, value);
  }
  Prediction prediction;
  // Rounding may push the ratio an ulp outside the neighbours' hull.
  prediction.value = std::clamp(weighted / weights, lowest, highest);
  prediction.confidence = Confidence(neighbors, params.k);
  prediction.support = neighbors.size();
  prediction.target_known = matrix.Known(user, action);
  prediction.neighbors = std::move(neighbors);
  return prediction;
}

}  // namespace

PredictionOutcome Predict(const PreferenceMatrix& matrix, UserIndex user,
                          ActionIndex action, const PredictorParams& params) {
  return FromNeighbors(
      matrix, user, action,
      NearestNeighbors(matrix, user, params.k, params.similarity, action),
      params);
}

PredictionOutcome Predict(const NeighborIndex& index, UserIndex user,
                          ActionIndex action, const PredictorParams& params) {
  return FromNeighbors(index.matrix(), user, action,
                       index.Nearest(user, params.k, action), params);
}

absl::StatusOr<PredictionOutcome> Predict(const PreferenceMatrix& matrix,
                                          std::string_view user,
                                          const Action& action,
                                          const PredictorParams& params) {
  absl::StatusOr<UserIndex> index = matrix.LookupUser(user);
  if (!index.ok()) return index.status();
  if (!matrix.space().Contains(action)) {
    return absl::InvalidArgumentError("action does not belong to the action space");
  }
  return Predict(matrix, *index, matrix.space().IndexOf(action), params);
}

std::map<ActionIndex, PredictionOutcome> PredictAll(
    const NeighborIndex& index, UserIndex user, const PredictorParams& params) {
  const PreferenceMatrix& matrix = index.matrix();
  std::map<ActionIndex, PredictionOutcome> outcomes;
  for (ActionIndex a = 0; a < matrix.num_actions(); ++a) {
    if (matrix.Known(user, a)) continue;
    outcomes.emplace(a, Predict(index, user, a, params));
  }
  return outcomes;
}

std::map<ActionIndex, PredictionOutcome> PredictAll(
    const PreferenceMatrix& matrix, UserIndex user,
    const PredictorParams& params) {
  std::map<ActionIndex, PredictionOutcome> outcomes;
  if (matrix.KnownCount(user) == matrix.num_actions()) return outcomes;
  // Rank every candidate once, then filter per action.
  NeighborList ranked = NearestNeighbors(matrix, user, matrix.num_users(),
                                         params.similarity, std::nullopt);
  for (ActionIndex a = 0; a < matrix.num_actions(); ++a) {
    if (matrix.Known(user, a)) continue;
    NeighborList neighbors;
    for (const Neighbor& candidate : ranked) {
      if (neighbors.size() >= params.k) break;
      if (matrix.Known(candidate.user, a)) neighbors.push_back(candidate);
    }
    outcomes.emplace(a, FromNeighbors(matrix, user, a, std::move(neighbors),
                                      params));
  }
  return outcomes;
}

absl::StatusOr<std::map<ActionIndex, PredictionOutcome>> PredictAll(
    const PreferenceMatrix& matrix, std::string_view user,
    const PredictorParams& params) {
  absl::StatusOr<UserIndex> index = matrix.LookupUser(user);
  if (!index.ok()) return index.status();
  return PredictAll(matrix, *index, params);
}

}  // namespace normcf
