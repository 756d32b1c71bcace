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

#ifndef NORMCF_SIMULATION_H_
#define NORMCF_SIMULATION_H_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "normcf/norm.h"
#include "normcf/norm_store.h"
#include "normcf/preference_model.h"
#include "normcf/sensitivity.h"

namespace normcf {

// Synthetic population: clustered archetypes with Gaussian perturbation.
struct PopulationConfig {
  std::size_t n_users = 300;
  std::size_t n_clusters = 3;
  double cluster_noise = 0.1;
  // Probability that a truth entry is hidden from the observed matrix.
  double masking = 0.5;
  std::uint64_t seed = 42;
  ActionSpace space = DefaultPrivacyActionSpace();

  absl::Status Validate() const;
};

struct Population {
  PreferenceMatrix truth;
  PreferenceMatrix observed;
  std::vector<std::size_t> cluster_of;
  std::vector<std::vector<double>> centroids;
};

// "u001", "u002", ... padded so that id order equals generation order.
std::string SyntheticUserId(std::size_t index, std::size_t n_users);

// Fully determined by config.seed. Truth entries carry Source::kTruth,
// observed entries Source::kStated.
absl::StatusOr<Population> GeneratePopulation(const PopulationConfig& config);

// [user][action] -> norm the truth implies, if any.
using NormGrid = std::vector<std::vector<std::optional<Modality>>>;

// value >= theta obliges, value <= -theta prohibits, no gating. Fails when
// the truth matrix has gaps.
absl::StatusOr<NormGrid> OracleNorms(const PreferenceMatrix& truth,
                                     double theta);

enum class DriftKind : std::uint8_t { kSignFlip, kRedraw };

std::string_view DriftKindName(DriftKind kind);
absl::StatusOr<DriftKind> ParseDriftKind(std::string_view name);

struct DriftEvent {
  std::int64_t epoch = 1;
  std::size_t cluster = 0;
  DriftKind kind = DriftKind::kSignFlip;
};

enum class DecisionPolicy : std::uint8_t {
  // Predict, synthesize, ask only when the decision table says so.
  kPredict,
  // Baseline: ask about every undecided action.
  kAskEverything,
};

struct SimulationState {
  PreferenceMatrix truth;
  PreferenceMatrix observed;
  std::vector<std::size_t> cluster_of;
  NormStore norms;
  SensitivityModel sensitivity;
  std::int64_t epoch = 0;
  PipelineParams params;
  std::vector<DriftEvent> drift;
  DecisionPolicy policy = DecisionPolicy::kPredict;
  std::uint64_t seed = 0;
  // Perturbation used when a drift event redraws a cluster.
  double cluster_noise = 0.0;
  // [user * num_actions + action]: a decision has been made for the cell in
  // some epoch so far.
  std::vector<std::uint8_t> decided;
};

// Generates the population and turns every clear observed preference into a
// stated norm (epoch 0), generalized per user.
absl::StatusOr<SimulationState> InitializeSimulation(
    const PopulationConfig& config, const PipelineParams& params,
    std::vector<DriftEvent> drift,
    DecisionPolicy policy = DecisionPolicy::kPredict);

// What happened during one epoch; the input to Evaluate.
struct EpochActivity {
  std::vector<PredictionRecord> predictions;
  std::size_t decisions = 0;
  std::size_t obliged = 0;
  std::size_t prohibited = 0;
  std::size_t no_norm = 0;
  std::size_t ask_user = 0;
  std::size_t norms_created = 0;
  std::size_t norms_abolished = 0;
  std::size_t norms_generalized = 0;
  std::size_t revisions_kept = 0;
  std::size_t revisions_replaced = 0;
  std::size_t revisions_asked = 0;
  std::size_t drift_events = 0;
};

struct NormScores {
  // Over the selected cells: active-norm modality (or absence) equals the
  // oracle's.
  std::optional<double> accuracy;
  std::optional<double> obligation_precision;
  std::optional<double> obligation_recall;
  std::optional<double> prohibition_precision;
  std::optional<double> prohibition_recall;
};

// Compares per-action expansions of the active norms with the oracle.
// Accuracy covers cells with a non-zero mask entry, or every cell when
// `cells` is null. Users are matched by id; store users absent from `truth`
// are ignored.
NormScores ScoreNorms(const NormStore& store, const PreferenceMatrix& truth,
                      const NormGrid& oracle,
                      const std::vector<std::uint8_t>* cells);

struct Metrics {
  // Absent when nothing was predicted.
  std::optional<double> prediction_mae;
  // Over every cell decided so far; absent before the first decision.
  std::optional<double> norm_accuracy;
  std::optional<double> obligation_precision;
  std::optional<double> obligation_recall;
  std::optional<double> prohibition_precision;
  std::optional<double> prohibition_recall;
  // AskUser / decisions of this epoch; 0 when nothing was decided.
  double interaction_rate = 0.0;
};

Metrics Evaluate(const SimulationState& state, const NormGrid& oracle,
                 const EpochActivity& activity);

struct EpochReport {
  std::int64_t epoch = 0;
  Metrics metrics;
  EpochActivity activity;  // predictions are not serialized
  std::size_t observed_known = 0;
  std::size_t active_norms = 0;
  std::size_t sensitive_values = 0;
};

// Phases in order: refit sensitivity; predict and decide every observed-
// unknown action not yet covered by an active norm, then merge norms and
// truthful answers serially in (user id, action) order; generalize; revise;
// apply drift scheduled for this epoch; score against the current truth.
EpochReport RunEpoch(SimulationState& state);

absl::StatusOr<std::vector<EpochReport>> RunSimulation(
    const PopulationConfig& config, const PipelineParams& params,
    std::int64_t n_epochs, const std::vector<DriftEvent>& drift);

// Among cells of `cluster`'s users whose oracle norm changed since `before`
// and that an active norm now covers, the share covered with the current
// oracle modality. Absent when no such cell exists.
std::optional<double> DriftAdherence(const SimulationState& state,
                                     std::size_t cluster,
                                     const NormGrid& before);

}  // namespace normcf

#endif  // NORMCF_SIMULATION_H_
