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

#ifndef NORMCF_NORM_STORE_H_
#define NORMCF_NORM_STORE_H_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "normcf/norm.h"
#include "normcf/predictor.h"
#include "normcf/preference_model.h"
#include "normcf/sensitivity.h"
#include "normcf/similarity.h"

namespace normcf {

struct AddReport {
  std::vector<std::string> abolished;
};

struct MergeRecord {
  std::vector<std::string> sources;
  std::string merged;
  std::size_t attribute = 0;
};

struct GeneralizeReport {
  std::vector<MergeRecord> merges;
};

// Per-user deontic norm stores over one action space.
//
// Invariant: no two active norms of one user conflict. Add() restores it by
// abolishing every older conflicting norm; generalization and revision only
// go through Add() or coverage-preserving rewrites. Norms of one user are
// kept in insertion order, users in ascending id order.
class NormStore {
 public:
  explicit NormStore(ActionSpace space);

  const ActionSpace& space() const { return space_; }

  // Fresh id that has not been used in this store.
  std::string NextId();

  // Inserts an active norm, abolishing the user's conflicting active norms.
  // Fails on a duplicate id, an inactive or malformed norm, or a stated norm
  // with confidence other than 1.
  absl::StatusOr<AddReport> Add(Norm norm);

  // Inserts a norm exactly as recorded (either status), without conflict
  // resolution. For loading exported stores.
  absl::Status Restore(Norm norm);

  // Marks an active norm abolished. NotFound for an unknown id.
  absl::Status Abolish(std::string_view id);

  // Merges full-domain families of same-modality norms that agree on every
  // other attribute into one wildcard norm, repeatedly, until no merge
  // applies. Coverage of the user's active norms is unchanged; merged
  // sources are removed from the store.
  GeneralizeReport Generalize(std::string_view user);

  const Norm* Find(std::string_view id) const;
  std::vector<std::string> Users() const;
  std::vector<const Norm*> Active(std::string_view user) const;
  std::vector<const Norm*> ActiveAll() const;
  // All norms including abolished ones.
  std::vector<const Norm*> All() const;
  std::size_t num_active() const;

  // Per action, the modality of the user's active norms covering it.
  std::vector<std::optional<Modality>> Coverage(std::string_view user) const;

 private:
  Norm* FindMutable(std::string_view id);

  ActionSpace space_;
  std::map<std::string, std::vector<Norm>, std::less<>> by_user_;
  std::unordered_set<std::string> used_ids_;
  // Live norms only; merged-away sources are dropped.
  std::unordered_map<std::string, std::string> user_of_;
  std::uint64_t next_id_ = 1;
};

// Scans every pair of active norms per user. Test and audit helper.
bool IsConflictFree(const NormStore& store);

struct PipelineParams {
  PredictorParams predictor;
  SynthesisParams synthesis;
  SensitivityParams sensitivity;
  // Predicted norms at least this many epochs old are re-checked.
  std::int64_t revision_age = 3;

  absl::Status Validate() const;
};

enum class RevisionAction : std::uint8_t { kKept, kReplaced, kAskUser };

std::string_view RevisionActionName(RevisionAction action);

struct RevisionOutcome {
  std::string norm_id;
  std::string user;
  RevisionAction action = RevisionAction::kKept;
  // kReplaced: the id of the new norm.
  std::string replacement_id;
  // kAskUser: one AskUser decision per covered action.
  std::vector<Decision> questions;
};

struct PredictionRecord {
  UserIndex user = 0;
  ActionIndex action = 0;
  double value = 0.0;
};

struct RevisionReport {
  std::vector<RevisionOutcome> outcomes;
  std::vector<std::string> abolished;
  std::vector<PredictionRecord> predictions;

  std::size_t Count(RevisionAction action) const;
};

// Re-predicts every covered action of each active predicted norm whose age
// reaches `revision_age` and aggregates by majority over covered actions:
//   clear preferences agreeing with the norm for a strict majority -> keep;
//   a strict majority clearly opposite, mean confidence of those >= gamma
//   and no covered action sensitive -> replace with the opposite norm;
//   anything else -> ask the user about every covered action.
// Stated norms are never touched. Users missing from the index are asked.
RevisionReport Revise(NormStore& store, const NeighborIndex& index,
                      const PipelineParams& params, std::int64_t current_epoch,
                      const SensitivityModel& sensitivity);
// Convenience overload that builds the similarity index itself.
RevisionReport Revise(NormStore& store, const PreferenceMatrix& matrix,
                      const PipelineParams& params, std::int64_t current_epoch,
                      const SensitivityModel& sensitivity);

}  // namespace normcf

#endif  // NORMCF_NORM_STORE_H_
