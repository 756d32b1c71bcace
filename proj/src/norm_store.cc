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

#include "normcf/norm_store.h"

#include <algorithm>
#include <utility>

#include "absl/strings/str_cat.h"

namespace normcf {

NormStore::NormStore(ActionSpace space) : space_(std::move(space)) {}

std::string NormStore::NextId() {
  std::string id;
  do {
    id = absl::StrCat("n", next_id_++);
  } while (used_ids_.contains(id));
  return id;
}

absl::StatusOr<AddReport> NormStore::Add(Norm norm) {
  if (norm.id.empty()) return absl::InvalidArgumentError("norm id is empty");
  if (used_ids_.contains(norm.id)) {
    return absl::InvalidArgumentError(
        absl::StrCat("duplicate norm id '", norm.id, "'"));
  }
  if (!norm.active()) {
    return absl::InvalidArgumentError("only active norms can be added");
  }
  if (!IsValidPattern(space_, norm.pattern)) {
    return absl::InvalidArgumentError(
        absl::StrCat("norm '", norm.id, "' has a malformed pattern"));
  }
  if (!(norm.confidence >= 0.0 && norm.confidence <= 1.0)) {
    return absl::InvalidArgumentError(
        absl::StrCat("norm confidence ", norm.confidence, " outside [0, 1]"));
  }
  if (norm.provenance == Provenance::kStated && norm.confidence != 1.0) {
    return absl::InvalidArgumentError("stated norms must have confidence 1");
  }
  if (norm.created_epoch < 0) {
    return absl::InvalidArgumentError("created_epoch must be non-negative");
  }

  AddReport report;
  std::vector<Norm>& norms = by_user_[norm.user];
  for (Norm& existing : norms) {
    if (existing.active() && Conflicts(existing, norm)) {
      existing.status = NormStatus::kAbolished;
      report.abolished.push_back(existing.id);
    }
  }
  used_ids_.insert(norm.id);
  user_of_.emplace(norm.id, norm.user);
  norms.push_back(std::move(norm));
  return report;
}

absl::Status NormStore::Restore(Norm norm) {
  if (norm.id.empty()) return absl::InvalidArgumentError("norm id is empty");
  if (used_ids_.contains(norm.id)) {
    return absl::InvalidArgumentError(
        absl::StrCat("duplicate norm id '", norm.id, "'"));
  }
  if (!IsValidPattern(space_, norm.pattern)) {
    return absl::InvalidArgumentError(
        absl::StrCat("norm '", norm.id, "' has a malformed pattern"));
  }
  used_ids_.insert(norm.id);
  user_of_.emplace(norm.id, norm.user);
  by_user_[norm.user].push_back(std::move(norm));
  return absl::OkStatus();
}

Norm* NormStore::FindMutable(std::string_view id) {
  auto owner = user_of_.find(std::string(id));
  if (owner == user_of_.end()) return nullptr;
  for (Norm& norm : by_user_.find(owner->second)->second) {
    if (norm.id == id) return &norm;
  }
  return nullptr;
}

const Norm* NormStore::Find(std::string_view id) const {
  return const_cast<NormStore*>(this)->FindMutable(id);
}

absl::Status NormStore::Abolish(std::string_view id) {
  Norm* norm = FindMutable(id);
  if (norm == nullptr) {
    return absl::NotFoundError(absl::StrCat("unknown norm '", std::string(id), "'"));
  }
  norm->status = NormStatus::kAbolished;
  return absl::OkStatus();
}

GeneralizeReport NormStore::Generalize(std::string_view user) {
  GeneralizeReport report;
  auto it = by_user_.find(user);
  if (it == by_user_.end()) return report;
  std::vector<Norm>& norms = it->second;

  bool merged = true;
  while (merged) {
    merged = false;
    for (std::size_t attr = 0; attr < space_.num_attributes() && !merged;
         ++attr) {
      // Family key: modality plus the pattern with `attr` blanked out.
      std::map<std::pair<Modality, std::vector<int>>, std::vector<std::size_t>>
          families;
      for (std::size_t i = 0; i < norms.size(); ++i) {
        const Norm& norm = norms[i];
        if (!norm.active() || norm.pattern.IsWildcard(attr)) continue;
        std::vector<int> key = norm.pattern.entries;
        key[attr] = kWildcard;
        families[{norm.modality, std::move(key)}].push_back(i);
      }
      for (const auto& [key, members] : families) {
        std::vector<bool> present(space_.domain_size(attr), false);
        for (std::size_t i : members) {
          present[norms[i].pattern.entries[attr]] = true;
        }
        if (!std::all_of(present.begin(), present.end(),
                         [](bool p) { return p; })) {
          continue;
        }

        Norm combined;
        combined.id = NextId();
        combined.user = std::string(user);
        combined.modality = key.first;
        combined.pattern = NormPattern{key.second};
        combined.provenance = Provenance::kStated;
        combined.created_epoch = 0;
        combined.confidence = 1.0;
        MergeRecord record;
        record.merged = combined.id;
        record.attribute = attr;
        for (std::size_t i : members) {
          const Norm& source = norms[i];
          if (source.provenance == Provenance::kPredicted) {
            combined.provenance = Provenance::kPredicted;
          }
          combined.created_epoch =
              std::max(combined.created_epoch, source.created_epoch);
          combined.confidence = std::min(combined.confidence, source.confidence);
          record.sources.push_back(source.id);
        }
        if (combined.provenance == Provenance::kStated) {
          combined.confidence = 1.0;
        }

        std::vector<bool> drop(norms.size(), false);
        for (std::size_t i : members) {
          drop[i] = true;
          user_of_.erase(norms[i].id);
        }
        std::vector<Norm> kept;
        kept.reserve(norms.size() - members.size() + 1);
        for (std::size_t i = 0; i < norms.size(); ++i) {
          if (!drop[i]) kept.push_back(std::move(norms[i]));
        }
        used_ids_.insert(combined.id);
        user_of_.emplace(combined.id, combined.user);
        kept.push_back(std::move(combined));
        norms = std::move(kept);
        report.merges.push_back(std::move(record));
        merged = true;
        break;
      }
    }
  }
  return report;
}

std::vector<std::string> NormStore::Users() const {
  std::vector<std::string> users;
  users.reserve(by_user_.size());
  for (const auto& [user, norms] : by_user_) users.push_back(user);
  return users;
}

std::vector<const Norm*> NormStore::Active(std::string_view user) const {
  std::vector<const Norm*> active;
  auto it = by_user_.find(user);
  if (it == by_user_.end()) return active;
  for (const Norm& norm : it->second) {
    if (norm.active()) active.push_back(&norm);
  }
  return active;
}

std::vector<const Norm*> NormStore::ActiveAll() const {
  std::vector<const Norm*> active;
  for (const auto& [user, norms] : by_user_) {
    for (const Norm& norm : norms) {
      if (norm.active()) active.push_back(&norm);
    }
  }
  return active;
}

std::vector<const Norm*> NormStore::All() const {
  std::vector<const Norm*> all;
  for (const auto& [user, norms] : by_user_) {
    for (const Norm& norm : norms) all.push_back(&norm);
  }
  return all;
}

std::size_t NormStore::num_active() const {
  std::size_t count = 0;
  for (const auto& [user, norms] : by_user_) {
    for (const Norm& norm : norms) count += norm.active();
  }
  return count;
}

std::vector<std::optional<Modality>> NormStore::Coverage(
    std::string_view user) const {
  std::vector<std::optional<Modality>> coverage(space_.num_actions());
  for (const Norm* norm : Active(user)) {
    for (ActionIndex a : CoveredActions(space_, norm->pattern)) {
      coverage[a] = norm->modality;
    }
  }
  return coverage;
}

bool IsConflictFree(const NormStore& store) {
  for (const std::string& user : store.Users()) {
    const std::vector<const Norm*> active = store.Active(user);
    for (std::size_t i = 0; i < active.size(); ++i) {
      for (std::size_t j = i + 1; j < active.size(); ++j) {
        if (Conflicts(*active[i], *active[j])) return false;
      }
    }
  }
  return true;
}

absl::Status PipelineParams::Validate() const {
  if (absl::Status s = predictor.Validate(); !s.ok()) return s;
  if (absl::Status s = synthesis.Validate(); !s.ok()) return s;
  if (absl::Status s = sensitivity.Validate(); !s.ok()) return s;
  if (revision_age < 1) {
    return absl::InvalidArgumentError("revision_age must be at least 1");
  }
  return absl::OkStatus();
}

std::string_view RevisionActionName(RevisionAction action) {
  switch (action) {
    case RevisionAction::kKept:
      return "kept";
    case RevisionAction::kReplaced:
      return "replaced";
    case RevisionAction::kAskUser:
      return "ask_user";
  }
  return "unknown";
}

std::size_t RevisionReport::Count(RevisionAction action) const {
  return static_cast<std::size_t>(
      std::count_if(outcomes.begin(), outcomes.end(),
                    [action](const RevisionOutcome& outcome) {
                      return outcome.action == action;
                    }));
}

namespace {

using Predictor =
    std::function<PredictionOutcome(UserIndex user, ActionIndex action)>;

RevisionReport ReviseWith(NormStore& store, const PreferenceMatrix& matrix,
                          const Predictor& predict,
                          const PipelineParams& params,
                          std::int64_t current_epoch,
                          const SensitivityModel& sensitivity) {
  const ActionSpace& space = store.space();
  const double theta = params.synthesis.theta;

  // Snapshot eligible ids first: replacements mutate the store.
  std::vector<std::string> eligible;
  for (const Norm* norm : store.ActiveAll()) {
    if (norm->provenance == Provenance::kPredicted &&
        current_epoch - norm->created_epoch >= params.revision_age) {
      eligible.push_back(norm->id);
    }
  }

  RevisionReport report;
  for (const std::string& id : eligible) {
    const Norm* norm = store.Find(id);
    if (norm == nullptr || !norm->active()) continue;

    RevisionOutcome outcome;
    outcome.norm_id = norm->id;
    outcome.user = norm->user;

    const std::vector<ActionIndex> covered =
        CoveredActions(space, norm->pattern);
    const std::optional<UserIndex> user = matrix.FindUser(norm->user);
    std::size_t agree = 0;
    std::size_t oppose = 0;
    double oppose_confidence = 0.0;
    bool any_sensitive = false;
    for (ActionIndex a : covered) {
      const bool sensitive = sensitivity.IsSensitive(a);
      any_sensitive = any_sensitive || sensitive;
      PredictionOutcome prediction = NoNeighbors{};
      if (user.has_value()) prediction = predict(*user, a);
      if (const auto* p = std::get_if<Prediction>(&prediction)) {
        report.predictions.push_back({*user, a, p->value});
        const std::optional<Modality> direction = ClearDirection(p->value, theta);
        if (direction == norm->modality) {
          ++agree;
        } else if (direction.has_value()) {
          ++oppose;
          oppose_confidence += p->confidence;
        }
      }
      Decision question = Synthesize(a, prediction, sensitive, params.synthesis);
      question.kind = DecisionKind::kAskUser;
      outcome.questions.push_back(question);
    }

    const std::size_t n = covered.size();
    if (2 * agree > n) {
      outcome.action = RevisionAction::kKept;
      outcome.questions.clear();
    } else if (2 * oppose > n && !any_sensitive &&
               oppose_confidence / static_cast<double>(oppose) >=
                   params.synthesis.gamma) {
      Norm replacement;
      replacement.id = store.NextId();
      replacement.user = norm->user;
      replacement.modality = Opposite(norm->modality);
      replacement.pattern = norm->pattern;
      replacement.provenance = Provenance::kPredicted;
      replacement.created_epoch = current_epoch;
      replacement.confidence = oppose_confidence / static_cast<double>(oppose);
      outcome.action = RevisionAction::kReplaced;
      outcome.replacement_id = replacement.id;
      outcome.questions.clear();
      absl::StatusOr<AddReport> added = store.Add(std::move(replacement));
      if (added.ok()) {
        report.abolished.insert(report.abolished.end(),
                                added->abolished.begin(),
                                added->abolished.end());
      }
    } else {
      outcome.action = RevisionAction::kAskUser;
    }
    report.outcomes.push_back(std::move(outcome));
  }
  return report;
}

}  // namespace

RevisionReport Revise(NormStore& store, const NeighborIndex& index,
                      const PipelineParams& params, std::int64_t current_epoch,
                      const SensitivityModel& sensitivity) {
  return ReviseWith(
      store, index.matrix(),
      [&](UserIndex user, ActionIndex action) {
        return Predict(index, user, action, params.predictor);
      },
      params, current_epoch, sensitivity);
}

RevisionReport Revise(NormStore& store, const PreferenceMatrix& matrix,
                      const PipelineParams& params, std::int64_t current_epoch,
                      const SensitivityModel& sensitivity) {
  const NeighborIndex index(matrix, params.predictor.similarity);
  return Revise(store, index, params, current_epoch, sensitivity);
}

}  // namespace normcf
