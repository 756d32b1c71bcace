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

#include "normcf/norm.h"

#include <cmath>

#include "absl/strings/str_cat.h"
#include "absl/strings/str_join.h"

namespace normcf {

Modality Opposite(Modality modality) {
  return modality == Modality::kObligation ? Modality::kProhibition
                                           : Modality::kObligation;
}

std::string_view ModalityName(Modality modality) {
  return modality == Modality::kObligation ? "obligation" : "prohibition";
}

absl::StatusOr<Modality> ParseModality(std::string_view name) {
  if (name == "obligation") return Modality::kObligation;
  if (name == "prohibition") return Modality::kProhibition;
  return absl::InvalidArgumentError(absl::StrCat("unknown modality '", std::string(name), "'"));
}

NormPattern NormPattern::ForAction(const Action& action) {
  return NormPattern{action.values};
}

NormPattern NormPattern::Universal(std::size_t num_attributes) {
  return NormPattern{std::vector<int>(num_attributes, kWildcard)};
}

bool IsValidPattern(const ActionSpace& space, const NormPattern& pattern) {
  if (pattern.entries.size() != space.num_attributes()) return false;
  for (std::size_t i = 0; i < pattern.entries.size(); ++i) {
    const int entry = pattern.entries[i];
    if (entry == kWildcard) continue;
    if (entry < 0 || static_cast<std::size_t>(entry) >= space.domain_size(i)) {
      return false;
    }
  }
  return true;
}

bool Covers(const NormPattern& pattern, const Action& action) {
  for (std::size_t i = 0; i < pattern.entries.size(); ++i) {
    if (pattern.entries[i] != kWildcard &&
        pattern.entries[i] != action.values[i]) {
      return false;
    }
  }
  return true;
}

absl::StatusOr<bool> Covers(const ActionSpace& space,
                            const NormPattern& pattern, const Action& action) {
  if (!IsValidPattern(space, pattern)) {
    return absl::InvalidArgumentError("pattern does not match the action space");
  }
  if (!space.Contains(action)) {
    return absl::InvalidArgumentError("action does not match the action space");
  }
  return Covers(pattern, action);
}

bool CoversIndex(const ActionSpace& space, const NormPattern& pattern,
                 ActionIndex action) {
  for (std::size_t i = 0; i < pattern.entries.size(); ++i) {
    if (pattern.entries[i] != kWildcard &&
        pattern.entries[i] != space.ValueAt(action, i)) {
      return false;
    }
  }
  return true;
}

bool Intersects(const NormPattern& a, const NormPattern& b) {
  for (std::size_t i = 0; i < a.entries.size(); ++i) {
    if (a.entries[i] != kWildcard && b.entries[i] != kWildcard &&
        a.entries[i] != b.entries[i]) {
      return false;
    }
  }
  return true;
}

std::vector<ActionIndex> CoveredActions(const ActionSpace& space,
                                        const NormPattern& pattern) {
  std::vector<ActionIndex> covered;
  for (ActionIndex a = 0; a < space.num_actions(); ++a) {
    if (CoversIndex(space, pattern, a)) covered.push_back(a);
  }
  return covered;
}

std::string PatternToString(const ActionSpace& space,
                            const NormPattern& pattern) {
  std::vector<std::string> parts;
  for (std::size_t i = 0; i < pattern.entries.size(); ++i) {
    parts.push_back(pattern.IsWildcard(i)
                        ? std::string("*")
                        : space.attribute(i).values[pattern.entries[i]]);
  }
  return absl::StrCat("(", absl::StrJoin(parts, ","), ")");
}

std::string_view ProvenanceName(Provenance provenance) {
  return provenance == Provenance::kStated ? "stated" : "predicted";
}

absl::StatusOr<Provenance> ParseProvenance(std::string_view name) {
  if (name == "stated") return Provenance::kStated;
  if (name == "predicted") return Provenance::kPredicted;
  return absl::InvalidArgumentError(
      absl::StrCat("unknown provenance '", std::string(name), "'"));
}

std::string_view StatusName(NormStatus status) {
  return status == NormStatus::kActive ? "active" : "abolished";
}

absl::StatusOr<NormStatus> ParseStatus(std::string_view name) {
  if (name == "active") return NormStatus::kActive;
  if (name == "abolished") return NormStatus::kAbolished;
  return absl::InvalidArgumentError(absl::StrCat("unknown status '", std::string(name), "'"));
}

bool Conflicts(const Norm& a, const Norm& b) {
  return a.modality != b.modality && Intersects(a.pattern, b.pattern);
}

std::string_view DecisionName(DecisionKind kind) {
  switch (kind) {
    case DecisionKind::kOblige:
      return "oblige";
    case DecisionKind::kProhibit:
      return "prohibit";
    case DecisionKind::kNoNorm:
      return "no_norm";
    case DecisionKind::kAskUser:
      return "ask_user";
  }
  return "unknown";
}

absl::Status SynthesisParams::Validate() const {
  if (!(theta > 0.0 && theta <= 1.0)) {
    return absl::InvalidArgumentError(
        absl::StrCat("theta must lie in (0, 1], got ", theta));
  }
  if (!(gamma >= 0.0 && gamma <= 1.0)) {
    return absl::InvalidArgumentError(
        absl::StrCat("gamma must lie in [0, 1], got ", gamma));
  }
  return absl::OkStatus();
}

std::optional<Modality> ClearDirection(double value, double theta) {
  if (value >= theta) return Modality::kObligation;
  if (value <= -theta) return Modality::kProhibition;
  return std::nullopt;
}

Decision Synthesize(ActionIndex action, const PredictionOutcome& outcome,
                    bool sensitive, const SynthesisParams& params) {
  const Prediction* prediction = std::get_if<Prediction>(&outcome);
  std::optional<Modality> direction;
  if (prediction != nullptr) {
    direction = ClearDirection(prediction->value, params.theta);
  }

  if (sensitive) {
    return {DecisionKind::kAskUser, action, direction};
  }
  if (prediction == nullptr || !direction.has_value()) {
    return {DecisionKind::kNoNorm, action, std::nullopt};
  }
  if (prediction->confidence < params.gamma) {
    return {DecisionKind::kAskUser, action, direction};
  }
  return {*direction == Modality::kObligation ? DecisionKind::kOblige
                                              : DecisionKind::kProhibit,
          action, std::nullopt};
}

}  // namespace normcf
