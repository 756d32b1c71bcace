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

#ifndef NORMCF_NORM_H_
#define NORMCF_NORM_H_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "normcf/predictor.h"
#include "normcf/preference_model.h"

namespace normcf {

enum class Modality : std::uint8_t { kObligation, kProhibition };

Modality Opposite(Modality modality);
std::string_view ModalityName(Modality modality);
absl::StatusOr<Modality> ParseModality(std::string_view name);

inline constexpr int kWildcard = -1;

// One entry per attribute: a concrete value index or kWildcard. The covered
// action set is the product of the per-attribute choices.
struct NormPattern {
  std::vector<int> entries;

  static NormPattern ForAction(const Action& action);
  static NormPattern Universal(std::size_t num_attributes);

  bool IsWildcard(std::size_t attr) const { return entries[attr] == kWildcard; }

  auto operator<=>(const NormPattern&) const = default;
};

// Entries must be wildcards or valid value indices of `space`.
bool IsValidPattern(const ActionSpace& space, const NormPattern& pattern);

bool Covers(const NormPattern& pattern, const Action& action);
// Fails when pattern, action and space disagree on arity or values.
absl::StatusOr<bool> Covers(const ActionSpace& space,
                            const NormPattern& pattern, const Action& action);
bool CoversIndex(const ActionSpace& space, const NormPattern& pattern,
                 ActionIndex action);
bool Intersects(const NormPattern& a, const NormPattern& b);
// Ascending action indices.
std::vector<ActionIndex> CoveredActions(const ActionSpace& space,
                                        const NormPattern& pattern);
// "(photo,*,night)"
std::string PatternToString(const ActionSpace& space,
                            const NormPattern& pattern);

enum class Provenance : std::uint8_t { kPredicted, kStated };
enum class NormStatus : std::uint8_t { kActive, kAbolished };

std::string_view ProvenanceName(Provenance provenance);
absl::StatusOr<Provenance> ParseProvenance(std::string_view name);
std::string_view StatusName(NormStatus status);
absl::StatusOr<NormStatus> ParseStatus(std::string_view name);

struct Norm {
  std::string id;
  std::string user;
  Modality modality = Modality::kProhibition;
  NormPattern pattern;
  Provenance provenance = Provenance::kPredicted;
  std::int64_t created_epoch = 0;
  NormStatus status = NormStatus::kActive;
  // Stated norms carry 1.
  double confidence = 1.0;

  bool active() const { return status == NormStatus::kActive; }
  bool operator==(const Norm&) const = default;
};

// Opposite modalities over intersecting patterns.
bool Conflicts(const Norm& a, const Norm& b);

enum class DecisionKind : std::uint8_t { kOblige, kProhibit, kNoNorm, kAskUser };

std::string_view DecisionName(DecisionKind kind);

struct Decision {
  DecisionKind kind = DecisionKind::kNoNorm;
  ActionIndex action = 0;
  // AskUser only: the modality the prediction leans towards.
  std::optional<Modality> suggestion;

  bool operator==(const Decision&) const = default;
};

struct SynthesisParams {
  // Minimum |value| for a norm.
  double theta = 0.5;
  // Minimum confidence for creating a norm without asking.
  double gamma = 0.5;

  absl::Status Validate() const;
};

// Turns a prediction into a decision. Evaluated top-down:
//   sensitive            -> AskUser, suggestion only for a clear prediction
//   no neighbours        -> NoNorm
//   |value| < theta      -> NoNorm
//   confidence < gamma   -> AskUser with the prediction as suggestion
//   otherwise            -> Oblige (value >= theta) or Prohibit
Decision Synthesize(ActionIndex action, const PredictionOutcome& outcome,
                    bool sensitive, const SynthesisParams& params);

// Direction of a clear preference, nullopt for |value| < theta.
std::optional<Modality> ClearDirection(double value, double theta);

}  // namespace normcf

#endif  // NORMCF_NORM_H_
