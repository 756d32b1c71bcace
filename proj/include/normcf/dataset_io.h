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

#ifndef NORMCF_DATASET_IO_H_
#define NORMCF_DATASET_IO_H_

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "json.hpp"
#include "normcf/norm.h"
#include "normcf/norm_store.h"
#include "normcf/predictor.h"
#include "normcf/preference_model.h"
#include "normcf/sensitivity.h"
#include "normcf/simulation.h"

// Flat-file formats. Record files are comma-separated with a header line;
// wildcards are spelled `*` and tags are lowercase.
//
//   preferences  user_id,<attr_1>,...,<attr_m>,value,source
//   norms        norm_id,user_id,modality,<attr_1|*>,...,<attr_m|*>,
//                provenance,epoch,status,confidence
//   predictions  user_id,<attr_1>,...,<attr_m>,value,confidence,support
//   decisions    user_id,<attr_1>,...,<attr_m>,decision,suggestion
//   similarity   user_a,user_b,distance,similarity,overlap
//   sensitivity  attribute,value,support,score,flag
//
// The action space is a JSON document:
//   {"attributes": [{"name": "data_type", "values": ["photo", ...]}, ...]}
//
// Reals are written with 17 significant digits so that reading a file back
// reproduces the in-memory values.

namespace normcf {

// Missing or unreadable files yield NotFound / Unavailable; malformed
// content yields InvalidArgument.
absl::StatusOr<std::string> ReadFile(const std::filesystem::path& path);
// Writes to a sibling temporary file and renames it into place.
absl::Status WriteFileAtomically(const std::filesystem::path& path,
                                 std::string_view contents);

std::string FormatReal(double value);

nlohmann::ordered_json ActionSpaceToJson(const ActionSpace& space);
absl::StatusOr<ActionSpace> ActionSpaceFromJson(const nlohmann::json& json);
std::string SerializeActionSpace(const ActionSpace& space);
absl::StatusOr<ActionSpace> ParseActionSpace(std::string_view text);

// Users appear in registration order, entries in action order.
std::string SerializePreferences(const PreferenceMatrix& matrix);
absl::StatusOr<PreferenceMatrix> ParsePreferences(std::string_view text,
                                                  const ActionSpace& space);

std::string SerializeNorms(const ActionSpace& space,
                           const std::vector<const Norm*>& norms);
absl::StatusOr<std::vector<Norm>> ParseNorms(std::string_view text,
                                             const ActionSpace& space);
// Every norm restored as recorded.
absl::StatusOr<NormStore> BuildNormStore(const ActionSpace& space,
                                         std::vector<Norm> norms);

struct PredictionRow {
  UserIndex user = 0;
  ActionIndex action = 0;
  Prediction prediction;
};
std::string SerializePredictions(const PreferenceMatrix& matrix,
                                 const std::vector<PredictionRow>& rows);

struct DecisionRow {
  UserIndex user = 0;
  Decision decision;
};
std::string SerializeDecisions(const PreferenceMatrix& matrix,
                               const std::vector<DecisionRow>& rows);

// Every unordered pair of distinct users.
std::string SerializeSimilarityTable(const NeighborIndex& index);
std::string SerializeSensitivity(const ActionSpace& space,
                                 const SensitivityModel& model);

nlohmann::ordered_json EpochReportToJson(const EpochReport& report);
nlohmann::ordered_json SummaryToJson(const std::vector<EpochReport>& reports);
// One epoch record per line followed by the summary record.
std::string SerializeReports(const std::vector<EpochReport>& reports);

nlohmann::ordered_json NormScoresToJson(const NormScores& scores);

}  // namespace normcf

#endif  // NORMCF_DATASET_IO_H_
