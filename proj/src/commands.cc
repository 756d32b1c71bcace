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

#include "normcf/commands.h"

#include <algorithm>
#include <map>
#include <optional>
#include <string>
#include <system_error>
#include <variant>
#include <vector>

#include "absl/strings/str_cat.h"
#include "json.hpp"
#include "normcf/dataset_io.h"
#include "normcf/norm.h"
#include "normcf/norm_store.h"
#include "normcf/predictor.h"
#include "normcf/sensitivity.h"
#include "normcf/similarity.h"
#include "normcf/simulation.h"

namespace normcf {

namespace {

#define NORMCF_RETURN_IF_ERROR(expr)   \
  do {                                 \
    absl::Status status_ = (expr);     \
    if (!status_.ok()) return status_; \
  } while (false)

absl::Status RequirePath(const std::filesystem::path& path,
                         std::string_view field) {
  if (path.empty()) {
    return absl::InvalidArgumentError(
        absl::StrCat("paths.", std::string(field), ": required by this command"));
  }
  return absl::OkStatus();
}

absl::StatusOr<PreferenceMatrix> LoadMatrix(const std::filesystem::path& path,
                                            std::string_view field,
                                            const ActionSpace& space) {
  NORMCF_RETURN_IF_ERROR(RequirePath(path, field));
  absl::StatusOr<std::string> text = ReadFile(path);
  if (!text.ok()) return text.status();
  return ParsePreferences(*text, space);
}

// An empty store when paths.norms is unset.
absl::StatusOr<NormStore> LoadNorms(const Config& config) {
  const ActionSpace& space = config.population.space;
  if (config.paths.norms.empty()) return NormStore(space);
  absl::StatusOr<std::string> text = ReadFile(config.paths.norms);
  if (!text.ok()) return text.status();
  absl::StatusOr<std::vector<Norm>> norms = ParseNorms(*text, space);
  if (!norms.ok()) return norms.status();
  return BuildNormStore(space, *std::move(norms));
}

std::vector<UserIndex> UsersInIdOrder(const PreferenceMatrix& matrix) {
  const std::vector<std::size_t> ranks = matrix.IdRanks();
  std::vector<UserIndex> order(matrix.num_users());
  for (UserIndex u = 0; u < order.size(); ++u) order[ranks[u]] = u;
  return order;
}

class OutputDir {
 public:
  explicit OutputDir(std::filesystem::path dir) : dir_(std::move(dir)) {}

  absl::Status Prepare() const {
    std::error_code error;
    std::filesystem::create_directories(dir_, error);
    if (error) {
      return absl::UnavailableError(absl::StrCat(
          "cannot create ", dir_.string(), ": ", error.message()));
    }
    return absl::OkStatus();
  }

  absl::Status Write(std::string_view name, std::string_view contents) const {
    return WriteFileAtomically(dir_ / std::string(name), contents);
  }

 private:
  std::filesystem::path dir_;
};

absl::Status Generate(const Config& config, const OutputDir& out) {
  absl::StatusOr<Population> population = GeneratePopulation(config.population);
  if (!population.ok()) return population.status();
  std::string clusters = "user_id,cluster\n";
  for (UserIndex u = 0; u < population->truth.num_users(); ++u) {
    absl::StrAppend(&clusters, population->truth.user_id(u), ",",
                    population->cluster_of[u], "\n");
  }
  NORMCF_RETURN_IF_ERROR(out.Prepare());
  NORMCF_RETURN_IF_ERROR(
      out.Write("action_space.json", SerializeActionSpace(config.population.space)));
  NORMCF_RETURN_IF_ERROR(
      out.Write("truth.csv", SerializePreferences(population->truth)));
  NORMCF_RETURN_IF_ERROR(
      out.Write("observed.csv", SerializePreferences(population->observed)));
  return out.Write("clusters.csv", clusters);
}

absl::Status PredictCommand(const Config& config, const OutputDir& out) {
  absl::StatusOr<PreferenceMatrix> matrix = LoadMatrix(
      config.paths.preferences, "preferences", config.population.space);
  if (!matrix.ok()) return matrix.status();
  const PredictorParams& params = config.pipeline.predictor;
  const NeighborIndex index(*matrix, params.similarity);
  std::vector<PredictionRow> rows;
  for (UserIndex u : UsersInIdOrder(*matrix)) {
    for (const auto& [action, outcome] : PredictAll(index, u, params)) {
      if (const auto* prediction = std::get_if<Prediction>(&outcome)) {
        rows.push_back({u, action, *prediction});
      }
    }
  }
  NORMCF_RETURN_IF_ERROR(out.Prepare());
  return out.Write("predictions.csv", SerializePredictions(*matrix, rows));
}

std::int64_t LatestEpoch(const NormStore& store) {
  std::int64_t latest = 0;
  for (const Norm* norm : store.All()) {
    latest = std::max(latest, norm->created_epoch);
  }
  return latest;
}

Norm NewNorm(NormStore& store, const std::string& user, Modality modality,
             const Action& action, Provenance provenance, std::int64_t epoch,
             double confidence) {
  Norm norm;
  norm.id = store.NextId();
  norm.user = user;
  norm.modality = modality;
  norm.pattern = NormPattern::ForAction(action);
  norm.provenance = provenance;
  norm.created_epoch = epoch;
  norm.confidence = provenance == Provenance::kStated ? 1.0 : confidence;
  return norm;
}

// One synthesis round over the dataset. Without a norm file, the clear
// stated preferences become stated norms (epoch 0) first. Every unknown
// action not covered by an active norm then gets a decision; Oblige and
// Prohibit become predicted norms one epoch after the newest existing one.
absl::Status SynthesizeCommand(const Config& config, const OutputDir& out) {
  const ActionSpace& space = config.population.space;
  const PipelineParams& params = config.pipeline;
  absl::StatusOr<PreferenceMatrix> matrix =
      LoadMatrix(config.paths.preferences, "preferences", space);
  if (!matrix.ok()) return matrix.status();
  absl::StatusOr<NormStore> store = LoadNorms(config);
  if (!store.ok()) return store.status();
  const std::vector<UserIndex> users = UsersInIdOrder(*matrix);

  if (config.paths.norms.empty()) {
    for (UserIndex u : users) {
      for (ActionIndex a = 0; a < space.num_actions(); ++a) {
        if (!matrix->Known(u, a) || matrix->SourceOf(u, a) != Source::kStated) {
          continue;
        }
        const std::optional<Modality> direction =
            ClearDirection(matrix->Value(u, a), params.synthesis.theta);
        if (!direction.has_value()) continue;
        absl::StatusOr<AddReport> added = store->Add(
            NewNorm(*store, matrix->user_id(u), *direction, space.ActionAt(a),
                    Provenance::kStated, 0, 1.0));
        if (!added.ok()) return added.status();
      }
    }
  }

  const std::int64_t epoch = LatestEpoch(*store) + 1;
  const SensitivityModel sensitivity = SensitivityModel::Fit(
      space, store->ActiveAll(), params.sensitivity, epoch);
  const NeighborIndex index(*matrix, params.predictor.similarity);

  struct Pending {
    UserIndex user;
    Decision decision;
    double confidence;
  };
  std::vector<Pending> pending;
  for (UserIndex u : users) {
    const std::vector<std::optional<Modality>> coverage =
        store->Coverage(matrix->user_id(u));
    for (ActionIndex a = 0; a < space.num_actions(); ++a) {
      if (matrix->Known(u, a) || coverage[a].has_value()) continue;
      const PredictionOutcome outcome = Predict(index, u, a, params.predictor);
      const auto* prediction = std::get_if<Prediction>(&outcome);
      pending.push_back(
          {u,
           Synthesize(a, outcome, sensitivity.IsSensitive(a), params.synthesis),
           prediction != nullptr ? prediction->confidence : 0.0});
    }
  }

  std::vector<DecisionRow> rows;
  rows.reserve(pending.size());
  for (const Pending& item : pending) {
    rows.push_back({item.user, item.decision});
    const DecisionKind kind = item.decision.kind;
    if (kind != DecisionKind::kOblige && kind != DecisionKind::kProhibit) {
      continue;
    }
    const Modality modality = kind == DecisionKind::kOblige
                                  ? Modality::kObligation
                                  : Modality::kProhibition;
    absl::StatusOr<AddReport> added = store->Add(
        NewNorm(*store, matrix->user_id(item.user), modality,
                space.ActionAt(item.decision.action), Provenance::kPredicted,
                epoch, item.confidence));
    if (!added.ok()) return added.status();
  }
  for (const std::string& user : store->Users()) store->Generalize(user);

  NORMCF_RETURN_IF_ERROR(out.Prepare());
  NORMCF_RETURN_IF_ERROR(
      out.Write("decisions.csv", SerializeDecisions(*matrix, rows)));
  return out.Write("norms.csv", SerializeNorms(space, store->All()));
}

absl::Status SimulateCommand(const Config& config, const OutputDir& out) {
  absl::StatusOr<SimulationState> state = InitializeSimulation(
      config.population, config.pipeline, config.drift, config.policy);
  if (!state.ok()) return state.status();
  std::vector<EpochReport> reports;
  reports.reserve(config.n_epochs);
  for (std::int64_t e = 0; e < config.n_epochs; ++e) {
    reports.push_back(RunEpoch(*state));
  }
  NORMCF_RETURN_IF_ERROR(out.Prepare());
  NORMCF_RETURN_IF_ERROR(out.Write("reports.jsonl", SerializeReports(reports)));
  return out.Write("norms.csv", SerializeNorms(config.population.space,
                                               state->norms.All()));
}

absl::Status InspectCommand(const Config& config, const OutputDir& out) {
  const ActionSpace& space = config.population.space;
  absl::StatusOr<PreferenceMatrix> matrix =
      LoadMatrix(config.paths.preferences, "preferences", space);
  if (!matrix.ok()) return matrix.status();
  absl::StatusOr<NormStore> store = LoadNorms(config);
  if (!store.ok()) return store.status();
  const NeighborIndex index(*matrix, config.pipeline.predictor.similarity);
  const SensitivityModel sensitivity =
      SensitivityModel::Fit(space, store->ActiveAll(),
                            config.pipeline.sensitivity, LatestEpoch(*store));
  NORMCF_RETURN_IF_ERROR(out.Prepare());
  NORMCF_RETURN_IF_ERROR(
      out.Write("similarity.csv", SerializeSimilarityTable(index)));
  return out.Write("sensitivity.csv", SerializeSensitivity(space, sensitivity));
}

absl::Status EvaluateCommand(const Config& config, const OutputDir& out) {
  const ActionSpace& space = config.population.space;
  absl::StatusOr<PreferenceMatrix> truth =
      LoadMatrix(config.paths.truth, "truth", space);
  if (!truth.ok()) return truth.status();
  NORMCF_RETURN_IF_ERROR(RequirePath(config.paths.norms, "norms"));
  absl::StatusOr<NormStore> store = LoadNorms(config);
  if (!store.ok()) return store.status();
  absl::StatusOr<NormGrid> oracle =
      OracleNorms(*truth, config.pipeline.synthesis.theta);
  if (!oracle.ok()) return oracle.status();

  const NormScores scores = ScoreNorms(*store, *truth, *oracle, nullptr);
  nlohmann::ordered_json report = NormScoresToJson(scores);
  report["users"] = truth->num_users();
  report["actions"] = space.num_actions();
  report["active_norms"] = store->num_active();
  NORMCF_RETURN_IF_ERROR(out.Prepare());
  return out.Write("evaluation.json", report.dump(2) + "\n");
}

}  // namespace

absl::Status Execute(std::string_view command, const Config& config,
                     const std::filesystem::path& out_dir) {
  const OutputDir out(out_dir.empty() ? std::filesystem::path(".") : out_dir);
  if (command == "generate") return Generate(config, out);
  if (command == "predict") return PredictCommand(config, out);
  if (command == "synthesize") return SynthesizeCommand(config, out);
  if (command == "simulate") return SimulateCommand(config, out);
  if (command == "inspect") return InspectCommand(config, out);
  if (command == "evaluate") return EvaluateCommand(config, out);
  return absl::InvalidArgumentError(
      absl::StrCat("unknown command '", std::string(command), "'"));
}

int ExitCode(const absl::Status& status) {
  if (status.ok()) return 0;
  if (absl::IsNotFound(status) || absl::IsUnavailable(status)) return 2;
  return 1;
}

std::string ErrorLine(const absl::Status& status) {
  const char* kind = ExitCode(status) == 2 ? "io error" : "validation error";
  std::string message(status.message());
  std::replace(message.begin(), message.end(), '\n', ' ');
  return absl::StrCat("normcf: ", kind, ": ", message);
}

}  // namespace normcf
