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

#include "normcf/simulation.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <utility>

#include "absl/strings/str_cat.h"
#include "normcf/predictor.h"
#include "normcf/similarity.h"

namespace normcf {

namespace {

// Independent deterministic streams derived from one seed.
std::mt19937_64 Stream(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0,
                       std::uint64_t c = 0) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed),
                    static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(a),
                    static_cast<std::uint32_t>(b),
                    static_cast<std::uint32_t>(c)};
  return std::mt19937_64(seq);
}

enum StreamId : std::uint64_t { kCentroids = 1, kNoise = 2, kMask = 3, kDrift = 4 };

double Clip(double value) {
  return std::clamp(value, kMinPreference, kMaxPreference);
}

}  // namespace

absl::Status PopulationConfig::Validate() const {
  if (n_users < 1) return absl::InvalidArgumentError("n_users must be at least 1");
  if (n_clusters < 1) {
    return absl::InvalidArgumentError("n_clusters must be at least 1");
  }
  if (n_clusters > n_users) {
    return absl::InvalidArgumentError(
        absl::StrCat("n_clusters (", n_clusters, ") exceeds n_users (",
                     n_users, ")"));
  }
  if (!(cluster_noise >= 0.0) || !std::isfinite(cluster_noise)) {
    return absl::InvalidArgumentError("cluster_noise must be non-negative");
  }
  if (!(masking >= 0.0 && masking < 1.0)) {
    return absl::InvalidArgumentError(
        absl::StrCat("masking must lie in [0, 1), got ", masking));
  }
  if (space.num_actions() == 0) {
    return absl::InvalidArgumentError("action space is empty");
  }
  return absl::OkStatus();
}

std::string SyntheticUserId(std::size_t index, std::size_t n_users) {
  std::string digits = std::to_string(index + 1);
  const std::size_t width = std::to_string(std::max<std::size_t>(n_users, 1)).size();
  if (digits.size() < width) digits.insert(0, width - digits.size(), '0');
  return absl::StrCat("u", digits);
}

absl::StatusOr<Population> GeneratePopulation(const PopulationConfig& config) {
  if (absl::Status status = config.Validate(); !status.ok()) return status;
  const std::size_t n_actions = config.space.num_actions();

  Population population{PreferenceMatrix(config.space),
                        PreferenceMatrix(config.space),
                        std::vector<std::size_t>(config.n_users),
                        {}};

  std::mt19937_64 centroid_rng = Stream(config.seed, kCentroids);
  std::uniform_real_distribution<double> uniform(kMinPreference, kMaxPreference);
  population.centroids.assign(config.n_clusters,
                              std::vector<double>(n_actions));
  for (auto& centroid : population.centroids) {
    for (double& value : centroid) value = uniform(centroid_rng);
  }

  std::mt19937_64 noise_rng = Stream(config.seed, kNoise);
  std::mt19937_64 mask_rng = Stream(config.seed, kMask);
  std::normal_distribution<double> noise(0.0, 1.0);
  std::bernoulli_distribution hidden(config.masking);
  for (std::size_t i = 0; i < config.n_users; ++i) {
    const std::string id = SyntheticUserId(i, config.n_users);
    const UserIndex truth_user = population.truth.AddUser(id);
    const UserIndex observed_user = population.observed.AddUser(id);
    const std::size_t cluster = i % config.n_clusters;
    population.cluster_of[i] = cluster;
    for (ActionIndex a = 0; a < n_actions; ++a) {
      const double value = Clip(population.centroids[cluster][a] +
                                config.cluster_noise * noise(noise_rng));
      (void)population.truth.Set(truth_user, a, value, Source::kTruth);
      if (!hidden(mask_rng)) {
        (void)population.observed.Set(observed_user, a, value, Source::kStated);
      }
    }
  }
  return population;
}

absl::StatusOr<NormGrid> OracleNorms(const PreferenceMatrix& truth,
                                     double theta) {
  NormGrid grid(truth.num_users(),
                std::vector<std::optional<Modality>>(truth.num_actions()));
  for (UserIndex u = 0; u < truth.num_users(); ++u) {
    if (truth.KnownCount(u) != truth.num_actions()) {
      return absl::FailedPreconditionError(absl::StrCat(
          "truth for user '", truth.user_id(u), "' is incomplete"));
    }
    for (ActionIndex a = 0; a < truth.num_actions(); ++a) {
      grid[u][a] = ClearDirection(truth.Value(u, a), theta);
    }
  }
  return grid;
}

std::string_view DriftKindName(DriftKind kind) {
  return kind == DriftKind::kSignFlip ? "sign_flip" : "redraw";
}

absl::StatusOr<DriftKind> ParseDriftKind(std::string_view name) {
  if (name == "sign_flip") return DriftKind::kSignFlip;
  if (name == "redraw") return DriftKind::kRedraw;
  return absl::InvalidArgumentError(
      absl::StrCat("unknown drift kind '", std::string(name), "'"));
}

namespace {

Norm MakeNorm(NormStore& store, const std::string& user, Modality modality,
              NormPattern pattern, Provenance provenance, std::int64_t epoch,
              double confidence) {
  Norm norm;
  norm.id = store.NextId();
  norm.user = user;
  norm.modality = modality;
  norm.pattern = std::move(pattern);
  norm.provenance = provenance;
  norm.created_epoch = epoch;
  norm.confidence = provenance == Provenance::kStated ? 1.0 : confidence;
  return norm;
}

// Adds a norm and tallies its effect.
void Insert(NormStore& store, Norm norm, EpochActivity& activity) {
  absl::StatusOr<AddReport> report = store.Add(std::move(norm));
  if (report.ok()) {
    ++activity.norms_created;
    activity.norms_abolished += report->abolished.size();
  }
}

// The truthful oracle: reveal the truth as a stated preference and record a
// stated norm when it is clear.
void AnswerTruthfully(SimulationState& state, UserIndex user, ActionIndex action,
                      EpochActivity& activity) {
  const double value = state.truth.Value(user, action);
  (void)state.observed.Set(user, action, value, Source::kStated);
  const std::optional<Modality> direction =
      ClearDirection(value, state.params.synthesis.theta);
  if (!direction.has_value()) return;
  const ActionSpace& space = state.truth.space();
  Insert(state.norms,
         MakeNorm(state.norms, state.truth.user_id(user), *direction,
                  NormPattern::ForAction(space.ActionAt(action)),
                  Provenance::kStated, state.epoch, 1.0),
         activity);
}

std::vector<UserIndex> UsersInIdOrder(const PreferenceMatrix& matrix) {
  const std::vector<std::size_t> ranks = matrix.IdRanks();
  std::vector<UserIndex> order(matrix.num_users());
  for (UserIndex u = 0; u < order.size(); ++u) order[ranks[u]] = u;
  return order;
}

void ApplyDrift(SimulationState& state, const DriftEvent& event,
                EpochActivity& activity) {
  const std::size_t n_actions = state.truth.num_actions();
  std::vector<double> centroid;
  std::mt19937_64 rng = Stream(state.seed, kDrift,
                               static_cast<std::uint64_t>(event.epoch),
                               event.cluster);
  if (event.kind == DriftKind::kRedraw) {
    std::uniform_real_distribution<double> uniform(kMinPreference,
                                                   kMaxPreference);
    centroid.resize(n_actions);
    for (double& value : centroid) value = uniform(rng);
  }
  std::normal_distribution<double> noise(0.0, 1.0);

  for (UserIndex u = 0; u < state.truth.num_users(); ++u) {
    if (state.cluster_of[u] != event.cluster) continue;
    for (ActionIndex a = 0; a < n_actions; ++a) {
      const double new_value =
          event.kind == DriftKind::kSignFlip
              ? -state.truth.Value(u, a)
              : Clip(centroid[a] + state.cluster_noise * noise(rng));
      (void)state.truth.Set(u, a, new_value, Source::kTruth);
      // Preferences the user has already revealed are revealed anew.
      const UserIndex observed_user =
          *state.observed.FindUser(state.truth.user_id(u));
      if (state.observed.Known(observed_user, a)) {
        (void)state.observed.Set(observed_user, a, new_value, Source::kStated);
      }
    }
    // Restate the user's norms from the updated stated preferences. Add()
    // abolishes any predicted norm the new statements contradict.
    const std::string& id = state.truth.user_id(u);
    for (const Norm* norm : state.norms.Active(id)) {
      if (norm->provenance == Provenance::kStated) {
        (void)state.norms.Abolish(norm->id);
        ++activity.norms_abolished;
      }
    }
    const UserIndex observed_user = *state.observed.FindUser(id);
    for (ActionIndex a = 0; a < n_actions; ++a) {
      if (!state.observed.Known(observed_user, a)) continue;
      const std::optional<Modality> direction = ClearDirection(
          state.observed.Value(observed_user, a), state.params.synthesis.theta);
      if (!direction.has_value()) continue;
      Insert(state.norms,
             MakeNorm(state.norms, id, *direction,
                      NormPattern::ForAction(state.truth.space().ActionAt(a)),
                      Provenance::kStated, state.epoch, 1.0),
             activity);
    }
  }
  ++activity.drift_events;
}

}  // namespace

absl::StatusOr<SimulationState> InitializeSimulation(
    const PopulationConfig& config, const PipelineParams& params,
    std::vector<DriftEvent> drift, DecisionPolicy policy) {
  if (absl::Status status = params.Validate(); !status.ok()) return status;
  for (const DriftEvent& event : drift) {
    if (event.cluster >= config.n_clusters) {
      return absl::InvalidArgumentError(absl::StrCat(
          "drift event targets cluster ", event.cluster, " but only ",
          config.n_clusters, " clusters exist"));
    }
    if (event.epoch < 1) {
      return absl::InvalidArgumentError("drift epoch must be at least 1");
    }
  }
  absl::StatusOr<Population> population = GeneratePopulation(config);
  if (!population.ok()) return population.status();

  SimulationState state{std::move(population->truth),
                        std::move(population->observed),
                        std::move(population->cluster_of),
                        NormStore(config.space),
                        SensitivityModel(config.space),
                        0,
                        params,
                        std::move(drift),
                        policy,
                        config.seed,
                        config.cluster_noise,
                        {}};
  state.decided.assign(state.truth.num_users() * state.truth.num_actions(), 0);

  EpochActivity ignored;
  for (UserIndex u : UsersInIdOrder(state.observed)) {
    const std::string& id = state.observed.user_id(u);
    for (ActionIndex a = 0; a < state.observed.num_actions(); ++a) {
      if (!state.observed.Known(u, a)) continue;
      const std::optional<Modality> direction =
          ClearDirection(state.observed.Value(u, a), params.synthesis.theta);
      if (!direction.has_value()) continue;
      Insert(state.norms,
             MakeNorm(state.norms, id, *direction,
                      NormPattern::ForAction(config.space.ActionAt(a)),
                      Provenance::kStated, 0, 1.0),
             ignored);
    }
    state.norms.Generalize(id);
  }
  return state;
}

NormScores ScoreNorms(const NormStore& store, const PreferenceMatrix& truth,
                      const NormGrid& oracle,
                      const std::vector<std::uint8_t>* cells) {
  const std::size_t n_actions = truth.num_actions();
  std::size_t matched = 0;
  std::size_t scored = 0;
  // [modality] true positives, predicted positives, oracle positives
  std::size_t tp[2] = {0, 0};
  std::size_t claimed[2] = {0, 0};
  std::size_t actual[2] = {0, 0};
  for (UserIndex u = 0; u < truth.num_users(); ++u) {
    const std::vector<std::optional<Modality>> coverage =
        store.Coverage(truth.user_id(u));
    for (ActionIndex a = 0; a < n_actions; ++a) {
      const std::optional<Modality>& have = coverage[a];
      const std::optional<Modality>& want = oracle[u][a];
      if (cells == nullptr || (*cells)[u * n_actions + a] != 0) {
        ++scored;
        matched += (have == want);
      }
      if (have.has_value()) {
        const int m = static_cast<int>(*have);
        ++claimed[m];
        tp[m] += (want == have);
      }
      if (want.has_value()) ++actual[static_cast<int>(*want)];
    }
  }
  auto ratio = [](std::size_t num, std::size_t den) -> std::optional<double> {
    if (den == 0) return std::nullopt;
    return static_cast<double>(num) / static_cast<double>(den);
  };
  const int obl = static_cast<int>(Modality::kObligation);
  const int pro = static_cast<int>(Modality::kProhibition);
  NormScores scores;
  scores.accuracy = ratio(matched, scored);
  scores.obligation_precision = ratio(tp[obl], claimed[obl]);
  scores.obligation_recall = ratio(tp[obl], actual[obl]);
  scores.prohibition_precision = ratio(tp[pro], claimed[pro]);
  scores.prohibition_recall = ratio(tp[pro], actual[pro]);
  return scores;
}

Metrics Evaluate(const SimulationState& state, const NormGrid& oracle,
                 const EpochActivity& activity) {
  Metrics metrics;
  if (!activity.predictions.empty()) {
    double total = 0.0;
    for (const PredictionRecord& record : activity.predictions) {
      total += std::abs(record.value - state.truth.Value(record.user, record.action));
    }
    metrics.prediction_mae =
        total / static_cast<double>(activity.predictions.size());
  }
  const NormScores scores =
      ScoreNorms(state.norms, state.truth, oracle, &state.decided);
  metrics.norm_accuracy = scores.accuracy;
  metrics.obligation_precision = scores.obligation_precision;
  metrics.obligation_recall = scores.obligation_recall;
  metrics.prohibition_precision = scores.prohibition_precision;
  metrics.prohibition_recall = scores.prohibition_recall;
  if (activity.decisions > 0) {
    metrics.interaction_rate = static_cast<double>(activity.ask_user) /
                               static_cast<double>(activity.decisions);
  }
  return metrics;
}

EpochReport RunEpoch(SimulationState& state) {
  ++state.epoch;
  EpochActivity activity;
  const PipelineParams& params = state.params;
  const ActionSpace& space = state.truth.space();
  const std::size_t n_actions = space.num_actions();

  // (1) Sensitivity from the current norm pool.
  state.sensitivity = SensitivityModel::Fit(space, state.norms.ActiveAll(),
                                            params.sensitivity, state.epoch);

  // (2) Decide over a frozen snapshot, then merge serially.
  struct Pending {
    UserIndex user;
    Decision decision;
    double confidence;
  };
  std::vector<Pending> pending;
  {
    const NeighborIndex index(state.observed, params.predictor.similarity);
    for (UserIndex u : UsersInIdOrder(state.observed)) {
      const std::vector<std::optional<Modality>> coverage =
          state.norms.Coverage(state.observed.user_id(u));
      for (ActionIndex a = 0; a < n_actions; ++a) {
        if (state.observed.Known(u, a) || coverage[a].has_value()) continue;
        if (state.policy == DecisionPolicy::kAskEverything) {
          pending.push_back({u, {DecisionKind::kAskUser, a, std::nullopt}, 0.0});
          continue;
        }
        const PredictionOutcome outcome = Predict(index, u, a, params.predictor);
        double confidence = 0.0;
        if (const auto* p = std::get_if<Prediction>(&outcome)) {
          activity.predictions.push_back({u, a, p->value});
          confidence = p->confidence;
        }
        pending.push_back({u,
                           Synthesize(a, outcome, state.sensitivity.IsSensitive(a),
                                      params.synthesis),
                           confidence});
      }
    }
  }
  for (const Pending& item : pending) {
    const ActionIndex a = item.decision.action;
    const std::string& id = state.observed.user_id(item.user);
    ++activity.decisions;
    state.decided[item.user * n_actions + a] = 1;
    switch (item.decision.kind) {
      case DecisionKind::kOblige:
      case DecisionKind::kProhibit: {
        const Modality modality = item.decision.kind == DecisionKind::kOblige
                                      ? Modality::kObligation
                                      : Modality::kProhibition;
        item.decision.kind == DecisionKind::kOblige ? ++activity.obliged
                                                    : ++activity.prohibited;
        Insert(state.norms,
               MakeNorm(state.norms, id, modality,
                        NormPattern::ForAction(space.ActionAt(a)),
                        Provenance::kPredicted, state.epoch, item.confidence),
               activity);
        break;
      }
      case DecisionKind::kNoNorm:
        ++activity.no_norm;
        break;
      case DecisionKind::kAskUser:
        ++activity.ask_user;
        AnswerTruthfully(state, item.user, a, activity);
        break;
    }
  }

  // (3) Generalize.
  for (const std::string& user : state.norms.Users()) {
    activity.norms_generalized += state.norms.Generalize(user).merges.size();
  }

  // (4) Revise aged predicted norms against the updated observations.
  {
    const NeighborIndex index(state.observed, params.predictor.similarity);
    RevisionReport revision =
        Revise(state.norms, index, params, state.epoch, state.sensitivity);
    activity.norms_abolished += revision.abolished.size();
    activity.predictions.insert(activity.predictions.end(),
                                revision.predictions.begin(),
                                revision.predictions.end());
    for (const RevisionOutcome& outcome : revision.outcomes) {
      switch (outcome.action) {
        case RevisionAction::kKept:
          ++activity.revisions_kept;
          break;
        case RevisionAction::kReplaced:
          ++activity.revisions_replaced;
          ++activity.norms_created;
          break;
        case RevisionAction::kAskUser: {
          ++activity.revisions_asked;
          const Norm* norm = state.norms.Find(outcome.norm_id);
          if (norm != nullptr && norm->active()) {
            (void)state.norms.Abolish(outcome.norm_id);
            ++activity.norms_abolished;
          }
          const UserIndex user = *state.observed.FindUser(outcome.user);
          for (const Decision& question : outcome.questions) {
            AnswerTruthfully(state, user, question.action, activity);
          }
          break;
        }
      }
    }
  }

  // (5) Scheduled drift.
  for (const DriftEvent& event : state.drift) {
    if (event.epoch == state.epoch) ApplyDrift(state, event, activity);
  }

  // (6) Score against the current truth.
  EpochReport report;
  report.epoch = state.epoch;
  absl::StatusOr<NormGrid> oracle =
      OracleNorms(state.truth, params.synthesis.theta);
  report.metrics = Evaluate(state, *oracle, activity);
  report.observed_known = state.observed.TotalKnown();
  report.active_norms = state.norms.num_active();
  report.sensitive_values = state.sensitivity.num_sensitive_values();
  report.activity = std::move(activity);
  return report;
}

absl::StatusOr<std::vector<EpochReport>> RunSimulation(
    const PopulationConfig& config, const PipelineParams& params,
    std::int64_t n_epochs, const std::vector<DriftEvent>& drift) {
  if (n_epochs < 1) return absl::InvalidArgumentError("n_epochs must be at least 1");
  absl::StatusOr<SimulationState> state =
      InitializeSimulation(config, params, drift);
  if (!state.ok()) return state.status();
  std::vector<EpochReport> reports;
  reports.reserve(static_cast<std::size_t>(n_epochs));
  for (std::int64_t e = 0; e < n_epochs; ++e) {
    reports.push_back(RunEpoch(*state));
  }
  return reports;
}

std::optional<double> DriftAdherence(const SimulationState& state,
                                     std::size_t cluster,
                                     const NormGrid& before) {
  absl::StatusOr<NormGrid> now =
      OracleNorms(state.truth, state.params.synthesis.theta);
  if (!now.ok()) return std::nullopt;
  std::size_t affected = 0;
  std::size_t updated = 0;
  for (UserIndex u = 0; u < state.truth.num_users(); ++u) {
    if (state.cluster_of[u] != cluster) continue;
    const std::vector<std::optional<Modality>> coverage =
        state.norms.Coverage(state.truth.user_id(u));
    for (ActionIndex a = 0; a < state.truth.num_actions(); ++a) {
      if (before[u][a] == (*now)[u][a] || !coverage[a].has_value()) continue;
      if (!before[u][a].has_value()) continue;
      ++affected;
      updated += (coverage[a] == (*now)[u][a]);
    }
  }
  if (affected == 0) return std::nullopt;
  return static_cast<double>(updated) / static_cast<double>(affected);
}

}  // namespace normcf
